"""Pure-Python SplitMix64 used as an independent reference for the kernels."""

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def derive(key: int, index: int) -> int:
    return mix64((key + (index + 1) * GAMMA) & MASK)


def below(key: int, index: int, m: int) -> int:
    return int((derive(key, index) >> 11) * 2.0**-53 * m)
