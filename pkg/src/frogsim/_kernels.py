"""Compiled per-trial kernels.

Every kernel takes ``(master, start, stop, ...)`` and processes trials
``start..stop-1``; trial ``i`` draws only from the stream ``derive(master, i)``
and its sub-streams, so any partition of the trial range gives identical
results.

Frog move modes:
    0  K_n: uniform over the n - 1 other vertices.
    1  K_n with self-loops: uniform over all n vertices.
    2  K_n, obtained from the mode-1 stream of the same frog by skipping
       self-loop moves.  Used to couple the two graphs path by path.
"""

import numpy as np
from numba import njit

from ._rng import below, derive, uniform
from .model import select_wakes

BIG = np.int64(1) << np.int64(62)


@njit(cache=True)
def _move(mode, n, fkey, nstep, i, p):
    if mode == 0:
        r = below(fkey, nstep[i], n - 1)
        nstep[i] += 1
        return r + 1 if r >= p else r
    if mode == 1:
        r = below(fkey, nstep[i], n)
        nstep[i] += 1
        return r
    r = p
    while r == p:
        r = below(fkey, nstep[i], n)
        nstep[i] += 1
    return r


@njit(cache=True)
def frog_init(key, awake, home, fkeys, pos, nstep):
    awake[:] = 0
    awake[0] = 1
    home[0] = 0
    fkeys[0] = derive(key, 0)
    pos[0] = 0
    nstep[0] = 0
    return 1


@njit(cache=True)
def frog_advance(n, mode, a_num, a_den, key, k, t, stop_k, tmax,
                 traj, awake, home, fkeys, pos, nstep, buf):
    """Step until ``k >= stop_k`` or ``t == tmax``; returns ``(t, k)``.

    ``traj[t]`` receives ``N_t`` for every time reached that fits in ``traj``.
    """
    while k < stop_k and t < tmax:
        for i in range(k):
            pos[i] = _move(mode, n, fkeys[i], nstep, i, pos[i])
        quota = 0
        if a_num > 0:
            quota = (a_num * k + a_den - 1) // a_den
        woken, visited = select_wakes(awake, pos, k, quota, buf)
        for w in range(woken):
            v = buf[w]
            home[k + w] = v
            fkeys[k + w] = derive(key, v)
            pos[k + w] = v
            nstep[k + w] = 0
        k += woken
        t += 1
        if t < traj.size:
            traj[t] = k
    return t, k


@njit(cache=True)
def _fill_tail(traj, t, k):
    for s in range(t + 1, traj.size):
        traj[s] = k


@njit(cache=True)
def wakeup_times(master, start, stop, n, mode, a_num, a_den):
    out = np.empty(stop - start, np.int64)
    awake = np.empty(n, np.int8)
    home = np.empty(n, np.int64)
    fkeys = np.empty(n, np.uint64)
    pos = np.empty(n, np.int64)
    nstep = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    traj = np.empty(0, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        t, k = frog_advance(n, mode, a_num, a_den, key, k, 0, n, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        out[i - start] = t
    return (out,)


@njit(cache=True)
def trajectories(master, start, stop, n, mode, a_num, a_den, stop_k, tmax):
    """Matrix of ``N_t`` for ``t = 0..tmax``; frozen once ``k >= stop_k``."""
    out = np.empty((stop - start, tmax + 1), np.int64)
    awake = np.empty(n, np.int8)
    home = np.empty(n, np.int64)
    fkeys = np.empty(n, np.uint64)
    pos = np.empty(n, np.int64)
    nstep = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        traj = out[i - start]
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        traj[0] = k
        t, k = frog_advance(n, mode, a_num, a_den, key, k, 0, stop_k, tmax,
                            traj, awake, home, fkeys, pos, nstep, buf)
        _fill_tail(traj, t, k)
    return (out,)


@njit(cache=True)
def cover_times(master, start, stop, n, walkers, selfloop):
    """Steps (and individual walker moves) for ``walkers`` walkers started at
    vertex 0 to visit every vertex.  Walkers move in index order within a
    step; ``moves`` counts up to and including the covering move.
    """
    steps = np.empty(stop - start, np.int64)
    moves = np.empty(stop - start, np.int64)
    visited = np.empty(n, np.int8)
    pos = np.empty(walkers, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        visited[:] = 0
        visited[0] = 1
        pos[:] = 0
        count = 1
        c = 0
        t = 0
        m = 0
        while count < n:
            t += 1
            for w in range(walkers):
                if selfloop:
                    v = below(key, c, n)
                else:
                    r = below(key, c, n - 1)
                    v = r + 1 if r >= pos[w] else r
                c += 1
                pos[w] = v
                if count < n:
                    m += 1
                    if visited[v] == 0:
                        visited[v] = 1
                        count += 1
        steps[i - start] = t
        moves[i - start] = m
    return steps, moves


@njit(cache=True)
def bernoulli_pairs(master, start, stop, qs, p):
    x = np.empty(stop - start, np.int64)
    y = np.empty(stop - start, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        sx = 0
        sy = 0
        for j in range(qs.size):
            u = uniform(key, j)
            if u <= qs[j]:
                sx += 1
            if u <= p:
                sy += 1
        x[i - start] = sx
        y[i - start] = sy
    return x, y


@njit(cache=True)
def selfloop_pairs(master, start, stop, n):
    """(T_n, T_n with self-loops) per path, K_n frogs loop-erasing the
    self-loop trajectories of their partners."""
    x = np.empty(stop - start, np.int64)
    y = np.empty(stop - start, np.int64)
    awake = np.empty(n, np.int8)
    home = np.empty(n, np.int64)
    fkeys = np.empty(n, np.uint64)
    pos = np.empty(n, np.int64)
    nstep = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    traj = np.empty(0, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        t, k = frog_advance(n, 2, 0, 1, key, k, 0, n, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        x[i - start] = t
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        t, k = frog_advance(n, 1, 0, 1, key, k, 0, n, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        y[i - start] = t
    return x, y


@njit(cache=True)
def phase_pairs(master, start, stop, n):
    """(T_n, tau + C) per path on K_n.

    ``tau`` is the first time at least ceil(n/2) frogs are awake; ``C`` is the
    time for the ceil(n/2) lowest-labelled awake frogs, replaying their own
    trajectories without waking anyone, to visit every vertex.
    """
    half = (n + 1) // 2
    x = np.empty(stop - start, np.int64)
    y = np.empty(stop - start, np.int64)
    taus = np.empty(stop - start, np.int64)
    awake = np.empty(n, np.int8)
    home = np.empty(n, np.int64)
    fkeys = np.empty(n, np.uint64)
    pos = np.empty(n, np.int64)
    nstep = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    visited = np.empty(n, np.int8)
    wkeys = np.empty(half, np.uint64)
    wpos = np.empty(half, np.int64)
    wstep = np.empty(half, np.int64)
    traj = np.empty(0, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        tau, k = frog_advance(n, 0, 0, 1, key, k, 0, half, BIG,
                              traj, awake, home, fkeys, pos, nstep, buf)
        visited[:] = awake
        count = k
        order = np.argsort(home[:k])
        for b in range(half):
            f = order[b]
            wkeys[b] = fkeys[f]
            wpos[b] = pos[f]
            wstep[b] = nstep[f]
        t, k = frog_advance(n, 0, 0, 1, key, k, tau, n, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        c = 0
        while count < n:
            c += 1
            for b in range(half):
                v = _move(0, n, wkeys[b], wstep, b, wpos[b])
                wpos[b] = v
                if visited[v] == 0:
                    visited[v] = 1
                    count += 1
        x[i - start] = t
        y[i - start] = tau + c
        taus[i - start] = tau
    return x, y, taus


@njit(cache=True)
def batch_pairs(master, start, stop, n, a_num, a_den, tmax, p_num, p_den, nstar):
    """Batch-rule and full-rule frog models on K_n with self-loops sharing
    every frog trajectory, plus an independent Bernoulli(p) success process.

    Returns batch and full ``N_t`` matrices for ``t <= tmax`` (batch frozen
    once it reaches ceil(n/2)), both hitting times of ceil(n/2), the success
    counts ``S_t`` and the time of the ``nstar``-th success.
    """
    half = (n + 1) // 2
    m = stop - start
    nb = np.empty((m, tmax + 1), np.int64)
    nf = np.empty((m, tmax + 1), np.int64)
    succ = np.empty((m, tmax + 1), np.int64)
    tau_b = np.empty(m, np.int64)
    tau_f = np.empty(m, np.int64)
    geo = np.empty(m, np.int64)
    awake = np.empty(n, np.int8)
    home = np.empty(n, np.int64)
    fkeys = np.empty(n, np.uint64)
    pos = np.empty(n, np.int64)
    nstep = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    for i in range(start, stop):
        r = i - start
        key = derive(master, i)
        traj = nb[r]
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        traj[0] = k
        t, k = frog_advance(n, 1, a_num, a_den, key, k, 0, half, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        tau_b[r] = t
        _fill_tail(traj, t, k)

        traj = nf[r]
        k = frog_init(key, awake, home, fkeys, pos, nstep)
        traj[0] = k
        t, k = frog_advance(n, 1, 0, 1, key, k, 0, half, BIG,
                            traj, awake, home, fkeys, pos, nstep, buf)
        tau_f[r] = t
        t, k = frog_advance(n, 1, 0, 1, key, k, t, n, tmax,
                            traj, awake, home, fkeys, pos, nstep, buf)
        _fill_tail(traj, t, k)

        skey = derive(key, n)
        s = 0
        succ[r, 0] = 0
        j = 0
        g = -1
        while j < tmax or (g < 0 and nstar > 0):
            if uniform(skey, j) * p_den < p_num:
                s += 1
            j += 1
            if j <= tmax:
                succ[r, j] = s
            if g < 0 and s >= nstar:
                g = j
        geo[r] = g if nstar > 0 else 0
    return nb, nf, succ, tau_b, tau_f, geo


@njit(cache=True)
def batch_success(master, start, stop, n, k, quota):
    """Indicator that ``k`` frogs on K_n with self-loops (vertices 0..k-1
    awake) visit at least ``quota`` distinct sleeping vertices in one step."""
    out = np.empty(stop - start, np.int64)
    mark = np.zeros(n, np.int64)
    for i in range(start, stop):
        key = derive(master, i)
        cnt = 0
        for f in range(k):
            v = below(key, f, n)
            if v >= k and mark[v] != i + 1:
                mark[v] = i + 1
                cnt += 1
        out[i - start] = 1 if cnt >= quota else 0
    return (out,)
