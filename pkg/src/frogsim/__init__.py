"""Frog model / push-gossip wakeup times on the complete graph."""

from .model import FrogState, ModelConfig, Rule, StepOutcome, Variant

__version__ = "0.1.0"

__all__ = ["FrogState", "ModelConfig", "Rule", "StepOutcome", "Variant", "__version__"]
