"""Extrinsic turn reward and the information-gain intrinsic reward."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import INFO_ACTION_KINDS, DialogueAct

NORMALISATION_TOL = 1e-6

SUCCESS_REWARD = 20.0
TURN_PENALTY = -1.0


class RewardError(ValueError):
    pass


@dataclass(frozen=True)
class RewardConfig:
    success_reward: float = SUCCESS_REWARD
    turn_penalty: float = TURN_PENALTY
    delta: float = 0.2
    divergence: str = "jensen_shannon"

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise RewardError("delta outside [0, 1]")
        if self.divergence not in ("jensen_shannon", "kullback_leibler"):
            raise RewardError(f"unknown divergence {self.divergence!r}")


def extrinsic_reward(final_turn: bool, success: bool,
                     cfg: RewardConfig = RewardConfig()) -> float:
    """-1 per non-final turn; the final turn carries 0 or the success bonus."""
    if not final_turn:
        return cfg.turn_penalty
    return cfg.success_reward if success else 0.0


def _check_distribution(p: np.ndarray, name: str):
    if np.any(p < 0.0):
        raise RewardError(f"{name} has negative entries")
    if abs(float(p.sum()) - 1.0) > NORMALISATION_TOL:
        raise RewardError(f"{name} is not normalised (sum={p.sum()})")


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence with base-2 logs, bounded in [0, 1]."""
    p = np.ascontiguousarray(p, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise RewardError("distribution length mismatch")
    _check_distribution(p, "p")
    _check_distribution(q, "q")
    return float(kernels.js_divergence(p, q))


def kl_divergence(p, q) -> float:
    """KL(p || q) with base-2 logs; infinite when q misses mass p needs."""
    p = np.ascontiguousarray(p, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise RewardError("distribution length mismatch")
    _check_distribution(p, "p")
    _check_distribution(q, "q")
    mask = p > 0.0
    if np.any(q[mask] == 0.0):
        return float("inf")
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def divergence(p, q, cfg: RewardConfig = RewardConfig()) -> float:
    if cfg.divergence == "kullback_leibler":
        return kl_divergence(p, q)
    return js_divergence(p, q)


def information_gain(b, action: DialogueAct, b_next,
                     cfg: RewardConfig = RewardConfig()) -> float:
    """Divergence between the acted-on slot's distribution before and after.

    Only defined for information-seeking actions; anything without a slot
    (inform, bye, ...) is rejected.
    """
    if action.act_type not in INFO_ACTION_KINDS:
        raise RewardError(
            f"information gain undefined for act {action.act_type!r}")
    slot = action.slot
    if slot is None:
        raise RewardError("information-seeking act without a slot")
    return divergence(b.distribution(slot), b_next.distribution(slot), cfg)


def thresholded_gain(r_i: float, delta: float = 0.2) -> int:
    """+1 when the gain reaches the threshold, -1 otherwise."""
    return 1 if r_i >= delta else -1
