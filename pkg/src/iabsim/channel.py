"""Per-link blockage model: a two-state Markov chain (available / blocked).

Transition probabilities are derived from the target stationary blockage
probability and the mean blockage duration in slots. Every link consumes
exactly one uniform draw per slot, in link id order, so a channel trace is a
pure function of (seed, link count, horizon) and never depends on scheduler
decisions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    p_block: float    # available -> blocked, per slot
    p_recover: float  # blocked -> available, per slot
    p_steady: float   # stationary blockage probability


def derive_transition_probs(p_blk_steady: float, mean_block_duration: float) -> ChannelParams:
    """Solve the two-state chain for the given stationary point.

    Geometric sojourn in the blocked state gives p_recover = 1/duration; the
    stationary balance p_steady = p_block / (p_block + p_recover) gives p_block.
    """
    if not 0.0 <= p_blk_steady < 1.0:
        raise ValueError("p_blk_steady must be in [0, 1)")
    if mean_block_duration < 1.0:
        raise ValueError("mean_block_duration must be >= 1 slot")
    p_recover = 1.0 / mean_block_duration
    p_block = p_blk_steady * p_recover / (1.0 - p_blk_steady)
    if p_block > 1.0:
        raise ValueError("stationary point unreachable: implied p_block exceeds 1")
    return ChannelParams(p_block=p_block, p_recover=p_recover, p_steady=p_blk_steady)


def init_stationary(n_links: int, params: ChannelParams, draws: np.ndarray) -> np.ndarray:
    """Initial state vector (uint8, 1 = blocked) sampled from the stationary law.

    draws is one uniform per link, link id order.
    """
    if draws.shape != (n_links,):
        raise ValueError("need one draw per link")
    return (draws < params.p_steady).astype(np.uint8)


def step_from_draws(blocked: np.ndarray, draws: np.ndarray, params: ChannelParams) -> np.ndarray:
    """One synchronous chain step for all links from pre-drawn uniforms."""
    stay_blocked = draws >= params.p_recover
    go_blocked = draws < params.p_block
    return np.where(blocked == 1, stay_blocked, go_blocked).astype(np.uint8)


class ChannelState:
    """Stateful wrapper used by tests and debug dumps; the simulation kernels
    consume pregenerated draw matrices directly via step_from_draws."""

    def __init__(self, n_links: int, params: ChannelParams, rng: np.random.Generator):
        self.params = params
        self.n_links = n_links
        self.blocked = init_stationary(n_links, params, rng.random(n_links))
        self._rng = rng

    def step(self) -> None:
        self.blocked = step_from_draws(self.blocked, self._rng.random(self.n_links), self.params)

    def is_available(self, link: int) -> bool:
        if not 0 <= link < self.n_links:
            raise IndexError(f"unknown link id {link}")
        return self.blocked[link] == 0


def pregenerate_draws(n_links: int, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """(horizon+1, n_links) uniforms: row 0 seeds the stationary init, row t
    drives the transition into slot t."""
    return rng.random((horizon + 1, n_links))


def write_channel_csv(trace: np.ndarray, path: str) -> None:
    """Dump a (slots, links) blockage trace as (slot, link, state) rows."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slot", "link", "state"])
        for t in range(trace.shape[0]):
            for l in range(trace.shape[1]):
                w.writerow([t, l, "blocked" if trace[t, l] else "available"])
