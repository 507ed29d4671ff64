"""Anytime confidence intervals for the weighted coverage of a fixed node set."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import checkpoint_schedule, f_lower, f_upper

RELATIVE_FLOOR = 1e-6


@dataclass(frozen=True)
class CoverageEstimate:
    mean: float
    lb: float
    ub: float
    samples: int
    epsilon: float
    delta: float
    precise: bool

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "lb": self.lb,
            "ub": self.ub,
            "samples": self.samples,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "precise": self.precise,
        }


def estimate_coverage(oracle, S, eps: float, delta: float, max_samples: int = 10 ** 7, beta: float = 0.1):
    """Sample until the interval is within relative width ``2 * eps``.

    At the t-th checkpoint each side uses failure probability
    ``delta / (2 t (t + 1))``, so all checkpoints hold jointly with
    probability ``1 - delta``. The reported interval is the intersection of
    every interval seen so far.
    """
    S = set(S)
    if not S:
        raise ValueError("solution set must be nonempty")
    if not (eps > 0 and 0 < delta < 1):
        raise ValueError("eps must be positive and delta in (0, 1)")
    if max_samples < 1:
        raise ValueError("max_samples must be positive")

    hits = 0
    N = 0
    lb, ub = 0.0, 1.0
    t = 0
    precise = False
    for cp in checkpoint_schedule(beta):
        target = min(cp, max_samples)
        while N < target:
            E = oracle.next_hyperedge()
            N += 1
            if not S.isdisjoint(E):
                hits += 1
        t += 1
        side = delta / (2.0 * t * (t + 1))
        mean = hits / N
        lb = max(lb, f_lower(N, mean, side, N))
        ub = min(ub, f_upper(N, mean, side, N))
        width = ub - lb
        if mean < RELATIVE_FLOOR:
            if width <= 2.0 * eps * RELATIVE_FLOOR:
                precise = True
        elif width <= 2.0 * eps * lb:
            precise = True
        if precise or N >= max_samples:
            break

    mean = hits / N
    return CoverageEstimate(
        mean=mean,
        lb=min(lb, mean),
        ub=max(ub, mean),
        samples=N,
        epsilon=eps,
        delta=delta,
        precise=precise,
    )
