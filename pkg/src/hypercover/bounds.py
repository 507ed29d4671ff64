"""Upper bounds on running optimum, anytime confidence bounds, guarantee constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

ONE_MINUS_INV_E = 1.0 - 1.0 / math.e


# ---------------------------------------------------------------------------
# Upper-bound functions on the running optimum


def f_requirement(d_S: int, k: int, max_deg: int) -> int:
    return d_S + k * max_deg


def f_topk(d_S: int, topk_sum: int) -> int:
    return d_S + topk_sum


def df2d_objective(alpha: float, d_S: int, k: int, deg_r, covered_count) -> float:
    """Dual objective at ``alpha``: ``k * max_i(D_i - alpha * S_i) + alpha * d_S``.

    ``D_i`` is the full-sketch degree (``deg_r + covered_count``) and ``S_i``
    the number of covered hyperedges containing ``i``.
    """
    deg_r = np.asarray(deg_r, dtype=float)
    covered = np.asarray(covered_count, dtype=float)
    if deg_r.size == 0:
        return alpha * d_S
    t = float(np.max(deg_r + (1.0 - alpha) * covered))
    return k * max(t, 0.0) + alpha * d_S


def f_df2d(d_S: int, k: int, deg_r, covered_count, iterations: int = 64) -> float:
    """Two-variable relaxed dual bound, minimized over ``alpha`` in [0, 1].

    The objective is convex piecewise-linear in ``alpha``; golden-section
    search plus both endpoints. Every evaluated point is dual-feasible, so
    the result is an upper bound whatever the search accuracy.
    """
    deg_r = np.asarray(deg_r, dtype=float)
    covered = np.asarray(covered_count, dtype=float)
    if deg_r.size == 0:
        return 0.0
    full = deg_r + covered

    def g(alpha: float) -> float:
        return k * float(np.max(full - alpha * covered)) + alpha * d_S

    best = min(g(0.0), g(1.0))
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, 1.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(iterations):
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - invphi * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + invphi * (hi - lo)
            g2 = g(x2)
    return min(best, g1, g2)


# ---------------------------------------------------------------------------
# Anytime confidence bounds on a Bernoulli mean


def _as_output(x):
    return float(x) if np.ndim(x) == 0 else x


def f_lower(i, mu_hat, delta: float, N):
    """Lower confidence bound on the mean, valid simultaneously for all i <= N.

    Vectorized over ``i``, ``mu_hat`` and ``N``. Result clamped to [0, 1].
    """
    i = np.asarray(i, dtype=float)
    m = np.clip(np.asarray(mu_hat, dtype=float), 0.0, 1.0)
    a = i / np.asarray(N, dtype=float)
    c = math.log(1.0 / delta) / i
    with np.errstate(divide="ignore", invalid="ignore"):
        # for c >= 3 the linear case admits every mean in [0, 1]
        linear = np.where(c < 3.0, m + (m - 1.0) * c / (3.0 - c), 0.0)
        disc = c * c * (3.0 + a * (m - 1.0)) ** 2 + 18.0 * a * c * (1.0 - m) * m
        root = (3.0 * c + 3.0 * a * m - a * c * (m + 1.0) - np.sqrt(np.maximum(disc, 0.0))) / (
            c * (6.0 - 2.0 * a) + 3.0 * a
        )
    out = np.clip(np.minimum(linear, root), 0.0, 1.0)
    return _as_output(out)


def f_upper(i, mu_hat, delta: float, N):
    """Upper confidence bound on the mean, valid simultaneously for all i <= N."""
    i = np.asarray(i, dtype=float)
    m = np.clip(np.asarray(mu_hat, dtype=float), 0.0, 1.0)
    a = i / np.asarray(N, dtype=float)
    c = math.log(1.0 / delta) / i
    linear = m + (1.0 - m) * c / (3.0 + c)
    disc = c * c * (3.0 + a * (1.0 - m)) ** 2 + 18.0 * a * c * (1.0 - m) * m
    root = (3.0 * c + 3.0 * a * m + a * c * (1.0 + m) + np.sqrt(np.maximum(disc, 0.0))) / (
        c * (6.0 + 2.0 * a) + 3.0 * a
    )
    out = np.clip(np.maximum(linear, root), 0.0, 1.0)
    return _as_output(out)


def required_samples(eps: float, delta: float, mu: float) -> int:
    """Samples so that the running sum stays within ``eps * mu * N`` w.p. 1 - delta."""
    if mu <= 0:
        raise ValueError("mean floor must be positive")
    if not (0 < eps and 0 < delta < 1):
        raise ValueError("eps must be positive and delta in (0, 1)")
    return math.ceil((8.0 / 3.0) * math.log(2.0 / delta) / (mu * eps * eps))


# ---------------------------------------------------------------------------
# Guarantee constants


@dataclass(frozen=True)
class GuaranteeParams:
    epsilon: float
    delta: float
    k: int
    n: int
    alpha: float
    beta: float
    epsilon2: float
    c_const: float
    p_const: float
    z_star: int
    t_star_floor: float
    i0: int
    delta_prime: float
    rho_k: float
    log_binom: float
    opt_floor: float
    residual: float


@dataclass(frozen=True)
class QualityBound:
    lb: float
    ub: Optional[float] = None

    @property
    def ratio(self) -> Optional[float]:
        if self.ub is None or self.ub <= 0:
            return None
        return self.lb / self.ub


def rho(k: int) -> float:
    return 1.0 - (1.0 - 1.0 / k) ** k


def log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _epsilon2(eps: float, alpha: float, log_p: float, log_c_nk: float) -> float:
    num = math.sqrt(log_p + log_c_nk)
    return num / (ONE_MINUS_INV_E * math.sqrt(log_p) + num) * eps / (1.0 + alpha)


def _c_and_p(eps2: float, alpha: float, delta: float):
    c = (1.0 + eps2) / ((1.0 - eps2) * ONE_MINUS_INV_E)
    p = 4.0 * (1 + math.ceil(math.log(c) / math.log(1.0 + alpha))) / delta
    return c, p


def derive_params(
    n: int,
    k: int,
    eps: float,
    delta: float,
    alpha: float = 0.1,
    beta: float = 0.1,
    opt_floor: Optional[float] = None,
    max_eps: float = ONE_MINUS_INV_E,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> GuaranteeParams:
    """All constants behind the fixed-threshold and adaptive guarantees.

    ``epsilon2`` and ``p`` depend on each other; they are resolved by
    fixed-point iteration starting from ``eps / (1 + alpha)``. If the
    iteration cycles (``p`` moves in integer steps), the smallest
    ``epsilon2`` of the cycle is kept, which only enlarges ``z*``.
    """
    if not (isinstance(k, int) and 1 <= k < n):
        raise ValueError(f"budget k={k} must satisfy 1 <= k < n={n}")
    if not (0.0 < eps < max_eps):
        raise ValueError(f"eps={eps} must lie in (0, {max_eps:.6f})")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta={delta} must lie in (0, 1)")
    if not (0.0 < alpha < 1.0 and beta > 0.0):
        raise ValueError("alpha must lie in (0, 1) and beta must be positive")

    log_c_nk = log_binomial(n, k)
    eps2 = eps / (1.0 + alpha)
    seen = []
    for _ in range(max_iter):
        c, p = _c_and_p(eps2, alpha, delta)
        new = _epsilon2(eps, alpha, math.log(p), log_c_nk)
        if abs(new - eps2) < tol:
            eps2 = new
            break
        if any(abs(new - s) < tol for s in seen):
            cycle = seen[next(j for j, s in enumerate(seen) if abs(new - s) < tol):]
            eps2 = min(cycle + [new])
            break
        seen.append(new)
        eps2 = new
    c, p = _c_and_p(eps2, alpha, delta)
    log_p = math.log(p)
    residual = abs(_epsilon2(eps, alpha, log_p, log_c_nk) - eps2)

    z_formula = (
        (1.0 + eps2) / ONE_MINUS_INV_E
        * (2.0 + (2.0 / 3.0) * eps2 * (1.0 - alpha))
        * (log_p + log_c_nk)
        / (eps2 * eps2)
    )
    z_star = max(1, math.ceil(z_formula))

    floor = k / n if opt_floor is None else opt_floor
    t_star = z_star * ONE_MINUS_INV_E * (1.0 + alpha) ** 2 / (1.0 + eps2) / floor

    dagum = (2.0 + 2.0 * eps / 3.0) * math.log(1.0 / delta)
    i0 = max(0, math.ceil(math.log2(z_star * eps * eps / dagum)))

    rounds = max(1.0, math.log2(z_star)) * max(1.0, math.log(c * t_star) / math.log(1.0 + beta))
    delta_prime = delta / (2.0 * rounds)

    return GuaranteeParams(
        epsilon=eps,
        delta=delta,
        k=k,
        n=n,
        alpha=alpha,
        beta=beta,
        epsilon2=eps2,
        c_const=c,
        p_const=p,
        z_star=z_star,
        t_star_floor=t_star,
        i0=i0,
        delta_prime=delta_prime,
        rho_k=rho(k),
        log_binom=log_c_nk,
        opt_floor=floor,
        residual=residual,
    )


def threshold_grid(z_star: int, i0: int) -> list:
    """Doubling thresholds from ``ceil(z*/2^i0)`` up to exactly ``z*``."""
    grid = []
    for j in range(i0, -1, -1):
        z = max(1, math.ceil(z_star / 2 ** j))
        if not grid or z > grid[-1]:
            grid.append(z)
    return grid


def checkpoint_schedule(beta: float):
    """Distinct values of ``ceil((1 + beta)^t)`` for t = 0, 1, 2, ..."""
    last = 0
    t = 0
    while True:
        v = math.ceil((1.0 + beta) ** t - 1e-9)
        if v > last:
            last = v
            yield v
        t += 1
