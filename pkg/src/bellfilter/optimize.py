"""Multi-start derivative-free maximization shared by the optimizers.

All searches are Nelder-Mead restarts seeded from a low-discrepancy
sequence, so results are deterministic for a fixed seed, iteration cap,
and restart count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, minimize
from scipy.stats import qmc


@dataclass(frozen=True)
class OptimizerOptions:
    """Restart budget, per-start iteration cap, simplex tolerance, seed."""

    restarts: int = 16
    max_iter: int = 2000
    tol: float = 1e-10
    seed: int = 0


def low_discrepancy_starts(
    lower: np.ndarray, upper: np.ndarray, count: int, seed: int
) -> np.ndarray:
    """Halton points filling the box [lower, upper], shape (count, dim)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if count <= 0:
        return np.empty((0, lower.size))
    sampler = qmc.Halton(d=lower.size, scramble=True, seed=seed)
    return lower + sampler.random(count) * (upper - lower)


def nelder_mead_maximize(
    objective,
    start: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    max_iter: int,
    tol: float,
):
    """One bounded Nelder-Mead ascent; returns (value, point, converged)."""
    start = np.clip(np.asarray(start, dtype=float), lower, upper)
    result = minimize(
        lambda v: -objective(v),
        start,
        method="Nelder-Mead",
        bounds=Bounds(lower, upper),
        options={
            "maxiter": max_iter,
            "maxfev": 2 * max_iter,
            "xatol": tol,
            "fatol": tol,
            "adaptive": start.size >= 6,
        },
    )
    return -float(result.fun), np.asarray(result.x, dtype=float), bool(result.success)


def multistart_maximize(objective, starts, lower, upper, opts: OptimizerOptions):
    """Run Nelder-Mead from every start and keep the best outcome.

    Ties are broken by the lowest start index, so the result does not
    depend on evaluation order.  Returns (value, point, converged, runs).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    best_value = -np.inf
    best_point = None
    best_ok = False
    runs = 0
    for start in starts:
        value, point, ok = nelder_mead_maximize(
            objective, start, lower, upper, opts.max_iter, opts.tol
        )
        runs += 1
        if value > best_value:
            best_value, best_point, best_ok = value, point, ok
    return best_value, best_point, best_ok, runs


def bisect_onset(
    func,
    lo: float,
    hi: float,
    threshold: float,
    tol: float = 1e-4,
    max_steps: int = 60,
):
    """Bisection for the parameter where func crosses the threshold.

    Requires func(lo) and func(hi) to lie on opposite sides; returns the
    midpoint of the final bracket, or None when there is no sign change.
    """
    f_lo = func(lo) - threshold
    f_hi = func(hi) - threshold
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        return None
    for _ in range(max_steps):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = func(mid) - threshold
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
