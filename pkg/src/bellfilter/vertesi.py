"""Sphere-cap integral lower bound on the maximal Vertesi-inequality violation.

With X the (possibly filtered) correlation matrix and N its normalization,
the bound over a pair of polar bands Omega_a^b, Omega_c^d is

    ( |<m_ab, X m_cd>| / (s_ab s_cd)
      + (1 / (2 s_cd^2)) int int_{cd x cd} |X (u - v)| dmu dmu
      + (1 / (2 s_ab^2)) int int_{ab x ab} |X^T (u - v)| dmu dmu ) / N,

where s is the band area and m its first moment.  The first term collapses
to closed-form moments by bilinearity; the double integrals are evaluated
by a tensor Gauss-Legendre x trapezoid rule.  Any state admitting a local
hidden variable model keeps the maximized bound at or below 1.

The violation measure itself is invariant under local unitaries, but the
band family is pinned to the polar axis, so different local-unitary
representatives of the same state give different (all valid) bounds.
vertesi_lower_bound therefore evaluates the best axis-aligned
representative: the raw X plus the three placements of its singular
values on the polar axis.  Row-sign flips from the alignment do not
matter because every term is even in the rows of X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial.distance import cdist

from .errors import BadWindow, VanishingNorm
from .filtering import (
    NORM_FLOOR,
    STRENGTH_CEIL,
    STRENGTH_FLOOR,
    FilterParams,
    _wrap_euler,
    _x_and_norm,
    maximize_filtered_mvci,
)
from .optimize import (
    OptimizerOptions,
    low_discrepancy_starts,
    nelder_mead_maximize,
)
from .states import DensityMatrix, ExtendedCorrelation, correlation_data, euler_zyz_matrix

LHV_CEILING = 1.0
HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi
# Narrowest band the window optimizer may propose; keeps the 1/s factors
# finite without excluding any competitive window.
MIN_BAND_WIDTH = 1e-3


def _check_band(a: float, b: float) -> None:
    if not (0.0 <= a <= b <= HALF_PI + 1e-12):
        raise BadWindow(f"band bounds ({a}, {b}) must satisfy 0 <= a <= b <= pi/2")


@dataclass(frozen=True)
class CapWindow:
    """Polar-angle bounds of the two integration bands, all in radians."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        for lo, hi, names in ((self.a, self.b, "(a, b)"), (self.c, self.d, "(c, d)")):
            if not (0.0 <= lo < hi <= HALF_PI + 1e-12):
                raise BadWindow(
                    f"window {names} = ({lo}, {hi}) must satisfy 0 <= lo < hi <= pi/2"
                )


@dataclass(frozen=True)
class VertesiResult:
    """Achieved lower bound with the window and filter that produced it."""

    bound: float
    window: CapWindow
    filter_params: FilterParams | None
    violating: bool


def cap_area(a: float, b: float) -> float:
    """Surface area 2 pi (cos a - cos b) of the polar band."""
    _check_band(a, b)
    return _TWO_PI * (math.cos(a) - math.cos(b))


def cap_first_moment(a: float, b: float) -> np.ndarray:
    """First moment of the band; only the polar component survives."""
    _check_band(a, b)
    return np.array([0.0, 0.0, math.pi * (math.cos(a) ** 2 - math.cos(b) ** 2)])


@lru_cache(maxsize=None)
def _leggauss(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def _azimuth(n: int):
    phi = _TWO_PI * np.arange(n) / n
    sin_phi = np.sin(phi)
    cos_phi = np.cos(phi)
    sin_phi.setflags(write=False)
    cos_phi.setflags(write=False)
    return sin_phi, cos_phi


@dataclass(frozen=True)
class Quadrature:
    """Tensor rule: Gauss-Legendre in the polar angle (surface weight
    folded in) times the trapezoid rule in the periodic azimuth."""

    n_polar: int = 24
    n_azimuth: int = 24

    def band_nodes(self, a: float, b: float):
        """Quadrature points (m, 3) and weights (m,) for a polar band.

        Weights sum to the band area; the parameterization is
        (sin p1 sin p2, sin p1 cos p2, cos p1).
        """
        _check_band(a, b)
        ref, ref_w = _leggauss(self.n_polar)
        phi1 = 0.5 * (a + b) + 0.5 * (b - a) * ref
        w1 = 0.5 * (b - a) * ref_w * np.sin(phi1)
        sin2, cos2 = _azimuth(self.n_azimuth)
        sin1 = np.sin(phi1)
        points = np.empty((self.n_polar, self.n_azimuth, 3))
        points[:, :, 0] = np.outer(sin1, sin2)
        points[:, :, 1] = np.outer(sin1, cos2)
        points[:, :, 2] = np.cos(phi1)[:, None]
        weights = np.repeat(w1 * (_TWO_PI / self.n_azimuth), self.n_azimuth)
        return points.reshape(-1, 3), weights


def _pair_integral(points: np.ndarray, weights: np.ndarray, matrix: np.ndarray) -> float:
    """Weighted double sum of |matrix (u - v)| over a band with itself."""
    mapped = points @ matrix.T
    return float(weights @ cdist(mapped, mapped) @ weights)


def _as_real_matrix(X) -> np.ndarray:
    X = np.asarray(X)
    if np.iscomplexobj(X):
        residue = float(np.max(np.abs(X.imag)))
        if residue > 1e-12:
            raise FloatingPointError(
                f"correlation matrix has imaginary residue {residue:.3e}"
            )
        X = X.real
    return np.asarray(X, dtype=float)


def vertesi_terms(X, window: CapWindow, quad: Quadrature | None = None):
    """The three window terms (moment term, cd pair term, ab pair term)."""
    X = _as_real_matrix(X)
    quad = quad or Quadrature()
    s_ab = cap_area(window.a, window.b)
    s_cd = cap_area(window.c, window.d)
    m_ab = cap_first_moment(window.a, window.b)
    m_cd = cap_first_moment(window.c, window.d)
    term1 = abs(m_ab @ X @ m_cd) / (s_ab * s_cd)
    pts_cd, w_cd = quad.band_nodes(window.c, window.d)
    term2 = _pair_integral(pts_cd, w_cd, X) / (2.0 * s_cd**2)
    pts_ab, w_ab = quad.band_nodes(window.a, window.b)
    term3 = _pair_integral(pts_ab, w_ab, X.T) / (2.0 * s_ab**2)
    return term1, term2, term3


def aligned_representatives(X) -> list[np.ndarray]:
    """Axis-aligned stand-ins for X with the same violation bound status.

    Returns X itself plus diagonal matrices carrying its singular values
    in each of the three polar-axis placements (azimuthal order is
    irrelevant by the rotational symmetry of the bands).  Every entry of
    the list is the correlation matrix of a local-unitary image of the
    same state up to row signs, which no term is sensitive to.
    """
    X = _as_real_matrix(X)
    singular = np.linalg.svd(X, compute_uv=False)
    if singular[0] - singular[2] < 1e-13 and np.max(
        np.abs(X - np.diag(np.diag(X)))
    ) < 1e-13:
        return [X]
    placements = [
        np.diag([singular[1], singular[2], singular[0]]),
        np.diag([singular[0], singular[2], singular[1]]),
        np.diag([singular[0], singular[1], singular[2]]),
    ]
    return [X] + placements


def _bound_over_candidates(
    candidates, window: CapWindow, quad: Quadrature, norm: float
) -> float:
    s_ab = cap_area(window.a, window.b)
    s_cd = cap_area(window.c, window.d)
    m_ab = cap_first_moment(window.a, window.b)
    m_cd = cap_first_moment(window.c, window.d)
    pts_cd, w_cd = quad.band_nodes(window.c, window.d)
    same_band = window.a == window.c and window.b == window.d
    if same_band:
        pts_ab, w_ab = pts_cd, w_cd
    else:
        pts_ab, w_ab = quad.band_nodes(window.a, window.b)
    best = -np.inf
    for m in candidates:
        t1 = abs(m_ab @ m @ m_cd) / (s_ab * s_cd)
        t2 = _pair_integral(pts_cd, w_cd, m) / (2.0 * s_cd**2)
        t3 = _pair_integral(pts_ab, w_ab, m.T) / (2.0 * s_ab**2)
        best = max(best, (t1 + t2 + t3) / norm)
    return best


def vertesi_lower_bound(
    tt: ExtendedCorrelation,
    fp: FilterParams | None,
    window: CapWindow,
    quad: Quadrature | None = None,
) -> VertesiResult:
    """Lower bound (term1 + term2 + term3) / N at a fixed window.

    Without filter parameters X is the raw correlation block and N = 1.
    The value is the best over the axis-aligned representatives of X (see
    aligned_representatives); for rotationally symmetric correlation
    matrices this coincides with the plain evaluation.
    """
    quad = quad or Quadrature()
    if fp is None:
        x_matrix, norm = tt.T, 1.0
    else:
        oa = euler_zyz_matrix(*fp.euler_a)
        ob = euler_zyz_matrix(*fp.euler_b)
        x_matrix, norm = _x_and_norm(tt.ttilde, fp.x, fp.y, oa, ob)
        if norm < NORM_FLOOR:
            raise VanishingNorm(f"normalization {norm:.3e} below floor {NORM_FLOOR:.0e}")
    bound = _bound_over_candidates(
        aligned_representatives(x_matrix), window, quad, norm
    )
    return VertesiResult(
        bound=bound, window=window, filter_params=fp, violating=bound > LHV_CEILING
    )


# ---------------------------------------------------------------------------
# Window / filter optimization


def _clamp_window(raw: np.ndarray) -> CapWindow:
    a = min(max(float(raw[0]), 0.0), HALF_PI - MIN_BAND_WIDTH)
    b = min(max(float(raw[1]), a + MIN_BAND_WIDTH), HALF_PI)
    c = min(max(float(raw[2]), 0.0), HALF_PI - MIN_BAND_WIDTH)
    d = min(max(float(raw[3]), c + MIN_BAND_WIDTH), HALF_PI)
    return CapWindow(a, b, c, d)


def _grid_bands(levels: int = 8):
    edges = (np.arange(levels) + 0.5) * HALF_PI / levels
    return [(float(lo), float(hi)) for i, lo in enumerate(edges) for hi in edges[i + 1 :]]


def _band_score_tables(candidates, bands, quad: Quadrature) -> np.ndarray:
    """score[i, j] = best bound numerator for ab-band i and cd-band j.

    term2 depends only on the (c, d) band and term3 only on (a, b), so a
    full window grid factorizes into two band sweeps plus the closed-form
    moment table.
    """
    moments = np.array([cap_first_moment(lo, hi) for lo, hi in bands])
    areas = np.array([cap_area(lo, hi) for lo, hi in bands])
    node_cache = [quad.band_nodes(lo, hi) for lo, hi in bands]
    best = None
    for m in candidates:
        pair_x = np.empty(len(bands))
        pair_xt = np.empty(len(bands))
        for i, (pts, w) in enumerate(node_cache):
            pair_x[i] = _pair_integral(pts, w, m) / (2.0 * areas[i] ** 2)
            pair_xt[i] = _pair_integral(pts, w, m.T) / (2.0 * areas[i] ** 2)
        cross = np.abs(moments @ m @ moments.T) / np.outer(areas, areas)
        score = cross + pair_xt[:, None] + pair_x[None, :]
        best = score if best is None else np.maximum(best, score)
    return best


def _window_vector(window: CapWindow) -> np.ndarray:
    return np.array([window.a, window.b, window.c, window.d])


def maximize_vertesi_bound(
    rho: DensityMatrix,
    with_filter: bool,
    opts: OptimizerOptions | None = None,
    quad: Quadrature | None = None,
    *,
    window: CapWindow | None = None,
    strengths: tuple[float, float] | None = None,
    warm_start: VertesiResult | None = None,
) -> VertesiResult:
    """Maximize the bound over the window and, optionally, the filter.

    Free coordinates are the window bounds (unless pinned with `window`),
    and in filtered mode the strengths (unless pinned with `strengths`)
    plus the six filter Euler angles.  Window candidates come from a
    coarse band grid scored at a cheap quadrature; the best few are
    refined jointly with Nelder-Mead and the winners re-evaluated on the
    requested (finer) rule.  Deterministic for fixed options.
    """
    opts = opts or OptimizerOptions()
    quad_fine = quad or Quadrature()
    quad_seed = Quadrature(12, 12)
    tt = correlation_data(rho)
    tt_matrix = tt.ttilde

    free_window = window is None
    free_strengths = with_filter and strengths is None
    n_window = 4 if free_window else 0
    n_strength = 2 if free_strengths else 0
    n_angles = 6 if with_filter else 0

    def split(v: np.ndarray):
        win = _clamp_window(v[:4]) if free_window else window
        pos = n_window
        if with_filter:
            if free_strengths:
                x, y = float(v[pos]), float(v[pos + 1])
                pos += 2
            else:
                x, y = strengths
            angles = v[pos : pos + 6]
            return win, (x, y, angles)
        return win, None

    def candidates_and_norm(filt):
        if filt is None:
            return aligned_representatives(tt.T), 1.0
        x, y, angles = filt
        oa = euler_zyz_matrix(angles[0], angles[1], angles[2])
        ob = euler_zyz_matrix(angles[3], angles[4], angles[5])
        x_matrix, norm = _x_and_norm(tt_matrix, x, y, oa, ob)
        if norm < NORM_FLOOR:
            return None, None
        return aligned_representatives(x_matrix), norm

    def evaluate(v: np.ndarray, rule: Quadrature) -> float:
        win, filt = split(v)
        cands, norm = candidates_and_norm(filt)
        if cands is None:
            return -np.inf
        return _bound_over_candidates(cands, win, rule, norm)

    # --- Collect candidate filter settings (identity, CHSH optimum, warm
    # start, low-discrepancy fill) and seed windows per candidate.
    filter_candidates: list[np.ndarray] = []
    if with_filter:
        if free_strengths:
            filter_candidates.append(np.array([1.0, 1.0, 0, 0, 0, 0, 0, 0], dtype=float))
            light = OptimizerOptions(
                restarts=min(6, opts.restarts), max_iter=min(600, opts.max_iter),
                tol=max(opts.tol, 1e-9), seed=opts.seed,
            )
            chsh_best = maximize_filtered_mvci(rho, light).params
            filter_candidates.append(
                np.array([chsh_best.x, chsh_best.y, *chsh_best.euler_a, *chsh_best.euler_b])
            )
        else:
            filter_candidates.append(np.zeros(6))
        if warm_start is not None and warm_start.filter_params is not None:
            wf = warm_start.filter_params
            vec = np.array([*wf.euler_a, *wf.euler_b], dtype=float)
            if free_strengths:
                vec = np.concatenate([[min(wf.x, STRENGTH_CEIL), min(wf.y, STRENGTH_CEIL)], vec])
            filter_candidates.append(vec)
        lo = ([STRENGTH_FLOOR, STRENGTH_FLOOR] if free_strengths else []) + [0.0] * 6
        hi = ([STRENGTH_CEIL, STRENGTH_CEIL] if free_strengths else []) + [
            _TWO_PI, math.pi, _TWO_PI, _TWO_PI, math.pi, _TWO_PI,
        ]
        filter_candidates.extend(
            low_discrepancy_starts(np.array(lo), np.array(hi), 4, opts.seed + 1)
        )
    else:
        filter_candidates.append(np.empty(0))

    bands = _grid_bands()
    seeds: list[tuple[float, np.ndarray]] = []
    for cand in filter_candidates:
        if with_filter:
            if free_strengths:
                filt = (float(cand[0]), float(cand[1]), cand[2:])
            else:
                filt = (strengths[0], strengths[1], cand)
        else:
            filt = None
        cands, norm = candidates_and_norm(filt)
        if cands is None:
            continue
        if free_window:
            score = _band_score_tables(cands, bands, quad_seed) / norm
            order = np.argsort(score, axis=None)[::-1][:5]
            for flat in order:
                i, j = np.unravel_index(flat, score.shape)
                vec = np.concatenate([[*bands[i], *bands[j]], cand])
                seeds.append((float(score[i, j]), vec))
        else:
            vec = np.asarray(cand, dtype=float)
            value = evaluate(vec, quad_seed)
            if np.isfinite(value):
                seeds.append((float(value), vec))
    if warm_start is not None and free_window:
        wvec = _window_vector(warm_start.window)
        if with_filter and warm_start.filter_params is not None:
            wf = warm_start.filter_params
            tail = np.array([*wf.euler_a, *wf.euler_b], dtype=float)
            if free_strengths:
                tail = np.concatenate(
                    [[min(wf.x, STRENGTH_CEIL), min(wf.y, STRENGTH_CEIL)], tail]
                )
            wvec = np.concatenate([wvec, tail])
        value = evaluate(wvec, quad_seed)
        if np.isfinite(value):
            seeds.append((float(value) + 1e-6, wvec))

    seeds.sort(key=lambda item: -item[0])
    top = [vec for _, vec in seeds[:6]]

    dim = n_window + n_strength + n_angles
    lower = np.full(dim, -np.inf)
    upper = np.full(dim, np.inf)
    if free_window:
        lower[:4] = 0.0
        upper[:4] = HALF_PI
    if free_strengths:
        lower[4:6] = STRENGTH_FLOOR
        upper[4:6] = STRENGTH_CEIL

    refined: list[tuple[float, np.ndarray]] = []
    for vec in top:
        value, point, _ = nelder_mead_maximize(
            lambda v: evaluate(v, quad_seed), vec, lower, upper,
            min(opts.max_iter, 1500), opts.tol,
        )
        refined.append((value, point))
    refined.sort(key=lambda item: -item[0])

    best_value, best_point = -np.inf, None
    for _, point in refined[:2]:
        value, polished, _ = nelder_mead_maximize(
            lambda v: evaluate(v, quad_fine), point, lower, upper,
            min(opts.max_iter, 500), opts.tol,
        )
        if value > best_value:
            best_value, best_point = value, polished

    if best_point is None:
        raise VanishingNorm("no feasible filter parameters found")

    win, filt = split(best_point)
    if filt is None:
        fp = None
    else:
        x, y, angles = filt
        fp = FilterParams(
            x=x, y=y,
            euler_a=_wrap_euler(*angles[:3]),
            euler_b=_wrap_euler(*angles[3:]),
        )
    return VertesiResult(
        bound=float(best_value),
        window=win,
        filter_params=fp,
        violating=best_value > LHV_CEILING,
    )
