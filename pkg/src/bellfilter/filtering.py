"""Local filtering (SLOCC) maps and the filtered CHSH maximal violation.

A local filter acts as rho -> (F_A x F_B) rho (F_A x F_B)^dag / N with
positive operators F = U diag(x, 1) U^dag.  Working in the Pauli frame of
states.py, the filtered correlation matrix never has to be formed from the
filtered state directly: with W the locally rotated extended correlation
matrix, X = C W D^T for the 3x4 coefficient matrices C, D below, and the
normalization is the contraction of W's top-left 2x2 block with
(x_plus, x_minus) and (y_plus, y_minus), where x_pm = (1 +- x^2)/2.  The
maximal CHSH expectation of the filtered state is then
2 sqrt(tau1' + tau2') for the top eigenvalues of X^T X / N^2.

apply_filter_density is the brute-force counterpart used to certify the
closed form: it filters the 4x4 state directly and the correlation data of
its output must reproduce X / N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, VanishingNorm
from .optimize import (
    OptimizerOptions,
    low_discrepancy_starts,
    multistart_maximize,
)
from .states import (
    DensityMatrix,
    ExtendedCorrelation,
    correlation_data,
    euler_zyz_matrix,
    make_density,
    su2_from_euler,
)

NORM_FLOOR = 1e-9
# Optimizer search box for the filter strengths.  Strengths above 1 are
# equivalent to in-box points (x -> 1/x is absorbed by a rotation), and
# the lower edge keeps the normalization numerically meaningful.
STRENGTH_FLOOR = 1e-3
STRENGTH_CEIL = 1.0

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FilterParams:
    """Filter strengths (x, y) plus the ZYZ Euler triples of the local
    rotations that orient the filtering frame on each side."""

    x: float
    y: float
    euler_a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    euler_b: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.x > 0.0:
            raise OutOfRange(f"filter strength x={self.x} must be positive")
        if not self.y > 0.0:
            raise OutOfRange(f"filter strength y={self.y} must be positive")
        object.__setattr__(self, "euler_a", tuple(float(a) for a in self.euler_a))
        object.__setattr__(self, "euler_b", tuple(float(a) for a in self.euler_b))

    @classmethod
    def identity(cls) -> "FilterParams":
        return cls(1.0, 1.0)


@dataclass(frozen=True)
class FilteredCorrelation:
    """Unnormalized filtered correlation matrix X and normalization N."""

    X: np.ndarray
    norm: float


@dataclass(frozen=True)
class FilterResult:
    """Best filtered CHSH value found, with the parameters achieving it."""

    value: float
    params: FilterParams
    restarts_used: int
    converged: bool


def filter_coefficients(x: float) -> np.ndarray:
    """3x4 matrix expanding the conjugated Paulis diag(x,1) sigma_k diag(x,1)
    over (sigma0, sigma1, sigma2, sigma3); rows are the k = 1, 2, 3 parts."""
    if x < 0.0:
        raise OutOfRange(f"filter strength {x} must be nonnegative")
    xx = x * x
    return np.array(
        [
            [0.5 * (1.0 - xx), 0.5 * (1.0 + xx), 0.0, 0.0],
            [0.0, 0.0, x, 0.0],
            [0.0, 0.0, 0.0, x],
        ]
    )


def _x_and_norm(
    tt_matrix: np.ndarray, x: float, y: float, oa: np.ndarray, ob: np.ndarray
):
    """Closed-form (X, N) for strengths (x, y) and rotation matrices."""
    w = np.empty((4, 4))
    w[0, 0] = 1.0
    w[0, 1:] = ob @ tt_matrix[0, 1:]
    w[1:, 0] = oa @ tt_matrix[1:, 0]
    w[1:, 1:] = oa @ tt_matrix[1:, 1:] @ ob.T
    x_matrix = filter_coefficients(x) @ w @ filter_coefficients(y).T
    cx = np.array([0.5 * (1.0 + x * x), 0.5 * (1.0 - x * x)])
    dy = np.array([0.5 * (1.0 + y * y), 0.5 * (1.0 - y * y)])
    norm = float(cx @ w[:2, :2] @ dy)
    return x_matrix, norm


def filtered_correlation(tt: ExtendedCorrelation, fp: FilterParams) -> FilteredCorrelation:
    """Closed-form filtered correlation data for the given parameters.

    At x = y = 1 with identity rotations this reduces to X = T, N = 1.
    Raises VanishingNorm when the filter annihilates the state's support.
    """
    oa = euler_zyz_matrix(*fp.euler_a)
    ob = euler_zyz_matrix(*fp.euler_b)
    x_matrix, norm = _x_and_norm(tt.ttilde, fp.x, fp.y, oa, ob)
    if norm < NORM_FLOOR:
        raise VanishingNorm(f"normalization {norm:.3e} below floor {NORM_FLOOR:.0e}")
    x_matrix.setflags(write=False)
    return FilteredCorrelation(X=x_matrix, norm=norm)


def filter_operators(fp: FilterParams):
    """Positive 2x2 filter pair (F_A, F_B) realizing the parameters.

    F = U diag(strength, 1) U^dag with U the SU(2) element whose induced
    Pauli-frame rotation matches the stored Euler angles, so that the
    closed-form (X, N) of filtered_correlation describe exactly the state
    apply_filter_density produces from these operators.
    """
    ua = su2_from_euler(*fp.euler_a)
    ub = su2_from_euler(*fp.euler_b)
    fa = ua @ np.diag([fp.x, 1.0]).astype(complex) @ ua.conj().T
    fb = ub @ np.diag([fp.y, 1.0]).astype(complex) @ ub.conj().T
    return fa, fb


def apply_filter_density(rho: DensityMatrix, fa, fb) -> DensityMatrix:
    """Brute-force filter map (F_A x F_B) rho (F_A x F_B)^dag / N."""
    fa = np.asarray(fa, dtype=complex)
    fb = np.asarray(fb, dtype=complex)
    for name, f in (("fa", fa), ("fb", fb)):
        if f.shape != (2, 2):
            raise OutOfRange(f"{name} must be 2x2, got {f.shape}")
        herm = np.max(np.abs(f - f.conj().T))
        min_eig = float(np.linalg.eigvalsh(0.5 * (f + f.conj().T))[0])
        if herm > 1e-10 or min_eig < -1e-10:
            raise OutOfRange(
                f"{name} must be positive semidefinite "
                f"(hermiticity defect {herm:.3e}, min eigenvalue {min_eig:.3e})"
            )
    kraus = np.kron(fa, fb)
    unnormalized = kraus @ rho.entries @ kraus.conj().T
    norm = float(unnormalized.trace().real)
    if norm < NORM_FLOOR:
        raise VanishingNorm(f"normalization {norm:.3e} below floor {NORM_FLOOR:.0e}")
    # Symmetrize away rounding dust before revalidation.
    out = unnormalized / norm
    return make_density(0.5 * (out + out.conj().T))


def _objective_from_xn(x_matrix: np.ndarray, norm: float) -> float:
    singular = np.linalg.svd(x_matrix, compute_uv=False)
    return 2.0 * math.sqrt(singular[0] ** 2 + singular[1] ** 2) / norm


def filtered_mvci_objective(tt: ExtendedCorrelation, fp: FilterParams) -> float:
    """Maximal CHSH expectation of the filtered state, 2 sqrt(t1' + t2')
    for the top eigenvalues of X^T X / N^2."""
    fc = filtered_correlation(tt, fp)
    return _objective_from_xn(fc.X, fc.norm)


def _params_to_vector(fp: FilterParams) -> np.ndarray:
    return np.array([fp.x, fp.y, *fp.euler_a, *fp.euler_b])


def _wrap_euler(alpha: float, beta: float, gamma: float):
    """Fold an arbitrary ZYZ triple into [0, 2pi) x [0, pi] x [0, 2pi)."""
    beta = beta % _TWO_PI
    if beta > math.pi:
        beta = _TWO_PI - beta
        alpha += math.pi
        gamma -= math.pi
    return (alpha % _TWO_PI, beta, gamma % _TWO_PI)


def _vector_to_params(v: np.ndarray) -> FilterParams:
    return FilterParams(
        x=float(v[0]),
        y=float(v[1]),
        euler_a=_wrap_euler(*v[2:5]),
        euler_b=_wrap_euler(*v[5:8]),
    )


def maximize_filtered_mvci(
    rho: DensityMatrix,
    opts: OptimizerOptions | None = None,
    warm_start: FilterParams | None = None,
) -> FilterResult:
    """Maximize the filtered CHSH value over strengths and rotations.

    Multi-start Nelder-Mead over the 8-dimensional box: strengths in
    [STRENGTH_FLOOR, 1] (larger strengths are equivalent in-box points)
    and three Euler angles per side, unconstrained in the simplex and
    folded back into the canonical box for reporting.  The identity
    filter is always among the starts, so the result never falls below
    the unfiltered value.  Deterministic for a fixed opts.seed.
    """
    opts = opts or OptimizerOptions()
    tt = correlation_data(rho).ttilde

    def objective(v: np.ndarray) -> float:
        oa = euler_zyz_matrix(v[2], v[3], v[4])
        ob = euler_zyz_matrix(v[5], v[6], v[7])
        x_matrix, norm = _x_and_norm(tt, v[0], v[1], oa, ob)
        if norm < NORM_FLOOR:
            return -np.inf
        return _objective_from_xn(x_matrix, norm)

    lower = np.array([STRENGTH_FLOOR, STRENGTH_FLOOR, -np.inf, -np.inf, -np.inf, -np.inf, -np.inf, -np.inf])
    upper = np.array([STRENGTH_CEIL, STRENGTH_CEIL, np.inf, np.inf, np.inf, np.inf, np.inf, np.inf])

    starts = [_params_to_vector(FilterParams.identity())]
    if warm_start is not None:
        starts.append(_params_to_vector(warm_start))
    remaining = max(opts.restarts - len(starts), 0)
    box_lo = np.array([STRENGTH_FLOOR, STRENGTH_FLOOR, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    box_hi = np.array(
        [STRENGTH_CEIL, STRENGTH_CEIL, _TWO_PI, math.pi, _TWO_PI, _TWO_PI, math.pi, _TWO_PI]
    )
    starts.extend(low_discrepancy_starts(box_lo, box_hi, remaining, opts.seed))

    value, point, converged, runs = multistart_maximize(
        objective, starts, lower, upper, opts
    )
    return FilterResult(
        value=value,
        params=_vector_to_params(point),
        restarts_used=runs,
        converged=converged,
    )
