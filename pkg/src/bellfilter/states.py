"""Two-qubit density matrices, Pauli correlation data, and local rotations.

The Pauli frame used throughout the package is

    sigma1 = [[-1, 0], [0, 1]],   sigma2 = [[0, 1], [1, 0]],
    sigma3 = [[0, i], [-i, 0]],   sigma0 = identity,

which is (-sigma_z, sigma_x, -sigma_y) in the conventional ordering.  The
triple is right handed (sigma1 sigma2 = i sigma3 and cyclically), so every
SU(2) <-> SO(3) double-cover identity holds exactly as in the standard
frame.  The ordering puts the diagonal Pauli first so that diagonal filter
operators diag(x, 1) are aligned with the sigma1 axis, which keeps the
filtering algebra sparse (see filtering.py).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositive, OutOfRange, TraceNotOne

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
ROTATION_TOL = 1e-12
# Slack above |entry| = 1 that absorbs accumulated rounding in traces.
CORRELATION_ENTRY_TOL = 1e-9

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA3 = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
PAULIS = (SIGMA0, SIGMA1, SIGMA2, SIGMA3)

SINGLET_KET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
SINGLET = np.outer(SINGLET_KET, SINGLET_KET.conj())

_I4 = np.eye(4, dtype=complex)

# sigma_a (x) sigma_b for all index pairs, used to read correlation data off
# a density matrix and to rebuild states from it.
PAULI_PRODUCTS = np.array(
    [[np.kron(sa, sb) for sb in PAULIS] for sa in PAULIS]
)


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """Validated 4x4 two-qubit density matrix.

    Construction checks Hermiticity, unit trace, and positive
    semidefiniteness; use :func:`make_density` for array-like input.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (4, 4):
            raise OutOfRange(f"density matrix must be 4x4, got shape {entries.shape}")
        herm = np.max(np.abs(entries - entries.conj().T))
        if herm > HERMITICITY_TOL:
            raise NotHermitian(
                f"matrix deviates from Hermiticity by {herm:.3e} (tolerance {HERMITICITY_TOL:.0e})"
            )
        trace_err = abs(entries.trace() - 1.0)
        if trace_err > TRACE_TOL:
            raise TraceNotOne(
                f"trace differs from 1 by {trace_err:.3e} (tolerance {TRACE_TOL:.0e})"
            )
        min_eig = float(np.linalg.eigvalsh(entries)[0])
        if min_eig < -PSD_TOL:
            raise NotPositive(
                f"minimal eigenvalue {min_eig:.3e} below tolerance -{PSD_TOL:.0e}"
            )
        object.__setattr__(self, "entries", _frozen(entries))


def make_density(entries) -> DensityMatrix:
    """Validate a 4x4 complex array and wrap it as a DensityMatrix."""
    return DensityMatrix(np.asarray(entries, dtype=complex))


def werner(p: float) -> DensityMatrix:
    """Singlet-noise mixture p |psi-><psi-| + (1 - p) I/4."""
    if not -1.0 / 3.0 <= p <= 1.0:
        raise OutOfRange(f"werner parameter p={p} outside positivity window [-1/3, 1]")
    return make_density(p * SINGLET + (1.0 - p) / 4.0 * _I4)


def rho1(p: float, r: float) -> DensityMatrix:
    """State family (I + r sigma1 x I - p sum_k sigma_k x sigma_k) / 4.

    Combines isotropic singlet-type correlations of strength p with a
    one-sided marginal of strength r.  Parameters outside the positivity
    region raise NotPositive (for r = 0.3 that region is
    -0.3104 <= p <= 0.7).
    """
    entries = _I4 + r * np.kron(SIGMA1, SIGMA0)
    for k in (1, 2, 3):
        entries = entries - p * PAULI_PRODUCTS[k, k]
    return make_density(entries / 4.0)


def rho2(p: float) -> DensityMatrix:
    """State family (I + p sigma1 x I + p sum_k sigma_k x sigma_k) / 4.

    Physical for -0.5 <= p <= (sqrt(5) - 1)/4 ~ 0.3090; NotPositive outside.
    """
    entries = _I4 + p * np.kron(SIGMA1, SIGMA0)
    for k in (1, 2, 3):
        entries = entries + p * PAULI_PRODUCTS[k, k]
    return make_density(entries / 4.0)


@dataclass(frozen=True)
class ExtendedCorrelation:
    """4x4 real matrix [[1, r], [s, T]] of Pauli expectation values.

    Row 0 tail holds the B-side Bloch vector r, column 0 tail the A-side
    Bloch vector s, and the lower-right 3x3 block the correlation matrix T.
    """

    ttilde: np.ndarray

    def __post_init__(self) -> None:
        tt = np.asarray(self.ttilde, dtype=float)
        if tt.shape != (4, 4):
            raise OutOfRange(f"extended correlation must be 4x4, got {tt.shape}")
        if tt[0, 0] != 1.0:
            raise OutOfRange(f"corner entry must be exactly 1, got {tt[0, 0]!r}")
        worst = float(np.max(np.abs(tt)))
        if worst > 1.0 + CORRELATION_ENTRY_TOL:
            raise OutOfRange(f"correlation entry magnitude {worst:.12g} exceeds 1")
        object.__setattr__(self, "ttilde", _frozen(tt))

    @property
    def r(self) -> np.ndarray:
        """B-side Bloch vector, r_i = <sigma0 x sigma_i>."""
        return self.ttilde[0, 1:]

    @property
    def s(self) -> np.ndarray:
        """A-side Bloch vector, s_j = <sigma_j x sigma0>."""
        return self.ttilde[1:, 0]

    @property
    def T(self) -> np.ndarray:
        """3x3 correlation block, T_kl = <sigma_k x sigma_l>."""
        return self.ttilde[1:, 1:]


def correlation_data(rho: DensityMatrix) -> ExtendedCorrelation:
    """Extract all 16 Pauli expectation values tr[rho sigma_a x sigma_b]."""
    raw = np.einsum("abij,ji->ab", PAULI_PRODUCTS, rho.entries)
    residue = float(np.max(np.abs(raw.imag)))
    if residue > 1e-12:
        raise FloatingPointError(
            f"imaginary residue {residue:.3e} in correlation traces exceeds 1e-12"
        )
    tt = raw.real.copy()
    tt[0, 0] = 1.0  # trace is 1 within TRACE_TOL; pin the corner exactly
    return ExtendedCorrelation(tt)


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Minimal eigenvalue of the partial transpose over subsystem B.

    A negative value witnesses entanglement; for two qubits the criterion
    is both necessary and sufficient.
    """
    blocks = rho.entries.reshape(2, 2, 2, 2)
    transposed = blocks.transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh(transposed)[0])


def _rotation_about_3(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rotation_about_2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_zyz_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Bare 3x3 rotation R3(alpha) R2(beta) R3(gamma), no validation."""
    return _rotation_about_3(alpha) @ _rotation_about_2(beta) @ _rotation_about_3(gamma)


@dataclass(frozen=True)
class Rotation3:
    """Proper rotation of coordinate axes (1, 2, 3) with its Euler origin."""

    matrix: np.ndarray
    euler: tuple[float, float, float]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise OutOfRange(f"rotation matrix must be 3x3, got {m.shape}")
        ortho = np.max(np.abs(m.T @ m - np.eye(3)))
        if ortho > ROTATION_TOL:
            raise OutOfRange(f"matrix not orthogonal, R^T R deviates by {ortho:.3e}")
        det = float(np.linalg.det(m))
        if abs(det - 1.0) > ROTATION_TOL:
            raise OutOfRange(f"determinant {det!r} is not +1")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "euler", tuple(float(a) for a in self.euler))


def euler_to_rotation(alpha: float, beta: float, gamma: float) -> Rotation3:
    """ZYZ-composed rotation about axes 3, 2, 3 by (alpha, beta, gamma).

    The box [0, 2pi) x [0, pi] x [0, 2pi) covers all of SO(3); arbitrary
    real angles are accepted and still produce a proper rotation.
    """
    return Rotation3(euler_zyz_matrix(alpha, beta, gamma), (alpha, beta, gamma))


def rotate_extended(tt_matrix: np.ndarray, oa: np.ndarray, ob: np.ndarray) -> np.ndarray:
    """Raw block product diag(1, oa) @ ttilde @ diag(1, ob)^T."""
    out = np.empty((4, 4))
    out[0, 0] = 1.0
    out[0, 1:] = ob @ tt_matrix[0, 1:]
    out[1:, 0] = oa @ tt_matrix[1:, 0]
    out[1:, 1:] = oa @ tt_matrix[1:, 1:] @ ob.T
    return out


def local_unitary_rotate(
    tt: ExtendedCorrelation, oa: Rotation3, ob: Rotation3
) -> ExtendedCorrelation:
    """Correlation data of the state after local basis rotations.

    Applies the block-embedded rotations diag(1, O_A) and diag(1, O_B) to
    the extended correlation matrix; the unit corner is preserved and the
    singular values of the T block are invariant.
    """
    return ExtendedCorrelation(rotate_extended(tt.ttilde, oa.matrix, ob.matrix))


def _su2_about_axis(axis: int, theta: float) -> np.ndarray:
    return np.cos(0.5 * theta) * SIGMA0 + 1j * np.sin(0.5 * theta) * PAULIS[axis]


def su2_from_euler(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """SU(2) element realizing euler_to_rotation(alpha, beta, gamma).

    Returns U with U sigma_k U^dag = sum_m O_km sigma_m, where O is the
    ZYZ rotation for the same angles.  Conjugating a qubit operator by U
    therefore rotates its Pauli coefficient vector by O.
    """
    return (
        _su2_about_axis(3, gamma)
        @ _su2_about_axis(2, beta)
        @ _su2_about_axis(3, alpha)
    )


def density_to_json(rho: DensityMatrix) -> dict:
    """Row-major {"re": ..., "im": ...} form of the density matrix."""
    return {
        "re": rho.entries.real.tolist(),
        "im": rho.entries.imag.tolist(),
    }


def density_from_json(obj: dict) -> DensityMatrix:
    """Build and validate a state from its {"re", "im"} JSON form."""
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise OutOfRange('state JSON must be an object with "re" and "im" keys')
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise OutOfRange(
            f'state JSON parts must be 4x4, got re {re.shape} and im {im.shape}'
        )
    return make_density(re + 1j * im)


def load_density(path) -> DensityMatrix:
    """Load a density matrix from a JSON state file."""
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    return density_from_json(obj)
