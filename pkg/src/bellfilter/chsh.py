"""Maximal CHSH violation of a two-qubit state and derived figures of merit.

The maximal violation over all CHSH operators is 2 sqrt(tau1 + tau2) with
tau1 >= tau2 the two largest eigenvalues of T^T T (Horodecki criterion),
where T is the 3x3 Pauli correlation matrix of the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCorrelation, OutOfRange
from .states import CORRELATION_ENTRY_TOL, DensityMatrix, PAULIS

CHSH_CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class ChshResult:
    """Maximal CHSH expectation together with the spectral data behind it."""

    value: float
    tau1: float
    tau2: float
    violating: bool


@dataclass(frozen=True)
class ChshSettings:
    """Bloch directions of the four observables achieving the maximum."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray


def _as_correlation_matrix(T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    if T.shape != (3, 3):
        raise OutOfRange(f"correlation matrix must be 3x3, got {T.shape}")
    worst = float(np.max(np.abs(T)))
    if worst > 1.0 + CORRELATION_ENTRY_TOL:
        raise OutOfRange(f"correlation entry magnitude {worst:.12g} exceeds 1")
    return T


def mvci(T) -> ChshResult:
    """Maximal violation of the CHSH inequality for correlation matrix T."""
    T = _as_correlation_matrix(T)
    singular = np.linalg.svd(T, compute_uv=False)
    tau1 = float(singular[0] ** 2)
    tau2 = float(singular[1] ** 2)
    value = 2.0 * math.sqrt(tau1 + tau2)
    return ChshResult(value=value, tau1=tau1, tau2=tau2, violating=value > CHSH_CLASSICAL_BOUND)


def optimal_chsh_settings(T) -> ChshSettings:
    """Measurement directions that attain the Horodecki maximum.

    Bob's directions mix the top two right singular vectors of T at the
    angle set by the singular-value ratio (the familiar +-pi/4 mixing in
    the degenerate case); Alice's are the corresponding left singular
    vectors, i.e. the normalized images under T.
    """
    T = _as_correlation_matrix(T)
    u, singular, vh = np.linalg.svd(T)
    s1, s2 = float(singular[0]), float(singular[1])
    if s1 ** 2 < 1e-12:
        raise DegenerateCorrelation(
            f"largest eigenvalue of T^T T is {s1 ** 2:.3e}; settings undefined"
        )
    chi = math.atan2(s2, s1)
    v1, v2 = vh[0], vh[1]
    b1 = math.cos(chi) * v1 + math.sin(chi) * v2
    b2 = math.cos(chi) * v1 - math.sin(chi) * v2
    return ChshSettings(a1=u[:, 0].copy(), a2=u[:, 1].copy(), b1=b1, b2=b2)


def _observable(direction: np.ndarray) -> np.ndarray:
    return sum(direction[k] * PAULIS[k + 1] for k in range(3))


def bell_operator(settings: ChshSettings) -> np.ndarray:
    """4x4 CHSH operator A1 x B1 + A1 x B2 + A2 x B1 - A2 x B2."""
    a1 = _observable(settings.a1)
    a2 = _observable(settings.a2)
    b1 = _observable(settings.b1)
    b2 = _observable(settings.b2)
    return np.kron(a1, b1) + np.kron(a1, b2) + np.kron(a2, b1) - np.kron(a2, b2)


def bell_expectation(rho: DensityMatrix, settings: ChshSettings) -> float:
    """Expectation value of the CHSH operator built from the settings."""
    value = np.trace(rho.entries @ bell_operator(settings))
    return float(value.real)


def teleportation_fidelity_bound(mvci_value: float) -> float:
    """Lower bound 1/2 + value/12 on the optimal teleportation fidelity.

    Equals the classical threshold 2/3 exactly at the local bound 2, so a
    CHSH-violating state is certified useful for teleportation.  Written
    out, the bound is (1/2)(1 + value/6).
    """
    if not 0.0 <= mvci_value <= TSIRELSON_BOUND + 1e-9:
        raise OutOfRange(
            f"CHSH value {mvci_value} outside [0, 2*sqrt(2)]"
        )
    return 0.5 + mvci_value / 12.0


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def holevo_bound(mvci_value: float) -> float:
    """Device-independent cap h((1 + sqrt((value/2)^2 - 1)) / 2) on the
    eavesdropper's Holevo information, with h the binary entropy.

    Defined for values between the local bound 2 (where it equals 1) and
    the Tsirelson bound (where it vanishes); monotone decreasing between.
    """
    if not CHSH_CLASSICAL_BOUND <= mvci_value <= TSIRELSON_BOUND + 1e-9:
        raise OutOfRange(
            f"CHSH value {mvci_value} outside [2, 2*sqrt(2)]"
        )
    disc = (mvci_value / 2.0) ** 2 - 1.0
    disc = min(max(disc, 0.0), 1.0)
    return _binary_entropy((1.0 + math.sqrt(disc)) / 2.0)
