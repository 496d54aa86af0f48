"""Monte-Carlo local-hidden-variable model for the rho2 state family.

For q = -p in (0, 1/2] the state rho2(p) splits into a singlet of weight q
and a separable remainder whose A-side marginal is tilted along the sigma1
axis.  The protocol simulated here: with probability q the parties share a
unit vector lambda drawn with density |a . lambda| / (2 pi) and output
a = -sgn(a . lambda), b = sgn(b . lambda); with probability 1 - q Alice
outputs +-1 with probability (1 -+ kappa a_m)/2 where kappa = q/(1 - q)
and a_m is the component of her direction along the marginal axis, while
Bob outputs a fair coin.  The resulting joint distribution matches the
quantum statistics of rho2 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange
from .states import PAULIS, SIGMA0, rho2

UNIT_TOL = 1e-10


def _check_unit(name: str, vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (3,):
        raise OutOfRange(f"{name} must be a 3-vector, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > UNIT_TOL:
        raise OutOfRange(f"{name} must be a unit vector, |{name}| = {norm:.12g}")
    return vec


@dataclass(frozen=True)
class LhvModel:
    """Mixing weight q in (0, 1/2] and the marginal axis of the target state."""

    q: float
    marginal_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not 0.0 < self.q <= 0.5:
            raise OutOfRange(f"mixing weight q={self.q} must lie in (0, 1/2]")
        axis = _check_unit("marginal_axis", self.marginal_axis)
        object.__setattr__(self, "marginal_axis", tuple(float(v) for v in axis))

    @property
    def state(self):
        """The two-qubit state the model reproduces (marginal axis sigma1)."""
        return rho2(-self.q)


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the four outcome pairs (a, b) with a, b = +-1."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self) -> None:
        vec = self.as_vector()
        if np.any(vec < -1e-12) or np.any(vec > 1.0 + 1e-12):
            raise OutOfRange(f"probabilities {vec} outside [0, 1]")
        total = float(vec.sum())
        if abs(total - 1.0) > 1e-12:
            raise OutOfRange(f"probabilities sum to {total!r}, not 1")

    def as_vector(self) -> np.ndarray:
        """Order (+,+), (+,-), (-,+), (-,-)."""
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm])

    def correlator(self) -> float:
        return self.p_pp - self.p_pm - self.p_mp + self.p_mm

    def marginal_a(self) -> float:
        return self.p_pp + self.p_pm - self.p_mp - self.p_mm

    def marginal_b(self) -> float:
        return self.p_pp - self.p_pm + self.p_mp - self.p_mm


def quantum_joint(
    q: float,
    avec,
    bvec,
    marginal_axis=(1.0, 0.0, 0.0),
) -> JointDistribution:
    """Exact outcome distribution for projective measurements on rho2(-q).

    p(a, b) = (1 - q a b <a, b>) / 4 - a <a, m> q / 4 with m the marginal
    axis; agrees with the direct projector trace on the state.
    """
    if not 0.0 < q <= 0.5:
        raise OutOfRange(f"mixing weight q={q} must lie in (0, 1/2]")
    avec = _check_unit("avec", avec)
    bvec = _check_unit("bvec", bvec)
    axis = _check_unit("marginal_axis", marginal_axis)
    dot = float(avec @ bvec)
    a_m = float(avec @ axis)
    probs = {}
    for a in (1, -1):
        for b in (1, -1):
            probs[(a, b)] = (1.0 - q * a * b * dot) / 4.0 - a * a_m * q / 4.0
    return JointDistribution(
        p_pp=probs[(1, 1)], p_pm=probs[(1, -1)], p_mp=probs[(-1, 1)], p_mm=probs[(-1, -1)]
    )


def joint_from_state(rho, avec, bvec) -> JointDistribution:
    """Projector-trace oracle tr[(Pi_a x Pi_b) rho] for +-1 outcomes."""
    avec = _check_unit("avec", avec)
    bvec = _check_unit("bvec", bvec)
    spin_a = sum(avec[k] * PAULIS[k + 1] for k in range(3))
    spin_b = sum(bvec[k] * PAULIS[k + 1] for k in range(3))
    values = {}
    for a in (1, -1):
        for b in (1, -1):
            proj = np.kron((SIGMA0 + a * spin_a) / 2.0, (SIGMA0 + b * spin_b) / 2.0)
            values[(a, b)] = float(np.trace(rho.entries @ proj).real)
    return JointDistribution(
        p_pp=values[(1, 1)], p_pm=values[(1, -1)],
        p_mp=values[(-1, 1)], p_mm=values[(-1, -1)],
    )


def _orthonormal_frame(axis: np.ndarray):
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(axis)))] = 1.0
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def sample_biased_lambda(avec, rng: np.random.Generator, size: int | None = None):
    """Unit vectors with density |a . lambda| / (2 pi) on the sphere.

    Inverse transform about the axis: cos(theta) = s sqrt(u) with u
    uniform and s a fair sign, azimuth uniform.  Draw order is u, then s,
    then the azimuth, so streams are reproducible.
    """
    avec = _check_unit("avec", avec)
    n = 1 if size is None else int(size)
    u = rng.random(n)
    sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    cos_theta = sign * np.sqrt(u)
    phi = 2.0 * np.pi * rng.random(n)
    sin_theta = np.sqrt(np.maximum(1.0 - cos_theta**2, 0.0))
    e1, e2 = _orthonormal_frame(avec)
    out = (
        sin_theta[:, None] * (np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2)
        + cos_theta[:, None] * avec
    )
    return out[0] if size is None else out


def simulate_lhv(
    model: LhvModel, avec, bvec, n: int, seed
) -> JointDistribution:
    """Empirical outcome frequencies of the model over n trials.

    Deterministic for a fixed seed: the branch coins are drawn first,
    then the shared-vector branch inputs, then the independent-branch
    coins for Alice and Bob.
    """
    if n < 1:
        raise OutOfRange(f"trial count n={n} must be at least 1")
    avec = _check_unit("avec", avec)
    bvec = _check_unit("bvec", bvec)
    axis = np.asarray(model.marginal_axis)
    q = model.q
    rng = np.random.default_rng(seed)

    shared = rng.random(n) < q
    m = int(shared.sum())
    k = n - m

    counts = np.zeros((2, 2), dtype=np.int64)  # index 0 -> outcome +1
    if m:
        lam = sample_biased_lambda(avec, rng, size=m)
        a_out = np.where(lam @ avec >= 0.0, -1, 1)
        b_out = np.where(lam @ bvec >= 0.0, 1, -1)
        np.add.at(counts, ((1 - a_out) // 2, (1 - b_out) // 2), 1)
    if k:
        kappa = q / (1.0 - q)
        a_m = float(avec @ axis)
        p_a_plus = (1.0 - kappa * a_m) / 2.0
        a_out = np.where(rng.random(k) < p_a_plus, 1, -1)
        b_out = np.where(rng.random(k) < 0.5, 1, -1)
        np.add.at(counts, ((1 - a_out) // 2, (1 - b_out) // 2), 1)

    freq = counts / n
    return JointDistribution(
        p_pp=freq[0, 0], p_pm=freq[0, 1], p_mp=freq[1, 0], p_mm=freq[1, 1]
    )


def lhv_report(model: LhvModel, pairs, n: int, seed: int) -> float:
    """Maximum entrywise deviation of the simulation from the exact
    distribution across all direction pairs.

    Pair i runs on the derived seed [seed, i], so a fixed (pairs, n, seed)
    triple always reproduces the same number.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pairs must be a nonempty list of direction pairs")
    worst = 0.0
    for index, (avec, bvec) in enumerate(pairs):
        empirical = simulate_lhv(model, avec, bvec, n, seed=[seed, index])
        exact = quantum_joint(model.q, avec, bvec, model.marginal_axis)
        deviation = float(np.max(np.abs(empirical.as_vector() - exact.as_vector())))
        worst = max(worst, deviation)
    return worst


def lhv_sigma_check(model: LhvModel, pairs, n: int, seed: int, n_sigma: float = 4.0):
    """Entrywise z-test of the simulation against the exact distribution.

    Returns (max_deviation, passed) where passed means every entry lies
    within n_sigma binomial standard deviations of its exact value.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pairs must be a nonempty list of direction pairs")
    worst = 0.0
    passed = True
    for index, (avec, bvec) in enumerate(pairs):
        empirical = simulate_lhv(model, avec, bvec, n, seed=[seed, index])
        exact = quantum_joint(model.q, avec, bvec, model.marginal_axis).as_vector()
        deviation = np.abs(empirical.as_vector() - exact)
        worst = max(worst, float(deviation.max()))
        sigma = np.sqrt(exact * (1.0 - exact) / n)
        if np.any(deviation > n_sigma * sigma + 1e-15):
            passed = False
    return worst, passed
