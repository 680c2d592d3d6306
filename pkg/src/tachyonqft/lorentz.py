"""Four-vectors with the (+,-,-,-) metric and pure boosts acting on them.

The on-shell tachyon of mass parameter ``m`` has ``k.k = -m**2`` and energy
``sqrt(|k|**2 - m**2)``; its four-momentum is spacelike, so a subluminal boost
can flip the sign of its energy.  Everything here is a pure function of
immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "METRIC",
    "FourVector",
    "Boost",
    "ElasticKinematics",
    "InvarianceReport",
    "Pole",
    "minkowski_dot",
    "onshell_tachyon",
    "boost_apply",
    "verify_onshell_invariance",
    "offshell_counterexample",
    "find_sign_flipping_boost",
    "pole_scan",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def _vec3(v) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 components, got {arr.shape[0]}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class FourVector:
    e0: float
    evec: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "e0", float(self.e0))
        object.__setattr__(self, "evec", _vec3(self.evec))

    @classmethod
    def from_array(cls, a) -> "FourVector":
        a = np.asarray(a, dtype=float)
        return cls(a[0], a[1:4])

    def as_array(self) -> np.ndarray:
        return np.array([self.e0, *self.evec])

    @property
    def pnorm(self) -> float:
        """Length of the spatial part."""
        return float(np.linalg.norm(self.evec))

    @property
    def square(self) -> float:
        return minkowski_dot(self, self)

    def is_spacelike(self, tol: float = 0.0) -> bool:
        return self.square < -tol

    def is_timelike(self, tol: float = 0.0) -> bool:
        return self.square > tol


@dataclass(frozen=True)
class Boost:
    """Pure boost to a frame moving with velocity ``u`` (``|u| < 1``)."""

    u: tuple[float, float, float]

    def __post_init__(self):
        u = _vec3(self.u)
        speed = math.sqrt(sum(c * c for c in u))
        if not speed < 1.0:
            raise ValueError(f"boost speed must be < 1, got {speed!r}")
        object.__setattr__(self, "u", u)

    @classmethod
    def along(cls, direction, speed: float) -> "Boost":
        d = np.asarray(direction, dtype=float)
        return cls(speed * d / np.linalg.norm(d))

    @classmethod
    def from_rapidity(cls, direction, rapidity: float) -> "Boost":
        return cls.along(direction, math.tanh(rapidity))

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.u))

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.speed**2)

    def matrix(self) -> np.ndarray:
        u = np.asarray(self.u)
        u2 = float(u @ u)
        g = self.gamma
        lam = np.eye(4)
        lam[0, 0] = g
        lam[0, 1:] = -g * u
        lam[1:, 0] = -g * u
        if u2 > 0.0:
            lam[1:, 1:] += (g - 1.0) * np.outer(u, u) / u2
        return lam


@dataclass(frozen=True)
class ElasticKinematics:
    """Centre-of-mass kinematics of equal-mass elastic scattering psi psi -> psi psi."""

    p: float
    m_psi: float
    m_phi: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("CM momentum p must be positive")
        if self.m_psi < 0:
            raise ValueError("m_psi must be non-negative")
        if not self.m_phi > 0:
            raise ValueError("m_phi must be positive")

    @property
    def s(self) -> float:
        return 4.0 * (self.p**2 + self.m_psi**2)

    def t(self, cos_theta: float) -> float:
        return -2.0 * self.p**2 * (1.0 - cos_theta)

    def u(self, cos_theta: float) -> float:
        return -2.0 * self.p**2 * (1.0 + cos_theta)


@dataclass(frozen=True)
class InvarianceReport:
    k_prime_norm: float
    m: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class Pole:
    channel: str
    cos_theta: float


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    return a.e0 * b.e0 - (a.evec[0] * b.evec[0] + a.evec[1] * b.evec[1] + a.evec[2] * b.evec[2])


def onshell_tachyon(kvec, m: float) -> FourVector:
    """Positive-energy on-shell tachyon momentum; requires ``|kvec| > m``."""
    k = np.asarray(_vec3(kvec))
    kn = float(np.linalg.norm(k))
    if not kn > m:
        raise ValueError(f"|k| = {kn!r} is outside the tachyon mode support |k| > m = {m!r}")
    return FourVector(math.sqrt(kn * kn - m * m), k)


def boost_apply(b: Boost, k: FourVector) -> FourVector:
    return FourVector.from_array(b.matrix() @ k.as_array())


def verify_onshell_invariance(k: FourVector, b: Boost, tol: float = 1e-12) -> InvarianceReport:
    """Check that the boosted spatial momentum still lies in ``|k'| >= m``.

    ``m`` is read off the momentum itself, ``m = sqrt(-k.k)``.  A failing
    report is a finding about the kinematics, not an error.
    """
    sq = k.square
    if sq > tol:
        raise ValueError("momentum is timelike, not an on-shell tachyon")
    m = math.sqrt(max(-sq, 0.0))
    kp = boost_apply(b, k).pnorm
    margin = kp - m
    return InvarianceReport(kp, m, margin, margin >= -tol * max(1.0, m))


def offshell_counterexample(kvec, uhat, u: float) -> FourVector:
    """Boost the off-shell momentum ``(|k|/u, k)`` along ``k``; its spatial part vanishes."""
    if not 0.0 < u < 1.0:
        raise ValueError("speed u must lie in (0, 1)")
    k = np.asarray(_vec3(kvec))
    n = np.asarray(_vec3(uhat))
    kn = float(np.linalg.norm(k))
    nn = float(np.linalg.norm(n))
    if kn == 0.0 or nn == 0.0:
        raise ValueError("kvec and uhat must be non-zero")
    if np.linalg.norm(k / kn - n / nn) > 1e-12:
        raise ValueError("kvec must be parallel to uhat")
    return boost_apply(Boost(u * n / nn), FourVector(kn / u, k))


def find_sign_flipping_boost(k: FourVector) -> Boost:
    """Boost along ``k`` with speed halfway between ``1/v`` and 1, where ``v = |k|/e0``.

    Any speed in ``(1/v, 1)`` turns the energy negative; only spacelike
    momenta have ``v > 1``, so timelike and null ones are rejected.
    """
    if not k.e0 > 0:
        raise ValueError("energy must be positive")
    if not k.is_spacelike():
        raise ValueError("no subluminal boost flips the energy of a timelike or null momentum")
    v = k.pnorm / k.e0
    speed = 0.5 * (1.0 / v + 1.0)
    return Boost.along(k.evec, speed)


def pole_scan(kin: ElasticKinematics) -> list[Pole]:
    """Scattering angles at which ``t`` or ``u`` hits the tachyon pole ``-m_phi**2``.

    ``t = -2p^2 (1 - cos)`` and ``u = -2p^2 (1 + cos)``, so both poles exist
    iff ``4 p^2 >= m_phi^2``.
    """
    p2 = kin.p**2
    mphi2 = kin.m_phi**2
    if 4.0 * p2 < mphi2:
        return []
    c = 1.0 - mphi2 / (2.0 * p2)
    return [Pole("t", c), Pole("u", -c)]
