"""C-number commutator functions of the free tachyon field and its twin-space variants.

Conventions: mode functions ``u_k(x) = exp(-i omega t + i k.x)``, measure
``d^3k / ((2 pi)^3 2 omega)``, ``[a_p, a_q^dag] = (2 pi)^3 2 omega delta^3(p - q)``.
Under these,

    C(dt, r) = [phi(x), phi(y)] = -2i int_{|k|>m} d^3k/((2 pi)^3 2 omega) sin(omega dt - k.dx)

and after the angular integral only a radial integral is left.  The radial
integrals are conditionally convergent, so they are evaluated with a damping
factor ``exp(-eta k)`` and Richardson-extrapolated to ``eta -> 0``.

A twin-space field ``Phi = (phi (x) 1 + 1 (x) phi*) / 2`` has commutator
``(C + C_dual) / 2``.  The dual-space piece is evaluated as its own mode sum
(with the dual CCR sign and the chosen placement of ``u`` and ``u*``) and on
a different quadrature variable, so the Phi_1 cancellation is a genuine
two-path check rather than a subtraction of a number from itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

__all__ = [
    "NonConvergenceError",
    "CommutatorKernel",
    "SpacetimeSeparation",
    "CommutatorResult",
    "ProbeResult",
    "SmearedCCR",
    "phi1_commutator",
    "phi2_commutator",
    "commutator",
    "equal_time_derivative_commutator",
    "equal_time_smooth_part_closed",
    "equal_time_smooth_part_quadrature",
    "boost_invariance_probe",
    "smeared_ccr",
    "gaussian_overlap",
    "pauli_jordan_closed",
    "commutator_records",
]

VARIANTS = ("phi1", "phi2", "subluminal")
SUPPORTS = ("above", "below", "all")


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class CommutatorKernel:
    """What to integrate: mass, field variant, which modes, and the starting damping.

    ``eta`` is the largest damping used in the extrapolation; ``None`` picks
    it from the distance of the separation to the light cone.
    """

    m: float
    variant: str = "phi2"
    mode_support: str = "above"
    eta: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.mode_support not in SUPPORTS:
            raise ValueError(f"mode_support must be one of {SUPPORTS}")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("damping eta must be positive")
        if self.variant != "subluminal" and self.mode_support == "all":
            raise ValueError("tachyon modes with |k| < m have imaginary energy; use 'above'")

    @property
    def tachyonic(self) -> bool:
        return self.variant != "subluminal"


@dataclass(frozen=True)
class SpacetimeSeparation:
    dt: float
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r = |x - y| must be non-negative")

    @property
    def interval(self) -> float:
        return self.dt**2 - self.r**2

    def boosted(self, rapidity: float) -> "SpacetimeSeparation":
        """Separation seen from a frame boosted along ``x - y``."""
        ch, sh = math.cosh(rapidity), math.sinh(rapidity)
        return SpacetimeSeparation(ch * self.dt - sh * self.r, abs(ch * self.r - sh * self.dt))


@dataclass(frozen=True)
class CommutatorResult:
    value: complex
    error: float
    converged: bool = True
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    def __complex__(self):
        return complex(self.value)

    def __abs__(self):
        return abs(self.value)


@dataclass(frozen=True)
class ProbeResult:
    value_original: complex
    value_boosted: complex
    difference: float
    tolerance: float

    @property
    def significant(self) -> bool:
        return self.difference > self.tolerance


@dataclass(frozen=True)
class SmearedCCR:
    value: complex
    overlap: float
    error: float


# ---------------------------------------------------------------------------
# mode sums
#
# A field component  A(x) = int (alpha_k(x) b_k + beta_k(x) b_k^dag)  with
# [b_k, b_l^dag] = s (2pi)^3 2 omega delta  has commutator density
# s (alpha(x) beta(y) - beta(x) alpha(y)).  alpha = exp(-i sigma (omega t - k.x)),
# beta = conj(alpha).  (s, sigma):
#   direct space                (+1, +1)
#   dual space, star_1 (u, u*)  (-1, +1)
#   dual space, star_2 (u*, u)  (-1, -1)

_DIRECT = (1, 1)
_DUAL = {"phi1": (-1, 1), "phi2": (-1, -1)}

_GX, _GW = leggauss(20)


def _omega(k, m, tachyonic):
    if tachyonic:
        return np.sqrt(np.maximum(k * k - m * m, 0.0))
    return np.sqrt(k * k + m * m)


def _sin_over(omega, dt):
    """``sin(omega dt) / omega`` with the omega -> 0 limit."""
    safe = np.where(omega > 0, omega, 1.0)
    return np.where(omega > 0, np.sin(omega * dt) / safe, dt)


def _commutator_density(k, omega, dt, r, s, sigma, derivative):
    """Radial integrand in ``k`` (measure included) of one component's commutator.

    ``derivative`` gives ``[A(0,x), d/dt_y A(0,y)]`` instead of ``[A(x), A(y)]``.
    """
    sinc = np.sinc(k * r / math.pi)
    if derivative:
        # s (i sigma omega)(P + Q) at dt = 0, with P = Q = 1
        return s * sigma * 1j * k * k * sinc / (2 * math.pi**2)
    # s (P - Q) = -2i s sigma sin(omega dt)
    return s * sigma * (-2j) * _sin_over(omega, dt) * k * k * sinc / (4 * math.pi**2)


def _panel_sum(fn, lo, hi, width):
    n = max(1, math.ceil((hi - lo) / width))
    edges = np.linspace(lo, hi, n + 1)
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (b - a) * _GX + 0.5 * (a + b)
    w = 0.5 * (b - a) * _GW
    return complex(np.sum(w * fn(x)))


def _damped(dt, r, m, tachyonic, support, s, sigma, derivative, eta, variable):
    """``int exp(-eta k) density`` over the mode support, in ``k`` or in ``omega``."""
    span = 42.0 / eta
    width = min(0.5, math.pi / (2.0 * (r + abs(dt) + 1.0)))

    if support == "below":
        if not derivative:
            raise ValueError("|k| < m tachyon modes have no real energy; only the equal-time derivative is defined")
        return _panel_sum(lambda k: _commutator_density(k, None, 0.0, r, s, sigma, True), 0.0, m, width)

    if variable == "k" or not tachyonic:
        lo = m if tachyonic else 0.0

        def fk(k):
            om = _omega(k, m, tachyonic)
            return np.exp(-eta * k) * _commutator_density(k, om, dt, r, s, sigma, derivative)
        return _panel_sum(fk, lo, lo + span, width)

    # tachyon in the omega variable: k = sqrt(omega^2 + m^2), dk = (omega / k) d omega
    def fw(om):
        k = np.sqrt(om * om + m * m)
        return np.exp(-eta * k) * _commutator_density(k, om, dt, r, s, sigma, derivative) * om / k
    return _panel_sum(fw, 0.0, span, width)


def _richardson(fn, eta0, levels):
    table = [[fn(eta0 / 2**j)] for j in range(levels)]
    for j in range(1, levels):
        for p in range(1, j + 1):
            table[j].append(table[j][p - 1] + (table[j][p - 1] - table[j - 1][p - 1]) / (2**p - 1))
    best = table[-1][-1]
    err = abs(best - table[-2][-2])
    floor = 1e-13 * max(abs(v[0]) for v in table)
    return best, err + floor, [row[-1] for row in table]


def _light_cone_gap(dt, r):
    return min(abs(r - abs(dt)), r + abs(dt))


def _extrapolated(dt, r, kernel, s, sigma, derivative, variable, levels=7):
    if kernel.mode_support == "below":
        val = _damped(dt, r, kernel.m, kernel.tachyonic, "below", s, sigma, derivative, 1.0, variable)
        return val, 1e-13 * abs(val), {"finite_range": True}
    gap = _light_cone_gap(dt, r)
    if gap < 1e-9 * max(1.0, r):
        raise NonConvergenceError(
            "separation on the light cone: the commutator is singular there",
            {"dt": dt, "r": r},
        )
    eta0 = kernel.eta if kernel.eta is not None else min(0.5, 0.3 * gap)
    val, err, diag = _richardson(
        lambda eta: _damped(dt, r, kernel.m, kernel.tachyonic, kernel.mode_support,
                            s, sigma, derivative, eta, variable),
        eta0, levels,
    )
    return val, err, {"eta0": eta0, "levels": levels, "diagonal": diag}


def _evaluate(dt, r, kernel, derivative=False):
    if kernel.variant == "subluminal":
        val, err, diag = _extrapolated(dt, r, kernel, *_DIRECT, derivative, "k")
    else:
        v1, e1, d1 = _extrapolated(dt, r, kernel, *_DIRECT, derivative, "k")
        v2, e2, d2 = _extrapolated(dt, r, kernel, *_DUAL[kernel.variant], derivative, "omega")
        val, err = 0.5 * (v1 + v2), 0.5 * (e1 + e2)
        diag = {"direct": v1, "dual": v2, "direct_trace": d1, "dual_trace": d2}
    tol = max(1e-6 * abs(val), 1e-9)
    return CommutatorResult(complex(val), float(err), bool(err < tol), diag)


def commutator(sep: SpacetimeSeparation, kernel: CommutatorKernel) -> CommutatorResult:
    """``[Phi(x), Phi(y)]`` for the kernel's variant at separation ``sep``."""
    if sep.dt == 0.0:
        # every radial density carries sin(omega dt)
        return CommutatorResult(0j, 0.0, True, {"exact": "dt = 0"})
    return _evaluate(sep.dt, sep.r, kernel)


def phi1_commutator(sep: SpacetimeSeparation, kernel: CommutatorKernel | None = None, m: float = 1.0) -> CommutatorResult:
    """Twin field built with the transpose-like dual field: ``(C - C) / 2``.

    Both halves are separate extrapolated mode sums; the result is their residual.
    """
    kernel = kernel or CommutatorKernel(m, "phi1")
    if kernel.variant != "phi1":
        raise ValueError("phi1_commutator needs a phi1 kernel")
    return commutator(sep, kernel)


def phi2_commutator(sep: SpacetimeSeparation, kernel: CommutatorKernel | None = None, m: float = 1.0) -> CommutatorResult:
    """Twin field built with the adjoint-like dual field: equals ``C`` itself."""
    kernel = kernel or CommutatorKernel(m, "phi2")
    if kernel.variant != "phi2":
        raise ValueError("phi2_commutator needs a phi2 kernel")
    return commutator(sep, kernel)


def equal_time_derivative_commutator(r: float, kernel: CommutatorKernel) -> CommutatorResult:
    """``[Phi(0,x), d_t Phi(0,y)]`` at ``|x - y| = r > 0``, where the contact term is absent."""
    if not r > 0:
        raise ValueError("the pointwise derivative commutator needs r > 0; use smeared_ccr at r = 0")
    return _evaluate(0.0, r, kernel, derivative=True)


def equal_time_smooth_part_closed(r: float, m: float) -> float:
    """``(sin(mr) - mr cos(mr)) / (2 pi^2 r^3)``, the Fourier transform of the |k| < m ball."""
    if r < 0:
        raise ValueError("r must be non-negative")
    x = m * r
    if x < 1e-3:
        # sin x - x cos x = x^3/3 (1 - x^2/10 + x^4/280 - ...)
        return m**3 / (6 * math.pi**2) * (1 - x * x / 10 + x**4 / 280)
    return (math.sin(x) - x * math.cos(x)) / (2 * math.pi**2 * r**3)


def equal_time_smooth_part_quadrature(r: float, m: float) -> float:
    """Same function as a mode integral over ``|k| < m``: ``(1/(2 pi^2 r)) int_0^m k sin(kr) dk``."""
    if not r > 0:
        raise ValueError("r must be positive")
    if m == 0:
        return 0.0
    val, err = integrate.quad(lambda k: k, 0.0, m, weight="sin", wvar=r, epsabs=1e-15, epsrel=1e-13)
    if err > 1e-11 * max(abs(val), 1e-300) and err > 1e-16:
        raise NonConvergenceError("smooth-part quadrature did not converge", {"r": r, "m": m, "err": err})
    return val / (2 * math.pi**2 * r)


def boost_invariance_probe(sep: SpacetimeSeparation, boost_rapidity: float, kernel: CommutatorKernel) -> ProbeResult:
    if not sep.r > abs(sep.dt):
        raise ValueError("probe needs a spacelike separation")
    if kernel.variant == "subluminal":
        raise ValueError("probe is meant for the twin-space variants")
    a = commutator(sep, kernel) if kernel.variant == "phi2" else phi1_commutator(sep, kernel)
    moved = sep.boosted(boost_rapidity)
    b = commutator(moved, kernel) if kernel.variant == "phi2" else phi1_commutator(moved, kernel)
    return ProbeResult(a.value, b.value, abs(a.value - b.value), a.error + b.error + 1e-12)


# ---------------------------------------------------------------------------
# smeared equal-time CCR

def gaussian_overlap(sigma: float, d: float) -> float:
    """``int g(x) h(x) d^3x`` for unit-normalised Gaussians of width sigma, centres d apart."""
    return (4 * math.pi * sigma**2) ** -1.5 * math.exp(-(d**2) / (4 * sigma**2))


def _smeared_component(kernel, sigma, d, s, sig, variable):
    """One component of the smeared equal-time CCR: ``i s sig int k^2 sinc(kd) exp(-sigma^2 k^2) / (2 pi^2)``."""
    m = kernel.m
    opts = dict(epsabs=1e-15, epsrel=1e-12, limit=400)

    def radial(k):
        return k * k * np.sinc(k * d / math.pi) * math.exp(-((sigma * k) ** 2)) / (2 * math.pi**2)

    if kernel.tachyonic and variable == "omega":
        val, err = integrate.quad(lambda om: radial(math.hypot(om, m)) * om / math.hypot(om, m), 0.0, np.inf, **opts)
    else:
        lo = m if kernel.tachyonic else 0.0
        val, err = integrate.quad(radial, lo, np.inf, **opts)
    return 1j * s * sig * val, err


def smeared_ccr(kernel: CommutatorKernel, sigma: float = 0.5, d: float = 0.0) -> SmearedCCR:
    """Equal-time ``[Phi(g), d_t Phi(h)]`` for Gaussians ``g, h`` of width ``sigma``.

    A canonical field gives ``i * gaussian_overlap(sigma, d)``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if kernel.variant == "subluminal":
        val, err = _smeared_component(kernel, sigma, d, *_DIRECT, "k")
    else:
        v1, e1 = _smeared_component(kernel, sigma, d, *_DIRECT, "k")
        v2, e2 = _smeared_component(kernel, sigma, d, *_DUAL[kernel.variant], "omega")
        val, err = 0.5 * (v1 + v2), 0.5 * (e1 + e2)
    return SmearedCCR(complex(val), gaussian_overlap(sigma, d), float(err))


def pauli_jordan_closed(dt: float, r: float, m: float) -> complex:
    """Closed form of ``C`` for an ordinary scalar of mass ``m`` off the light cone.

    Inside the cone ``C = i sgn(dt) m J1(m tau) / (4 pi tau)``, ``tau = sqrt(dt^2 - r^2)``;
    outside it vanishes.
    """
    tau2 = dt * dt - r * r
    if tau2 <= 0:
        return 0j
    tau = math.sqrt(tau2)
    return 1j * math.copysign(1.0, dt) * m * special.j1(m * tau) / (4 * math.pi * tau)


def commutator_records(kernel: CommutatorKernel, points) -> list[dict]:
    """Rows ``(dt, r, re, im, error)`` for a list of ``(dt, r)`` points."""
    rows = []
    for dt, r in points:
        res = commutator(SpacetimeSeparation(dt, r), kernel) if kernel.variant != "phi1" \
            else phi1_commutator(SpacetimeSeparation(dt, r), kernel)
        rows.append({"dt": dt, "r": r, "re": res.value.real, "im": res.value.imag, "error": res.error})
    return rows
