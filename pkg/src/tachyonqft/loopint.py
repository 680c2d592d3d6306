"""One-loop scalar self-energy with a (possibly tachyonic) internal line.

The finite part of the bubble is

    I(p^2) = int_0^1 dx log(Delta(x) - i eps),
    Delta(x) = -x(1-x) p^2 + (1-x) m0^2 + x m1^2,

evaluated three ways: a closed form through the roots ``x_+-`` of
``Delta``, direct adaptive quadrature, and (for the imaginary part only) the
measure of the set where ``Delta < 0``.  ``m0sq < 0`` is a tachyon in the
loop.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

__all__ = [
    "NonConvergenceError",
    "SelfEnergyParams",
    "ComplexResult",
    "ZeroRegion",
    "log_minus_i0",
    "feynman_delta",
    "roots_xpm",
    "I_closed",
    "I_quadrature",
    "im_measure",
    "threshold_analysis",
    "amplitude",
    "figure2_dataset",
    "FIGURE2_COLUMNS",
]

EULER_GAMMA = 0.57721566490153286061
FIGURE2_COLUMNS = ("p2", "reI", "imI", "reI_err", "imI_err", "method_agreement")


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SelfEnergyParams:
    """Inputs of the bubble.

    ``p2`` uses the (+,-,-,-) metric; ``kappa`` stands for the product of the
    two couplings at the vertices.  ``eps_ir`` is the finite width used for
    the ``-i eps`` prescription; flipping its sign gives the other sheet.
    """

    p2: float
    m0sq: float
    m1sq: float = 1.0
    kappa: float = 1.0
    mu: float = 1.0
    eps_ir: float = 1e-15

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("scale mu must be positive")
        if self.eps_ir == 0:
            raise ValueError("eps_ir must be non-zero")


@dataclass(frozen=True)
class ComplexResult:
    value: complex
    error_estimate: float
    method: str
    endpoint_flag: bool = False

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class ZeroRegion:
    """``Im I = 0`` exactly for ``p2 < upper``; ``upper is None`` means nowhere."""

    upper: float | None

    @property
    def empty(self) -> bool:
        return self.upper is None

    def __contains__(self, p2: float) -> bool:
        return self.upper is not None and p2 < self.upper


def log_minus_i0(a: float) -> complex:
    """``log(a - i0)``: the real log for ``a > 0``, ``log|a| - i pi`` for ``a < 0``."""
    if a == 0:
        raise ValueError("log(0 - i0) is singular")
    if a > 0:
        return complex(math.log(a), 0.0)
    return complex(math.log(-a), -math.pi)


def feynman_delta(x, params: SelfEnergyParams):
    x = np.asarray(x, dtype=float)
    p = params
    out = -x * (1.0 - x) * p.p2 + (1.0 - x) * p.m0sq + x * p.m1sq
    return float(out) if out.ndim == 0 else out


def _coefficients(params):
    # Delta(x) - i eps = a x^2 + b x + c
    p = params
    return p.p2, -(p.p2 + p.m0sq - p.m1sq), complex(p.m0sq, -p.eps_ir)


def roots_xpm(params: SelfEnergyParams) -> tuple[complex, complex]:
    """The two roots of ``Delta(x) - i eps``, labelled to match
    ``x_+- = (B +- sqrt(B^2 - 4 (m0sq - i eps)/p2)) / 2`` with ``B = 1 + (m0sq - m1sq)/p2``.

    Computed with the cancellation-free form of the quadratic formula.
    """
    a, b, c = _coefficients(params)
    if a == 0:
        raise ValueError("p2 = 0: Delta is linear and the closed form does not apply")
    disc = cmath.sqrt(b * b - 4 * a * c)
    q = -0.5 * (b + disc) if abs(b + disc) >= abs(b - disc) else -0.5 * (b - disc)
    r1 = q / a
    r2 = c / q if q != 0 else complex(-b / (2 * a))
    big_b = 1.0 + (params.m0sq - params.m1sq) / params.p2
    plus = 0.5 * (big_b + cmath.sqrt(big_b * big_b - 4 * c / params.p2))
    if abs(r1 - plus) <= abs(r2 - plus):
        return r1, r2
    return r2, r1


def _xlogx(z: complex) -> complex:
    return 0j if abs(z) < 1e-300 else z * cmath.log(z)


def _root_term(x: complex) -> complex:
    """``(1-x) log(1-x) + x log(-x)`` without cancellation at large ``|x|``."""
    if abs(x) < 8.0:
        return _xlogx(1.0 - x) - _xlogx(-x)
    # = log(1-x) - x log(1 - 1/x); 1-x and -x share a half-plane so the logs combine
    inv = 1.0 / x
    tail, pw = 0j, 1.0 + 0j
    for n in range(1, 40):
        tail += pw / n
        pw *= inv
        if abs(pw) < 1e-18:
            break
    return cmath.log(1.0 - x) + tail


def I_closed(params: SelfEnergyParams) -> ComplexResult:
    """``log(p2 - i0) + sum_+- [(1-x)log(1-x) + x log(-x)] - 2`` with principal logs.

    With a finite ``eps`` the roots sit on opposite sides of the real axis
    and the principal branches reproduce the ``-i eps`` prescription.
    """
    p = params
    if p.p2 == 0:
        raise ValueError("closed form needs p2 != 0; use I_quadrature")
    xp, xm = roots_xpm(p)
    lead = log_minus_i0(p.p2)
    if p.eps_ir < 0:
        lead = lead.conjugate()  # the +i eps sheet
    terms = [lead, _root_term(xp), _root_term(xm), -2.0]
    val = sum(terms)
    err = 64 * np.finfo(float).eps * sum(abs(t) for t in terms)
    # a root at 0 or 1 is handled by the x log x -> 0 limit; flag it
    flag = any(abs(x - e) < 1e-12 for x in (xp, xm) for e in (0.0, 1.0))
    return ComplexResult(complex(val), float(err), "closed_form", flag)


def _breakpoints(params):
    a, b, c = params.p2, -(params.p2 + params.m0sq - params.m1sq), params.m0sq
    pts = []
    if a != 0:
        # resolve the eps-wide gap between a nearly real root pair
        for x in roots_xpm(params):
            w = abs(x.imag)
            pts += [x.real + s * f * w for s in (-1, 1) for f in (0, 1, 8, 64)]
    if a == 0:
        if b != 0:
            pts.append(-c / b)
    else:
        disc = b * b - 4 * a * c
        if disc >= 0:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b)) if b != 0 else -0.5 * sq
            pts += [q / a] + ([c / q] if q != 0 else [])
        # vertex: where Delta comes closest to zero when the roots are complex
        pts.append(-b / (2 * a))
    return sorted({float(x) for x in pts if 0.0 < x < 1.0})


def I_quadrature(params: SelfEnergyParams) -> ComplexResult:
    """Adaptive quadrature of ``int_0^1 log(Delta(x) - i eps) dx``, split at the zeros of Delta."""
    p = params
    a, b, c = _coefficients(p)
    f = lambda x: complex(np.log(complex(a * x * x + b * x + c)))
    edges = [0.0, *_breakpoints(p), 1.0]
    re = im = 0.0
    err = 0.0
    opts = dict(epsabs=1e-13, epsrel=1e-11, limit=400)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        with warnings.catch_warnings():
            # judged below from the returned error estimate
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            # smoothstep map: the Jacobian vanishes at both ends and tames log(x - root)
            g = lambda u: f(lo + (hi - lo) * u * u * (3 - 2 * u)) * 6 * u * (1 - u) * (hi - lo)
            vr, er = integrate.quad(lambda u: g(u).real, 0.0, 1.0, **opts)
            vi, ei = integrate.quad(lambda u: g(u).imag, 0.0, 1.0, **opts)
        re += vr
        im += vi
        err += er + ei
    if not math.isfinite(err) or err > 1e-8 * max(1.0, abs(complex(re, im))):
        raise NonConvergenceError(f"quadrature error estimate {err!r} too large for {p}")
    return ComplexResult(complex(re, im), float(err), "quadrature")


def im_measure(params: SelfEnergyParams) -> float:
    """``-pi`` times the length of ``{x in [0,1] : Delta(x) < 0}``, from the exact roots."""
    a, b, c = params.p2, -(params.p2 + params.m0sq - params.m1sq), params.m0sq
    if a == 0:
        d0, d1 = c, c + b  # Delta(0), Delta(1)
        if d0 < 0 and d1 < 0:
            length = 1.0
        elif d0 >= 0 and d1 >= 0:
            length = 0.0
        else:
            z = -c / b
            length = z if d0 < 0 else 1.0 - z
        return -math.pi * length
    disc = b * b - 4 * a * c
    if disc <= 0:
        inside = 0.0
        lo = hi = None
    else:
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b)) if b != 0 else -0.5 * sq
        lo, hi = sorted((q / a, c / q))
        inside = max(0.0, min(hi, 1.0) - max(lo, 0.0))
    # upward parabola is negative between the roots, downward one outside them
    length = inside if a > 0 else 1.0 - inside
    return -math.pi * length


def threshold_analysis(m0sq: float, m1sq: float) -> ZeroRegion:
    """Where ``Im I`` vanishes identically as a function of ``p2``.

    With ``m0sq >= 0`` that is below the two-particle threshold
    ``(sqrt(m0sq) + sqrt(m1sq))^2``.  With ``m0sq < 0`` ``Delta(0) < 0``, so
    some interval near ``x = 0`` always contributes and the region is empty.
    """
    if not m1sq > 0:
        raise ValueError("m1sq must be positive")
    if m0sq < 0:
        return ZeroRegion(None)
    return ZeroRegion((math.sqrt(m0sq) + math.sqrt(m1sq)) ** 2)


def amplitude(params: SelfEnergyParams, d_eps: float) -> complex:
    """``M`` from ``-iM = i kappa^2/(16 pi^2) [UV - I]``, ``UV = 1/d_eps - gamma_E + ln(4 pi mu^2)``.

    The pole is kept, not subtracted.  At ``p2 = 0`` quadrature supplies ``I``.
    """
    if not d_eps > 0:
        raise ValueError("d_eps must be positive")
    p = params
    uv = 1.0 / d_eps - EULER_GAMMA + math.log(4 * math.pi * p.mu**2)
    i_val = I_closed(p).value if p.p2 != 0 else I_quadrature(p).value
    return p.kappa**2 / (16 * math.pi**2) * (i_val - uv)


def figure2_dataset(m0sq: float, m1sq: float, p2_grid, eps_ir: float = 1e-15,
                    rtol: float = 1e-8, atol: float = 1e-10) -> list[dict]:
    """Rows of ``FIGURE2_COLUMNS`` with both evaluation paths compared at each point.

    The closed form is the value of record except at ``p2 = 0``; a mismatch
    beyond ``max(rtol |I|, atol)`` raises.
    """
    rows = []
    for p2 in p2_grid:
        p2 = float(p2)
        params = SelfEnergyParams(p2, m0sq, m1sq, eps_ir=eps_ir)
        quad = I_quadrature(params)
        rec = I_closed(params) if p2 != 0 else quad
        diff = rec.value - quad.value
        tol = max(rtol * abs(rec.value), atol)
        if abs(diff) > tol:
            raise NonConvergenceError(f"closed form and quadrature disagree at p2={p2!r}: {abs(diff)!r}")
        rows.append({
            "p2": p2,
            "reI": rec.value.real,
            "imI": rec.value.imag,
            "reI_err": max(abs(diff.real), quad.error_estimate),
            "imI_err": max(abs(diff.imag), quad.error_estimate),
            "method_agreement": True,
        })
    return rows


def with_eps(params: SelfEnergyParams, eps: float) -> SelfEnergyParams:
    return replace(params, eps_ir=eps)
