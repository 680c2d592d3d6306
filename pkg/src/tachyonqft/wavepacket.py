"""Wave packets built from ``|k| > m`` tachyon modes and their large-``t`` behaviour.

The packet

    phi(t, x) = int_{|k|>m} d^3k / ((2 pi)^3 2 omega_k) f(k) exp(-i omega_k t + i k.x)

is evaluated by direct quadrature.  The bump profile is symmetric about the
axis through its centre ``k0``, so the azimuthal integral is done in closed
form (a Bessel ``J0``) and only a 2D integral remains, taken in polar
coordinates around the bump centre.  The same machinery handles an ordinary
``m**2 > 0`` scalar (``tachyonic=False``) as a reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special, stats

__all__ = [
    "NonConvergenceError",
    "WavePacketSpec",
    "StationaryPoint",
    "Estimate",
    "FitResult",
    "NormReport",
    "packet_field_numeric",
    "stationary_point",
    "stationary_phase_estimate",
    "onset_time",
    "trajectory_point",
    "decay_exponent_fit",
    "norm_analysis",
    "threshold_trace",
]


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class WavePacketSpec:
    """Momentum-space profile of a packet.

    ``family="bump"``: ``N exp(-1/(1 - s**2))`` with ``s = |k - k0| / w``,
    zero for ``s >= 1``.  ``family="power_tail"``: ``N (m/|k|)**beta`` on
    ``|k| > m``.
    """

    m: float
    family: str = "bump"
    k0: tuple[float, float, float] = (1.25, 0.0, 0.0)
    w: float = 0.1
    beta: float = 1.5
    normalization: float = 1.0
    tachyonic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "k0", tuple(float(c) for c in self.k0))
        if not self.m > 0:
            raise ValueError("mass parameter m must be positive")
        if self.family == "bump":
            if not self.w > 0:
                raise ValueError("bump width must be positive")
            if self.tachyonic and not self.k0_norm - self.w > self.m:
                raise ValueError("bump support must lie strictly inside |k| > m")
        elif self.family == "power_tail":
            if not self.beta > 0:
                raise ValueError("beta must be positive")
            if not self.tachyonic:
                raise ValueError("power_tail family is defined for tachyon modes only")
        else:
            raise ValueError(f"unknown profile family {self.family!r}")

    @property
    def k0_norm(self) -> float:
        return float(np.linalg.norm(self.k0))

    @property
    def axis(self) -> np.ndarray:
        return np.asarray(self.k0) / self.k0_norm

    def omega(self, k):
        k = np.asarray(k, dtype=float)
        if self.tachyonic:
            return np.sqrt(k * k - self.m**2)
        return np.sqrt(k * k + self.m**2)

    def profile_radial(self, s):
        """Bump profile as a function of ``s = |k - k0| / w``."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = s < 1.0
        out[inside] = self.normalization * np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    def profile(self, kvec) -> float:
        k = np.asarray(kvec, dtype=float)
        if self.family == "bump":
            return float(self.profile_radial(np.linalg.norm(k - np.asarray(self.k0)) / self.w))
        kn = float(np.linalg.norm(k))
        if kn <= self.m:
            return 0.0
        return self.normalization * (self.m / kn) ** self.beta

    def in_support(self, kvec) -> bool:
        return self.profile(kvec) > 0.0


@dataclass(frozen=True)
class StationaryPoint:
    k_s: tuple[float, float, float]
    omega_s: float
    gamma_s: float
    valid: bool

    @property
    def velocity(self) -> float:
        return float(np.linalg.norm(self.k_s)) / self.omega_s if self.omega_s > 0 else math.inf


class Estimate(NamedTuple):
    value: complex
    in_support: bool


@dataclass(frozen=True)
class FitResult:
    slope: float
    stderr: float
    intercept: float
    t_values: tuple[float, ...]
    amplitudes: tuple[float, ...]
    preasymptotic: bool
    values: tuple[complex, ...] = field(default=(), repr=False)

    @property
    def flagged(self) -> bool:
        return self.preasymptotic or self.stderr > 0.02


@dataclass(frozen=True)
class NormReport:
    l2_weighted: str
    l1_weighted: str
    l2_growth: float
    l1_growth: float
    partial_integral_trace: list[tuple[float, float, float]] = field(repr=False)


# --------------------------------------------------------------------------
# packet quadrature

_ORDER_LO, _ORDER_HI = 8, 14


def _decompose_x(x, axis):
    x = np.asarray(x, dtype=float)
    xpar = float(x @ axis)
    xperp = float(np.linalg.norm(x - xpar * axis))
    return xpar, xperp


def _phase(spec, t, xpar, xperp, s, th):
    kpar = spec.k0_norm + spec.w * s * np.cos(th)
    kperp = spec.w * s * np.sin(th)
    om = spec.omega(np.hypot(kpar, kperp))
    # J0(kperp xperp) oscillates like cos(kperp xperp): count it as phase
    return kpar * xpar + kperp * xperp - om * t


# bump profile below 1e-17 of its peak beyond this radius
_S_CUT = math.sqrt(1.0 - 1.0 / 40.0)


def _rule(ncells, order, lo, hi):
    x, w = leggauss(order)
    edges = np.linspace(lo, hi, ncells + 1)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


def _cells(spec, t, xpar, xperp, refine):
    """Radial cell edges and per-cell angular cell counts keeping phase steps below pi/4."""
    quarter = math.pi / 4 / refine
    s = np.linspace(0.0, _S_CUT, 2001)
    th = np.linspace(0.0, math.pi, 201)
    S, TH = np.meshgrid(s, th, indexing="ij")
    ph = _phase(spec, t, xpar, xperp, S, TH)
    ds_step = np.max(np.abs(np.diff(ph, axis=0)), axis=1)
    dth_total = np.sum(np.abs(np.diff(ph, axis=1)), axis=1)
    # radial edges: equal shares of the accumulated phase change, at least 16 cells
    cum = np.concatenate([[0.0], np.cumsum(ds_step)])
    ns = max(16 * refine, math.ceil(cum[-1] / quarter))
    targets = np.linspace(0.0, cum[-1], ns + 1)
    edges = np.interp(targets, cum, s) if cum[-1] > 0 else np.linspace(0.0, _S_CUT, ns + 1)
    edges = np.unique(np.concatenate([edges, np.linspace(0.0, _S_CUT, 16 * refine + 1)]))
    idx = np.clip(np.searchsorted(s, edges[1:]), 1, len(s) - 1)
    lo_idx = np.clip(np.searchsorted(s, edges[:-1]), 0, len(s) - 1)
    nth = [max(4 * refine, math.ceil(dth_total[a:b + 1].max() / quarter)) for a, b in zip(lo_idx, idx)]
    return edges, nth


def _bump_integral(spec, t, xpar, xperp, edges, nth, order):
    gx, gw = leggauss(order)
    total = 0.0 + 0.0j
    for a, b, n in zip(edges[:-1], edges[1:], nth):
        s = 0.5 * (b - a) * gx + 0.5 * (a + b)
        ws = 0.5 * (b - a) * gw * spec.profile_radial(s)
        th, wth = _rule(n, order, 0.0, math.pi)
        si = s[:, None]
        kpar = spec.k0_norm + spec.w * si * np.cos(th)
        kperp = spec.w * si * np.sin(th)
        om = spec.omega(np.hypot(kpar, kperp))
        amp = kperp / (2.0 * om)
        if xperp != 0.0:
            amp = amp * special.j0(kperp * xperp)
        # jacobian of (kpar, kperp) -> (s, theta) is w^2 s
        cell = amp * np.exp(1j * (kpar * xpar - om * t)) * (spec.w**2 * si)
        total += ws @ cell @ wth
    # 2 pi from the azimuth, (2 pi)^3 from the measure
    return total * 2.0 * math.pi / (2.0 * math.pi) ** 3


def packet_field_numeric(t: float, x, spec: WavePacketSpec, rtol: float = 1e-10) -> complex:
    """Value of the packet at ``(t, x)`` by cell-adaptive product Gauss quadrature.

    Cells are sized so the phase changes by less than pi/4 across each one.
    Orders 8 and 14 are compared on the same cells, and the cells are halved
    until the two agree to ``rtol`` times the phase-free magnitude of the
    packet.
    """
    if spec.family != "bump":
        raise ValueError("packet_field_numeric needs a compactly supported bump profile")
    xpar, xperp = _decompose_x(x, spec.axis)
    edges, nth = _cells(spec, 0.0, 0.0, 0.0, 1)
    scale = abs(_bump_integral(spec, 0.0, 0.0, 0.0, edges, nth, _ORDER_HI))
    diff = math.inf
    for refine in (1, 2, 4):
        edges, nth = _cells(spec, t, xpar, xperp, refine)
        lo = _bump_integral(spec, t, xpar, xperp, edges, nth, _ORDER_LO)
        hi = _bump_integral(spec, t, xpar, xperp, edges, nth, _ORDER_HI)
        diff = abs(hi - lo)
        if diff <= rtol * scale:
            return complex(hi)
    raise NonConvergenceError(
        "packet quadrature did not converge",
        {"t": t, "x_parallel": xpar, "x_perp": xperp, "radial_cells": len(edges) - 1,
         "max_angular_cells": max(nth), "difference": diff, "scale": scale},
    )


# --------------------------------------------------------------------------
# stationary phase

def stationary_point(t: float, x, m: float, tachyonic: bool = True) -> StationaryPoint:
    """Momentum where ``grad_k (omega t - k.x)`` vanishes, i.e. ``k/omega = x/t``.

    For a tachyon this needs ``|x| > |t|``; for an ordinary particle
    ``|x| < |t|``.  The root with ``k`` along ``x sgn(t)`` is taken.
    """
    x = np.asarray(x, dtype=float)
    xn = float(np.linalg.norm(x))
    at = abs(t)
    sq = xn * xn - t * t if tachyonic else t * t - xn * xn
    if not sq > 0.0:
        return StationaryPoint((math.nan,) * 3, math.nan, math.nan, False)
    root = math.sqrt(sq)
    sgn = math.copysign(1.0, t) if t != 0 else 1.0
    k_s = m * x * sgn / root
    return StationaryPoint(tuple(float(c) for c in k_s), m * at / root, at / root, True)


def _widths(sp: StationaryPoint, t: float, m: float):
    """Stationary-phase widths, each sqrt(2) over the root of a Hessian eigenvalue."""
    dk_par = math.sqrt(2.0) * sp.omega_s**1.5 / (m * math.sqrt(abs(t)))
    dk_perp = math.sqrt(2.0 * sp.omega_s / abs(t))
    return dk_par, dk_perp


def stationary_phase_estimate(t: float, x, spec: WavePacketSpec) -> Estimate:
    """Leading large-``|t|`` estimate of the packet, built from the stationary-phase widths.

    For a tachyon ``dk_par = sqrt(2m)|t| / (x^2 - t^2)^(3/4)`` and
    ``dk_perp = dk_par / gamma``.  The phase is ``sgn(t) m sqrt(x^2 - t^2)``
    (tachyon) or ``-sgn(t) m sqrt(t^2 - x^2)`` (ordinary particle).  The exact
    asymptote is larger by ``pi**1.5`` and carries a constant ``exp(-i pi/4)``.
    """
    m = spec.m
    sp = stationary_point(t, x, m, spec.tachyonic)
    if not sp.valid:
        raise ValueError("no stationary point: (t, x) is outside the packet's reach")
    f_s = spec.profile(sp.k_s)
    if f_s == 0.0:
        return Estimate(0j, False)
    dk_par, dk_perp = _widths(sp, t, m)
    xn = float(np.linalg.norm(x))
    sgn = math.copysign(1.0, t)
    if spec.tachyonic:
        phase = sgn * m * math.sqrt(xn * xn - t * t)
    else:
        phase = -sgn * m * math.sqrt(t * t - xn * xn)
    amp = dk_par * dk_perp**2 / ((2.0 * math.pi) ** 3 * 2.0 * sp.omega_s)
    return Estimate(complex(amp * f_s * np.exp(1j * phase)), True)


def _hessian_curvatures(spec: WavePacketSpec) -> tuple[float, float]:
    om = float(spec.omega(spec.k0_norm))
    return spec.m**2 / om**3, 1.0 / om


def onset_time(spec: WavePacketSpec) -> float:
    """Time after which the bump is wide compared with the stationary-phase width.

    ``1 / (c w^2)`` with ``c`` the smaller curvature of ``omega`` at the bump
    centre.  Stationary phase needs ``|t|`` well beyond this.
    """
    return 1.0 / (min(_hessian_curvatures(spec)) * spec.w**2)


def trajectory_point(spec: WavePacketSpec, v_s: float, t: float) -> np.ndarray:
    return v_s * t * spec.axis


def decay_exponent_fit(spec: WavePacketSpec, v_s: float, t_values) -> FitResult:
    """Least-squares slope of ``log|phi|`` against ``log|t|`` along ``x = v_s t k0_hat``."""
    ts = np.asarray(sorted(float(t) for t in t_values))
    if len(ts) < 3 or np.any(ts <= 0):
        raise ValueError("need at least three positive t values")
    if ts[-1] / ts[0] < 10.0 * (1 - 1e-12):
        raise ValueError("t values must span at least one decade")
    m = spec.m
    if spec.tachyonic:
        if not v_s > 1.0:
            raise ValueError("tachyon trajectories need v_s > 1")
        k_mag = m * v_s / math.sqrt(v_s * v_s - 1.0)
    else:
        if not 0.0 <= v_s < 1.0:
            raise ValueError("subluminal trajectories need 0 <= v_s < 1")
        k_mag = m * v_s / math.sqrt(1.0 - v_s * v_s)
    if not spec.in_support(k_mag * spec.axis):
        raise ValueError("stationary momentum for this v_s lies outside the profile support")
    vals = [packet_field_numeric(t, trajectory_point(spec, v_s, t), spec) for t in ts]
    amps = np.abs(np.array(vals))
    reg = stats.linregress(np.log(ts), np.log(amps))
    return FitResult(
        slope=float(reg.slope),
        stderr=float(reg.stderr),
        intercept=float(reg.intercept),
        t_values=tuple(ts.tolist()),
        amplitudes=tuple(amps.tolist()),
        preasymptotic=bool(ts[0] < 10.0 * onset_time(spec)),
        values=tuple(complex(v) for v in vals),
    )


# --------------------------------------------------------------------------
# norms

def _shell(fn, m, a, b):
    # k = m + s^2 absorbs the 1/sqrt(k - m) of 1/omega at the threshold
    def g(s):
        return 2.0 * fn(m + s * s) / math.sqrt(2.0 * m + s * s)

    val, _ = integrate.quad(g, math.sqrt(a - m), math.sqrt(b - m), epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def norm_analysis(spec: WavePacketSpec, doublings: int = 40, tail: int = 12) -> NormReport:
    """Classify ``int |f|^2/omega d^3k`` and ``int |f|/omega d^3k`` as finite or divergent.

    Partial integrals are taken over balls ``|k| <= R`` with ``R = 2^j m``.
    The increments over the last ``tail`` doublings are fitted to a power of
    ``R``; a non-negative exponent means the partial integrals grow without
    bound.
    """
    if spec.family != "power_tail":
        raise ValueError("norm_analysis expects a power_tail profile")
    m, beta, n = spec.m, spec.beta, spec.normalization

    def l2(k):
        return 4.0 * math.pi * k * k * (n * (m / k) ** beta) ** 2

    def l1(k):
        return 4.0 * math.pi * k * k * abs(n) * (m / k) ** beta

    radii = [m * 2.0**j for j in range(doublings + 1)]
    trace = [(m, 0.0, 0.0)]
    p2 = p1 = 0.0
    inc2, inc1 = [], []
    for a, b in zip(radii[:-1], radii[1:]):
        d2, d1 = _shell(l2, m, a, b), _shell(l1, m, a, b)
        p2 += d2
        p1 += d1
        inc2.append(d2)
        inc1.append(d1)
        trace.append((b, p2, p1))
    logr = np.log(radii[1:])[-tail:]
    g2 = float(np.polyfit(logr, np.log(inc2[-tail:]), 1)[0])
    g1 = float(np.polyfit(logr, np.log(inc1[-tail:]), 1)[0])
    # a margin below zero keeps log growth (exponent 0) on the divergent side
    cls = lambda g: "finite" if g < -0.05 else "divergent"
    return NormReport(cls(g2), cls(g1), g2, g1, trace)


def threshold_trace(m: float, kmax: float, levels: int = 30) -> list[tuple[float, float]]:
    """Partial integrals of ``int d^3k / omega`` over ``m + delta < |k| < kmax`` as delta shrinks.

    The profile is taken as 1 up to ``kmax``: the bounded worst case at the
    threshold.  The trace converges because ``1/omega`` is integrable there.
    """
    out = []
    for j in range(levels):
        delta = (kmax - m) * 2.0**-j
        val = _shell(lambda k: 4.0 * math.pi * k * k, m, m + delta, kmax) if delta < kmax - m else 0.0
        out.append((delta, val))
    out.append((0.0, _shell(lambda k: 4.0 * math.pi * k * k, m, m, kmax)))
    return out
