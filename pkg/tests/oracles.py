"""Independent reference computations used to freeze expected values.

None of these share code with the package: different variables, different
quadrature routines, and for the loop integral higher precision.
"""

import math

import mpmath
import numpy as np
from scipy import integrate, special


def tachyon_radial_qawf(dt, r, m=1.0):
    """``int_0^inf sin(w dt) sin(r sqrt(w^2 + m^2)) dw`` by Fourier-weighted quadrature.

    ``r sqrt(w^2+m^2) = r w + delta(w)`` with ``delta -> 0``; the pieces are
    integrated with QAWF after subtracting the non-decaying part.
    """
    def delta(w):
        return r * m * m / (math.sqrt(w * w + m * m) + w)

    def piece(a, sgn):
        # int_0^inf cos(w a + sgn delta(w)) dw for a != 0
        a2, s2 = abs(a), math.copysign(1.0, a)
        c = integrate.quad(lambda w: math.cos(delta(w)) - 1.0, 0, np.inf, weight="cos", wvar=a2, limlst=200)[0]
        s = integrate.quad(lambda w: math.sin(delta(w)), 0, np.inf, weight="sin", wvar=a2, limlst=200)[0] * s2
        return c - sgn * s

    return 0.5 * (piece(dt - r, -1) - piece(dt + r, +1))


def tachyon_commutator_oracle(dt, r, m=1.0):
    """``C(dt, r)`` from the radial integral in the energy variable."""
    return -1j * tachyon_radial_qawf(dt, r, m) / (2 * math.pi**2 * r)


def pauli_jordan_series(dt, r, m=1.0, terms=60):
    """Ordinary scalar commutator inside the light cone from the power series of J1."""
    tau2 = dt * dt - r * r
    if tau2 <= 0:
        return 0j
    z = m * math.sqrt(tau2)
    j1 = sum((-1) ** n * (z / 2) ** (2 * n + 1) / (math.factorial(n) * math.factorial(n + 1)) for n in range(terms))
    return 1j * math.copysign(1.0, dt) * m * j1 / (4 * math.pi * math.sqrt(tau2))


def loop_integral_mp(p2, m0sq, m1sq, eps=1e-15, dps=30):
    """``int_0^1 log(Delta - i eps) dx`` at high precision, split at the real zeros of Delta."""
    with mpmath.workdps(dps):
        a, b, c = mpmath.mpf(p2), -(mpmath.mpf(p2) + m0sq - m1sq), mpmath.mpf(m0sq)
        pts = [mpmath.mpf(0), mpmath.mpf(1)]
        if a != 0:
            disc = b * b - 4 * a * c
            if disc >= 0:
                pts += [(-b + s * mpmath.sqrt(disc)) / (2 * a) for s in (1, -1)]
        elif b != 0:
            pts.append(-c / b)
        pts = sorted({p for p in pts if 0 <= p <= 1})
        f = lambda x: mpmath.log(a * x * x + b * x + c - 1j * mpmath.mpf(eps))
        return complex(mpmath.quad(f, pts))


def packet_dblquad(t, xpar, m, k0, w):
    """Bump packet on the axis by nested adaptive quadrature in (k_par, k_perp)."""
    def f(kperp, kpar, part):
        s2 = ((kpar - k0) ** 2 + kperp**2) / w**2
        if s2 >= 1:
            return 0.0
        om = math.sqrt(kpar**2 + kperp**2 - m * m)
        ph = kpar * xpar - om * t
        return math.exp(-1 / (1 - s2)) * kperp / (2 * om) * (math.cos(ph) if part == 0 else math.sin(ph))

    parts = []
    for part in (0, 1):
        v, _ = integrate.dblquad(lambda kp, kz: f(kp, kz, part), k0 - w, k0 + w, 0,
                                 lambda kz: math.sqrt(max(w * w - (kz - k0) ** 2, 0.0)),
                                 epsabs=1e-16, epsrel=1e-12)
        parts.append(v)
    return complex(*parts) * 2 * math.pi / (2 * math.pi) ** 3


def smeared_delta_bruteforce(sigma, d):
    """Overlap of two unit Gaussians by 1D quadrature of the radial convolution."""
    g = lambda k: k * k * np.sinc(k * d / math.pi) * math.exp(-(sigma * k) ** 2) / (2 * math.pi**2)
    return integrate.quad(g, 0, np.inf, epsabs=1e-15)[0]


def j1(x):
    return special.j1(x)
