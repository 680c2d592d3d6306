"""Numerical and symbolic checks for a covariant tachyon field on a twin Fock space."""

__version__ = "0.1.0"

from . import fields, fock, loopint, lorentz, wavepacket  # noqa: E402,F401

__all__ = ["__version__", "fields", "fock", "loopint", "lorentz", "wavepacket"]
