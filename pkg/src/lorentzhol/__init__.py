"""Holonomy of Lorentzian manifolds: transports, parabolic algebras, quotients and spinors."""

__version__ = "0.1.0"
