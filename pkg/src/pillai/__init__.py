"""Certified computations for integers c with two representations P_m - F_n = c."""

__version__ = "0.1.0"
