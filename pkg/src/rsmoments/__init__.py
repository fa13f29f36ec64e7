"""Numerical main terms and identity cross-checks for second spectral
moments of Rankin-Selberg convolutions on Gamma_0(N)."""

__version__ = "0.1.0"
