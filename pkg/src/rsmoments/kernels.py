"""Spectral test function and moment kernels.

The test function is a pair of Gaussian bumps at +-T of width T^alpha,

    h(r) = (exp(-((r-T)/T^a)^2) + exp(-((r+T)/T^a)^2)) (r^2 + 1/4)/(r^2 + R),

with the rational factor forcing h(+-i/2) = 0.  The kernel

    H0(ix) = 1/pi^2 int h(r) r tanh(pi r)
             G(ir+ix+it+k/2) G(-ir+ix+it+k/2) /
             [G(ir+it+k/2) G(-ir+it+k/2)] dr

and its t-derivatives drive every main-term evaluation.  The integrand is
even in r, so the integral is taken as twice the bump window around +T with
a certified Gaussian bound for whatever is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma as _loggamma

from .specfun import (
    DomainError,
    PoleError,
    QuadratureSpec,
    digamma_family,
    integrate_line,
)

__all__ = [
    "StripViolationError",
    "TestFunctionParams",
    "KernelContext",
    "h_eval",
    "H0",
    "H0_derivative",
    "M_kernel",
]

# Half-width of the integration window in units of T^alpha.  At 12 units the
# Gaussian has decayed to exp(-144).
WINDOW_UNITS = 12.0


class StripViolationError(ValueError):
    """h was evaluated outside its holomorphy strip |Im r| <= 1/2 + 0.1."""


@dataclass(frozen=True)
class TestFunctionParams:
    """Parameters (T, alpha, R) of the bump pair."""

    __test__ = False  # keep pytest from collecting the "Test" prefix

    T: float
    alpha: float
    R: float = 1.0

    def __post_init__(self):
        if self.T < 10.0:
            raise ValueError("need T >= 10")
        if not (1.0 / 3.0 < self.alpha < 2.0 / 3.0):
            raise ValueError("need 1/3 < alpha < 2/3")
        if not (1.0 <= self.R < self.T**2):
            raise ValueError("need 1 <= R < T^2")

    @property
    def bump_width(self) -> float:
        return self.T**self.alpha

    def window(self) -> tuple:
        """Positive-r integration window covering the +T bump."""
        w = WINDOW_UNITS * self.bump_width
        return (max(0.0, self.T - w), self.T + w)


@dataclass
class KernelContext:
    """Everything H0-type integrals need: bump params, t, weight k, tolerances.

    ``h_fn`` plugs in a different even test function (same support window);
    only the default bump pair is exercised by the acceptance runs.
    """

    params: TestFunctionParams
    t: float
    k: int
    quad: QuadratureSpec = field(default_factory=lambda: QuadratureSpec(rel_tol=1e-11))
    h_fn: object = None

    def __post_init__(self):
        if self.k < 4 or self.k % 2:
            raise ValueError("weight k must be an even integer >= 4")
        self._h0_cache = {}

    def h(self, r):
        if self.h_fn is not None:
            return self.h_fn(r)
        return h_eval(r, self.params)

    def cached_H0(self, ix) -> complex:
        key = (round(complex(ix).real, 14), round(complex(ix).imag, 14))
        if key not in self._h0_cache:
            self._h0_cache[key] = H0(ix, self)
        return self._h0_cache[key]


def h_eval(r, p: TestFunctionParams, enforce_strip: bool = True):
    """The test function h(r); r may be complex (or a numpy array).

    With ``enforce_strip`` the argument must stay in |Im r| <= 0.6, the strip
    where the defining conditions hold; internal contour work evaluates the
    same meromorphic expression with the check off.
    """
    r = np.asarray(r, dtype=complex)
    if enforce_strip and np.any(np.abs(r.imag) > 0.6):
        raise StripViolationError("h evaluated outside |Im r| <= 0.6")
    w = p.bump_width
    bumps = np.exp(-(((r - p.T) / w) ** 2)) + np.exp(-(((r + p.T) / w) ** 2))
    out = bumps * (r * r + 0.25) / (r * r + p.R)
    return complex(out) if out.ndim == 0 else out


def tanh_pi(r):
    """tanh(pi r), saturating (overflow-free) for large |r|."""
    return np.tanh(math.pi * np.asarray(r, dtype=float))


def _gamma_ratio_pole_check(ix: complex, ctx: KernelContext, lo: float, hi: float):
    """Reject gamma-argument poles ir+ix+it+k/2 crossing the window."""
    a = ctx.k / 2.0 + complex(ix).real
    if a > 1e-9:
        return
    if abs(a - round(a)) > 1e-9:
        return
    # argument imag part: +-r + Im(ix) + t sweeps through zero?
    b = complex(ix).imag + ctx.t
    for sign in (1.0, -1.0):
        r0 = -b / sign
        if lo - 1e-9 <= abs(r0) <= hi + 1e-9:
            raise PoleError("gamma pole inside the H0 integration window")


def _h0_integrand_factory(ix: complex, ctx: KernelContext):
    a = ctx.k / 2.0 + 1j * ctx.t

    def f(r):
        ratio = np.exp(
            _loggamma(1j * r + ix + a)
            + _loggamma(-1j * r + ix + a)
            - _loggamma(1j * r + a)
            - _loggamma(-1j * r + a)
        )
        return ctx.h(r) * r * tanh_pi(r) * ratio

    return f


def H0(ix, ctx: KernelContext) -> complex:
    """The gamma-ratio kernel H0(ix; h) for the context's (T, alpha, R, t, k).

    ``ix`` is the complex argument occupying the ix slot (e.g. 0, -2it,
    -2s+1).  Integration runs over twice the positive bump window; the
    dropped region carries a certified exp(-144)-size bound.
    """
    ix = complex(ix)
    lo, hi = ctx.params.window()
    _gamma_ratio_pole_check(ix, ctx, lo, hi)
    f = _h0_integrand_factory(ix, ctx)
    val, _ = integrate_line(f, ctx.quad, interval=(lo, hi))
    # everything below the window: |h| <= e^{-144} (plus the mirrored bump,
    # which on [0, lo] is smaller still), ratio growth is polynomial.
    return 2.0 * val / math.pi**2


def _psi_sum(r, shift, k):
    """psi(ir + shift + k/2) + psi(-ir + shift + k/2) on a real grid r."""
    a = k / 2.0 + shift
    return digamma_family(1j * r + a, 0) + digamma_family(-1j * r + a, 0)


def _psi1_sum(r, shift, k):
    a = k / 2.0 + shift
    return digamma_family(1j * r + a, 1) + digamma_family(-1j * r + a, 1)


def _psi2_sum(r, shift, k):
    a = k / 2.0 + shift
    return digamma_family(1j * r + a, 2) + digamma_family(-1j * r + a, 2)


def H0_derivative(variant: str, order: int, ctx: KernelContext) -> complex:
    """Displayed psi-weighted integrals for d^m/ds^m (m=1) / d^m/dt^m (m=2,3).

    variant "minus": derivatives of H0(-2s+1-2it) at s = 1/2 - it, i.e. of
    H0(-2it') in t' at 0; variant "plus": the same for H0(-2s+1) at
    s = 1/2 + it (order 1) and H0(+2it') at t' = 0 (orders 2, 3).

    order 1 is valid for any context t; orders 2 and 3 are the t = 0
    displays and require ctx.t == 0.
    """
    if variant not in ("minus", "plus"):
        raise DomainError("variant must be 'minus' or 'plus'")
    if order not in (1, 2, 3):
        raise DomainError("order must be 1, 2 or 3")
    if order > 1 and abs(ctx.t) > 1e-14:
        raise DomainError("orders 2 and 3 are the t = 0 displays")
    p = ctx.params
    k = ctx.k
    t = ctx.t

    if order == 1:
        if variant == "minus":

            def f(r):
                return ctx.h(r) * r * tanh_pi(r) * _psi_sum(r, 1j * t, k)

        else:

            def f(r):
                a_num = -1j * t + k / 2.0
                a_den = 1j * t + k / 2.0
                ratio = np.exp(
                    _loggamma(1j * r + a_num)
                    + _loggamma(-1j * r + a_num)
                    - _loggamma(1j * r + a_den)
                    - _loggamma(-1j * r + a_den)
                )
                return ctx.h(r) * r * tanh_pi(r) * _psi_sum(r, -1j * t, k) * ratio

        scale = -2.0 / math.pi**2
    elif order == 2:
        if variant == "minus":

            def f(r):
                return ctx.h(r) * r * tanh_pi(r) * _psi_sum(r, 0.0, k) ** 2

            scale = -4.0 / math.pi**2
        else:

            def f(r):
                psi = _psi_sum(r, 0.0, k)
                return ctx.h(r) * r * tanh_pi(r) * (
                    psi * psi + 2.0 * _psi1_sum(r, 0.0, k)
                )

            scale = -4.0 / math.pi**2
    else:
        # third t-derivatives at t = 0 of H0(-2it) / H0(+2it); obtained by
        # expanding the log of the gamma ratio to third order in t.
        if variant == "minus":

            def f(r):
                psi = _psi_sum(r, 0.0, k)
                return (
                    ctx.h(r) * r * tanh_pi(r) * (8j * psi**3 + 2j * _psi2_sum(r, 0.0, k))
                )

        else:

            def f(r):
                psi = _psi_sum(r, 0.0, k)
                return ctx.h(r) * r * tanh_pi(r) * (
                    -8j * psi**3
                    - 48j * psi * _psi1_sum(r, 0.0, k)
                    - 26j * _psi2_sum(r, 0.0, k)
                )

        scale = 1.0 / math.pi**2

    lo, hi = p.window()
    val, _ = integrate_line(f, ctx.quad, interval=(lo, hi))
    return scale * 2.0 * val


def M_kernel(s, z) -> complex:
    """sqrt(pi) 2^(1/2-s) G(s-1/2-z) G(s-1/2+z) G(1-s) / [G(1/2-z) G(1/2+z)].

    Poles sit at s = 1/2 +- z - l (l >= 0) and at positive integers s; the
    raised error names the offending factor.
    """
    s = complex(s)
    z = complex(z)

    def near_nonpos_int(w):
        return w.real < 0.5 and abs(w.imag) < 1e-10 and abs(w.real - round(w.real)) < 1e-10

    for arg, name in (
        (s - 0.5 - z, "Gamma(s - 1/2 - z)"),
        (s - 0.5 + z, "Gamma(s - 1/2 + z)"),
        (1.0 - s, "Gamma(1 - s)"),
    ):
        if near_nonpos_int(arg):
            raise PoleError(f"M_kernel pole from {name}")
    log_val = (
        0.5 * math.log(math.pi)
        + (0.5 - s) * math.log(2.0)
        + _loggamma(s - 0.5 - z)
        + _loggamma(s - 0.5 + z)
        + _loggamma(1.0 - s)
        - _loggamma(0.5 - z)
        - _loggamma(0.5 + z)
    )
    return complex(np.exp(log_val))
