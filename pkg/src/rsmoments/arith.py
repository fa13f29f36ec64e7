"""Integer and multiplicative arithmetic.

Factorisation, twisted divisor sums, the local Euler polynomials attached to
a modulus, depleted zeta, the cusps of Gamma_0(N) in the 1/(c*a)
parameterisation, and Dirichlet character enumeration from the unit-group
structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import DirichletCharacter, PoleError, riemann_zeta

__all__ = [
    "PrimeFactorization",
    "CuspLabel",
    "factorize",
    "is_prime",
    "divisors",
    "prime_divisors",
    "euler_phi",
    "mobius",
    "ord_p",
    "sigma_complex",
    "sigma_complex_coprime",
    "P_M",
    "P_M_conversion_factor",
    "sigma_twisted_N",
    "zeta_depleted",
    "enumerate_cusps",
    "characters_mod",
    "divisor_count_upper",
]

# Witness set proving compositeness deterministically for all n < 3.3e24,
# comfortably covering the 2^63 - 1 input cap.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeFactorization:
    """Exact factorisation n = prod p^e with strictly increasing primes."""

    factors: tuple  # tuple of (p, e)

    def n(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def as_dict(self) -> dict:
        return dict(self.factors)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 40):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"pollard rho failed for {n}")


@lru_cache(maxsize=200_000)
def factorize(n: int) -> PrimeFactorization:
    """Exact factorisation; trial division with a rho fallback.

    Accepts 1 <= n <= 2^63 - 1.
    """
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    if n > 2**63 - 1:
        raise OverflowError("factorize supports n <= 2^63 - 1")
    fac = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= m and d < 100_000:
        while m % d == 0:
            fac[d] = fac.get(d, 0) + 1
            m //= d
        d += wheel[i]
        i = (i + 1) % 8
    # what is left is 1, a prime, or a product of primes > 1e5
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            fac[v] = fac.get(v, 0) + 1
            continue
        d = _pollard_rho(v)
        stack.extend([d, v // d])
    return PrimeFactorization(tuple(sorted(fac.items())))


def prime_divisors(n: int) -> tuple:
    return tuple(p for p, _ in factorize(n).factors)


def divisors(n: int) -> list:
    """All divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


def mobius(n: int) -> int:
    mu = 1
    for _, e in factorize(n).factors:
        if e > 1:
            return 0
        mu = -mu
    return mu


def ord_p(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def divisor_count_upper(n) -> float:
    """Rigorous bound d(n) <= n^(1.5379 log 2 / log log n) for n >= 3."""
    n = np.asarray(n, dtype=float)
    small = n < 3.0
    safe = np.where(small, 3.0, n)
    expo = 1.5379 * math.log(2.0) / np.log(np.log(safe))
    return np.where(small, 2.0, safe**expo)


# ---------------------------------------------------------------------------
# divisor sums and local polynomials


def sigma_complex(n: int, z) -> complex:
    """sum_{d | n} d^z."""
    if n < 1:
        raise ValueError("sigma_complex requires n >= 1")
    z = complex(z)
    out = 1.0 + 0.0j
    for p, e in factorize(n).factors:
        x = p**z if z != 0 else 1.0
        # geometric sum 1 + x + ... + x^e
        acc = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for _ in range(e):
            term *= x
            acc += term
        out *= acc
    return out


def sigma_complex_coprime(n: int, z, N: int) -> complex:
    """sum over d | n with gcd(d, N) = 1 of d^z."""
    if n < 1:
        raise ValueError("sigma_complex_coprime requires n >= 1")
    z = complex(z)
    out = 1.0 + 0.0j
    for p, e in factorize(n).factors:
        if N % p == 0:
            continue
        x = p**z
        acc = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for _ in range(e):
            term *= x
            acc += term
        out *= acc
    return out


def P_M(s, n: int, M: int) -> complex:
    """Local Euler product over p | M.

    P_M(s, n) = prod_{p|M} [p^{(1-2s)(ord_p(n)+1)} p^{-(1-2s)(ord_p(M)-1)}
                (1 - p^{2s}) + p - 1] / (1 - p^{1-2s}).
    """
    if M < 1:
        raise ValueError("P_M requires M >= 1")
    s = complex(s)
    out = 1.0 + 0.0j
    for p, eM in factorize(M).factors:
        lp = math.log(p)
        x = np.exp((1.0 - 2.0 * s) * lp)  # p^(1-2s)
        denom = 1.0 - x
        if abs(denom) < 1e-12:
            raise PoleError(f"P_M denominator vanishes at p={p}")
        en = ord_p(n, p)
        num = x ** (en + 1) * x ** (-(eM - 1)) * (1.0 - np.exp(2.0 * s * lp)) + p - 1.0
        out *= num / denom
    return complex(out)


def P_M_conversion_factor(s, M: int) -> complex:
    """M^(1-2s) / prod_{p|M} p, relating P_M to its first-moment variant."""
    s = complex(s)
    rad = 1
    for p in prime_divisors(M):
        rad *= p
    return M ** (1.0 - 2.0 * s) / rad


def _P_local_limit(p: int, ord_n: int, ord_M: int) -> float:
    """t -> 0 limit of the local P factor: the zero of 1 - p^{-2it} is
    removable, with value A(p-1) - p for A = ord_n + 2 - ord_M."""
    a = ord_n + 2 - ord_M
    return a * (p - 1.0) - p


def sigma_twisted_N(m: int, N: int, t: float) -> complex:
    """Twisted divisor sum sigma_{-2it}(m; N).

    Equals N^{-2it}/rad(N) * P_N(1/2 + it, m) * sigma^{(N)}_{-2it}(m) when
    N/rad(N) divides m, and 0 otherwise.  At t = 0 the removable local
    limits replace the P factors.
    """
    if m < 1 or N < 1:
        raise ValueError("sigma_twisted_N requires m, N >= 1")
    rad = 1
    for p in prime_divisors(N):
        rad *= p
    if m % (N // rad) != 0:
        return 0.0 + 0.0j
    pref = np.exp(-2j * t * math.log(N)) / rad if N > 1 else 1.0
    if abs(t) < 1e-9:
        ploc = 1.0
        for p, eM in factorize(N).factors:
            ploc *= _P_local_limit(p, ord_p(m, p), eM)
    else:
        ploc = P_M(0.5 + 1j * t, m, N)
    return complex(pref * ploc * sigma_complex_coprime(m, -2j * t, N))


def sigma_twisted_array(N: int, t: float, m_max: int) -> np.ndarray:
    """sigma_{-2it}(m; N) for m = 1..m_max (index m-1), sieve-based."""
    m = np.arange(1, m_max + 1)
    rad = 1
    for p in prime_divisors(N):
        rad *= p
    # coprime-to-N twisted divisor sums via a sieve over d
    cop = np.zeros(m_max, dtype=complex)
    for d in range(1, m_max + 1):
        if math.gcd(d, N) == 1:
            cop[d - 1 :: d] += np.exp(-2j * t * math.log(d)) if d > 1 else 1.0
    if N == 1:
        return cop
    out = np.zeros(m_max, dtype=complex)
    support = m % (N // rad) == 0
    # P_N(1/2+it, m) from the prime-local formula, vectorised over ord_p(m);
    # at t = 0 the removable local limit takes over
    s_half = 0.5 + 1j * t
    pn = np.ones(m_max, dtype=complex)
    for p, eM in factorize(N).factors:
        lp = math.log(p)
        ords = np.zeros(m_max, dtype=np.int64)
        q = p
        while q <= m_max:
            ords[q - 1 :: q] += 1
            q *= p
        if abs(t) < 1e-9:
            pn *= (ords + 2.0 - eM) * (p - 1.0) - p
        else:
            x = np.exp((1.0 - 2.0 * s_half) * lp)
            num = (
                x ** (ords + 1) * x ** (-(eM - 1)) * (1.0 - np.exp(2.0 * s_half * lp))
                + p
                - 1.0
            )
            pn *= num / (1.0 - x)
    pref = np.exp(-2j * t * math.log(N)) / rad
    out[support] = (pref * pn * cop)[support]
    return out


def zeta_depleted(s, N: int) -> complex:
    """zeta^(N)(s) = prod_{p|N} (1 - p^{-s}) * zeta(s)."""
    s = complex(s)
    if abs(s - 1.0) < 1e-14:
        raise PoleError("zeta_depleted pole at s = 1")
    out = riemann_zeta(s)
    for p in prime_divisors(N):
        out *= 1.0 - np.exp(-s * math.log(p))
    return complex(out)


# ---------------------------------------------------------------------------
# cusps of Gamma_0(N)


@dataclass(frozen=True, order=True)
class CuspLabel:
    """The cusp 1/(c*a) of Gamma_0(N): a | N, c mod gcd(a, N/a), gcd(c, N)=1."""

    N: int
    a: int
    c: int

    def __post_init__(self):
        if self.N % self.a != 0:
            raise ValueError("cusp label needs a | N")
        if math.gcd(self.c, self.N) != 1:
            raise ValueError("cusp representative must satisfy gcd(c, N) = 1")

    @property
    def gcd_a(self) -> int:
        return math.gcd(self.a, self.N // self.a)

    @property
    def width(self) -> int:
        return self.N // math.gcd(self.a * self.a, self.N)

    @property
    def is_infinity_class(self) -> bool:
        return self.a == self.N


def enumerate_cusps(N: int) -> list:
    """One label per inequivalent cusp; count is sum_{a|N} phi(gcd(a, N/a)).

    For each admissible residue c mod gcd(a, N/a) the representative is the
    smallest positive member of the class coprime to N (stepping by the
    modulus), which makes the output deterministic.
    """
    if N < 1:
        raise ValueError("enumerate_cusps requires N >= 1")
    out = []
    for a in divisors(N):
        g = math.gcd(a, N // a)
        for c0 in range(1, g + 1):
            if math.gcd(c0, g) != 1:
                continue
            c = c0
            while math.gcd(c, N) != 1:
                c += g
            out.append(CuspLabel(N, a, c))
    return out


# ---------------------------------------------------------------------------
# Dirichlet characters from the unit-group structure


def _primitive_root(p: int, e: int) -> int:
    """Generator of (Z/p^e)^* for odd prime p."""
    phi_p = p - 1
    fac = [q for q, _ in factorize(phi_p).factors]
    g = 2
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, phi_p // q, p) != 1 for q in fac):
            break
        g += 1
    if e == 1:
        return g
    # lift: g or g + p generates mod p^e
    if pow(g, phi_p, p * p) == 1:
        g += p
    return g


def _unit_group(q: int):
    """Generators and orders of (Z/q)^* via CRT over prime powers."""
    gens, orders = [], []
    for p, e in factorize(q).factors:
        pe = p**e
        rest = q // pe
        inv_rest = pow(rest, -1, pe) if pe > 1 else 1
        def lift(x, pe=pe, rest=rest, inv_rest=inv_rest):
            # CRT: image x mod pe, 1 mod rest
            return (1 + rest * ((x - 1) * inv_rest % pe)) % q
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                gens.append(lift(3))
                orders.append(2)
            else:
                gens.append(lift(pe - 1))
                orders.append(2)
                gens.append(lift(5))
                orders.append(2 ** (e - 2))
        else:
            g = _primitive_root(p, e)
            gens.append(lift(g))
            orders.append(p ** (e - 1) * (p - 1))
    return gens, orders


def _discrete_logs(q: int, gens, orders):
    """Exponent vector of every unit mod q with respect to ``gens``."""
    logs = {1: (0,) * len(gens)}
    frontier = {1: (0,) * len(gens)}
    # BFS over the abelian group: multiply by generators
    while frontier:
        new = {}
        for u, vec in frontier.items():
            for i, g in enumerate(gens):
                v = u * g % q
                if v not in logs:
                    nv = list(vec)
                    nv[i] = (nv[i] + 1) % orders[i]
                    logs[v] = tuple(nv)
                    new[v] = tuple(nv)
        frontier = new
    return logs


def _character_from_exponents(q, gens, orders, logs, exps) -> tuple:
    values = [0.0 + 0.0j] * q
    for u, vec in logs.items():
        phase = sum(e * v / o for e, v, o in zip(exps, vec, orders))
        values[u] = complex(np.exp(2j * math.pi * phase))
    return tuple(values)


@lru_cache(maxsize=512)
def characters_mod(q: int) -> tuple:
    """All phi(q) Dirichlet characters mod q, with primitivity flags.

    Characters are built from the unit-group structure; chi is primitive iff
    it does not factor through (Z/(q/p))^* for any prime p | q.
    """
    if q < 1:
        raise ValueError("characters_mod requires q >= 1")
    if q == 1:
        return (DirichletCharacter(1, (1.0 + 0.0j,), True, True),)
    gens, orders = _unit_group(q)
    logs = _discrete_logs(q, gens, orders)

    def all_exps(i=0):
        if i == len(orders):
            yield ()
            return
        for rest in all_exps(i + 1):
            for e in range(orders[i]):
                yield (e,) + rest

    chars = []
    for exps in sorted(all_exps()):
        values = _character_from_exponents(q, gens, orders, logs, exps)
        trivial = all(e == 0 for e in exps)
        # primitivity: chi is imprimitive iff chi(n) = 1 whenever
        # n = 1 mod q/p and gcd(n, q) = 1, for some prime p | q.
        primitive = True
        for p in prime_divisors(q):
            qp = q // p
            factors_through = all(
                abs(values[n % q] - 1.0) < 1e-9
                for n in range(1, q, qp if qp > 0 else 1)
                if n % qp == 1 % qp and math.gcd(n, q) == 1
            ) if qp > 1 else all(
                abs(values[n % q] - 1.0) < 1e-9
                for n in range(1, q)
                if math.gcd(n, q) == 1
            )
            if factors_through:
                primitive = False
                break
        chars.append(DirichletCharacter(q, values, primitive, trivial))
    return tuple(chars)
