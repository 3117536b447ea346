"""Power sums, Newton identities, the Moebius function and net traces."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Sequence

from .errors import Overflow
from .spectrum import SpectrumMultiset, ipow

_LOG_MAX = math.log(1.7976931348623157e308)


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division, as ``((prime, exponent), ...)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def mobius(n: int) -> int:
    factors = factorize(n)
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def mobius_transform(values, k: int):
    """``sum_{d | k} mu(k/d) * values[d]`` for a 1-indexed mapping ``values``."""
    return sum(mobius(k // d) * values[d] for d in divisors(k))


class PowerSumSequence:
    """Lazily computed power sums ``s_k`` of a spectrum.

    Values are complex; :meth:`real` drops the imaginary part and
    :meth:`imag_residual` reports what was dropped.  :meth:`normalized`
    returns ``s_k / rho**k`` which never overflows and is what the condition
    checkers compare against their tolerances.
    """

    def __init__(self, source: SpectrumMultiset):
        self.source = source
        self._cache: dict[int, complex] = {0: complex(source.n)}
        self._norm_cache: dict[int, complex] = {0: complex(source.n)}
        self._lock = threading.Lock()

    def _sum(self, k: int, scale: float) -> complex:
        terms = [(m, ipow(v / scale, k)) for v, m in self.source.entries]
        re = math.fsum(m * t.real for m, t in terms)
        im = math.fsum(m * t.imag for m, t in terms)
        return complex(re, im)

    def value(self, k: int) -> complex:
        if k < 0:
            raise ValueError("k must be nonnegative")
        cached = self._cache.get(k)
        if cached is not None:
            return cached
        rho = self.source.rho
        if k * math.log(rho) > _LOG_MAX - math.log(self.source.n) - 1:
            raise Overflow(f"rho**k overflows for rho={rho:g}, k={k}")
        s = self._sum(k, 1.0)
        if not (math.isfinite(s.real) and math.isfinite(s.imag)):
            raise Overflow(f"s_{k} is not finite")
        with self._lock:
            self._cache.setdefault(k, s)
        return s

    def normalized(self, k: int) -> complex:
        cached = self._norm_cache.get(k)
        if cached is not None:
            return cached
        s = self._sum(k, self.source.rho)
        with self._lock:
            self._norm_cache.setdefault(k, s)
        return s

    def real(self, k: int) -> float:
        return self.value(k).real

    def imag_residual(self, k: int) -> float:
        return abs(self.value(k).imag)


def power_sum(ps: PowerSumSequence | SpectrumMultiset, k: int) -> float:
    if isinstance(ps, SpectrumMultiset):
        ps = PowerSumSequence(ps)
    if k < 1:
        raise ValueError("k must be a positive integer")
    return ps.real(k)


class NetTraceSequence:
    """Net traces ``t_k = sum_{d | k} mu(k/d) s_d`` over a power-sum sequence."""

    def __init__(self, source: PowerSumSequence):
        self.source = source
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()

    def value(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be a positive integer")
        cached = self._cache.get(k)
        if cached is not None:
            return cached
        terms = [mobius(k // d) * self.source.real(d) for d in divisors(k)]
        t = math.fsum(terms)
        with self._lock:
            self._cache.setdefault(k, t)
        return t

    def normalized(self, k: int) -> float:
        """``t_k / rho**k``, computed without forming ``rho**k``."""
        rho = self.source.source.rho
        terms = []
        for d in divisors(k):
            mu = mobius(k // d)
            if mu:
                terms.append(mu * self.source.normalized(d).real * rho ** (d - k))
        return math.fsum(terms)


def net_trace(nt: NetTraceSequence | SpectrumMultiset, k: int) -> float:
    if isinstance(nt, SpectrumMultiset):
        nt = NetTraceSequence(PowerSumSequence(nt))
    return nt.value(k)


@dataclass(frozen=True)
class PolynomialCoefficients:
    """Monic polynomial ``c_0 + c_1 z + ... + c_n z**n`` with ``c_n = 1``."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def highest_first(self) -> list:
        return list(reversed(self.coeffs))

    def is_real(self) -> bool:
        return all(not isinstance(c, complex) or c.imag == 0 for c in self.coeffs)


def _polymul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def coefficients_from_spectrum(spectrum: SpectrumMultiset) -> PolynomialCoefficients:
    """Expand ``prod (z - lambda)`` with conjugate pairs multiplied first."""
    factors = []
    entries = list(spectrum.entries)
    used = [False] * len(entries)
    for i, (v, m) in enumerate(entries):
        if used[i]:
            continue
        used[i] = True
        if v.imag == 0.0:
            factors.extend([[-v.real, 1.0]] * m)
            continue
        j = next(
            (j for j in range(len(entries)) if not used[j] and entries[j][0] == v.conjugate() and entries[j][1] == m),
            None,
        )
        if j is None:
            factors.extend([[-v, 1.0]] * m)
        else:
            used[j] = True
            quad = [abs(v) ** 2, -2.0 * v.real, 1.0]
            factors.extend([quad] * m)
    poly: list = [1.0]
    for f in factors:
        poly = _polymul(poly, f)
    return PolynomialCoefficients(tuple(poly))


def power_sums_from_coefficients(c: PolynomialCoefficients | Sequence, K: int) -> list:
    """Newton's identities: ``s_1 .. s_K`` of the roots of a monic polynomial.

    Works with any numeric type; integer coefficients give exact integers.
    """
    coeffs = list(c.coeffs if isinstance(c, PolynomialCoefficients) else c)
    n = len(coeffs) - 1
    if n < 1:
        raise ValueError("degree must be at least 1")
    if coeffs[-1] != 1:
        raise ValueError("polynomial must be monic")
    # e[i] is the coefficient of z**(n-i)
    e = [coeffs[n - i] if i <= n else 0 for i in range(K + 1)]
    s: list = []
    for k in range(1, K + 1):
        acc = k * e[k] if k <= n else 0
        for i in range(1, min(k - 1, n) + 1):
            acc += e[i] * s[k - i - 1]
        s.append(-acc)
    return s


def coefficients_from_power_sums(s: Sequence, n: int) -> list:
    """Inverse Newton identities: monic coefficients (low to high) from ``s_1..s_n``.

    With integer or :class:`~fractions.Fraction` inputs the result is exact.
    """
    e = [Fraction(1)]
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * Fraction(s[i - 1])
        e.append(acc / k)
    # coefficient of z**(n-k) is (-1)**k e_k
    coeffs = [(-1) ** k * e[k] for k in range(n + 1)]
    out = list(reversed(coeffs))
    return [int(x) if x.denominator == 1 else x for x in out]


def is_integer_polynomial(c: PolynomialCoefficients, tol: float = 1e-8) -> tuple[bool, list[int] | None]:
    """Whether every coefficient is within ``tol`` of an integer.

    Returns ``(True, rounded)`` or ``(False, None)``.
    """
    rounded = []
    for x in c.coeffs:
        if isinstance(x, complex):
            if abs(x.imag) > tol:
                return False, None
            x = x.real
        if not isinstance(x, Number) or not math.isfinite(float(x)):
            return False, None
        r = round(x)
        if abs(x - r) > tol:
            return False, None
        rounded.append(int(r))
    return True, rounded
