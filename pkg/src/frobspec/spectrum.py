"""Finite multisets of nonzero complex numbers.

A :class:`SpectrumMultiset` is always canonical: values closer than the
clustering tolerance are merged, conjugate-closed inputs are made exactly
conjugate symmetric, and entries are sorted by descending modulus and then
ascending argument in [0, 2*pi).  Every operation returns a new multiset.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import EmptyMultiset, InputError, NotUnitModulus, ZeroElement

DEFAULT_RELATIVE_TOL = 1e-9
UNIT_MODULUS_TOL = 1e-9


def default_tol(values: Iterable[complex]) -> float:
    rho = max((abs(v) for v in values), default=0.0)
    return DEFAULT_RELATIVE_TOL * max(1.0, rho)


def ipow(z: complex, k: int) -> complex:
    """Integer power by binary exponentiation."""
    if k < 0:
        raise ValueError("negative exponent")
    result = complex(1.0, 0.0)
    base = complex(z)
    while k:
        if k & 1:
            result *= base
        k >>= 1
        if k:
            base *= base
    return result


def _clean(z: complex) -> complex:
    # -0.0 would put negative reals at argument -pi and conjugates out of order
    re = z.real + 0.0
    im = z.imag + 0.0
    return complex(re, im)


def _cluster(values: Sequence[complex], tol: float) -> list[list[int]]:
    """Transitive closure of pairwise closeness, as lists of indices."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    arr = np.asarray(values, dtype=complex)
    order = np.argsort(arr.real, kind="stable")
    # sweep by real part so that only nearby candidates are compared
    for a_pos in range(n):
        i = order[a_pos]
        for b_pos in range(a_pos + 1, n):
            j = order[b_pos]
            if arr[j].real - arr[i].real > tol:
                break
            if abs(arr[i] - arr[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


def _representative(values: Sequence[complex], mults: Sequence[int]) -> complex:
    first = values[0]
    if all(v == first for v in values):
        return first
    total = sum(mults)
    re = math.fsum(m * v.real for v, m in zip(values, mults)) / total
    im = math.fsum(m * v.imag for v, m in zip(values, mults)) / total
    return complex(re, im)


def _merge(pairs: list[tuple[complex, int]], tol: float) -> list[tuple[complex, int]]:
    while True:
        vals = [v for v, _ in pairs]
        groups = _cluster(vals, tol)
        if all(len(g) == 1 for g in groups):
            return pairs
        pairs = [
            (
                _representative([pairs[i][0] for i in g], [pairs[i][1] for i in g]),
                sum(pairs[i][1] for i in g),
            )
            for g in groups
        ]


def _symmetrize(pairs: list[tuple[complex, int]], tol: float) -> list[tuple[complex, int]]:
    """Force exact conjugate symmetry when the multiset is conjugate closed."""
    n = len(pairs)
    partner = [-1] * n
    for i, (v, m) in enumerate(pairs):
        if partner[i] >= 0:
            continue
        if abs(v.imag) <= tol / 2:
            partner[i] = i
            continue
        best, best_d = -1, math.inf
        for j, (w, mw) in enumerate(pairs):
            if j == i or partner[j] >= 0 or mw != m:
                continue
            d = abs(v.conjugate() - w)
            if d <= tol and d < best_d:
                best, best_d = j, d
        if best < 0:
            return pairs
        partner[i], partner[best] = best, i
    out = list(pairs)
    for i, (v, m) in enumerate(pairs):
        j = partner[i]
        if j == i:
            out[i] = (complex(v.real, 0.0), m)
        elif i < j:
            w = pairs[j][0]
            re = (v.real + w.real) / 2 if v.real != w.real else v.real
            im = (v.imag - w.imag) / 2 if v.imag != -w.imag else v.imag
            out[i] = (complex(re, im), m)
            out[j] = (complex(re, -im), m)
    return out


def _canonical_order(pairs: list[tuple[complex, int]], tol: float) -> list[tuple[complex, int]]:
    by_mod = sorted(pairs, key=lambda e: -abs(e[0]))
    groups: list[list[tuple[complex, int]]] = []
    prev = None
    for entry in by_mod:
        r = abs(entry[0])
        if prev is None or prev - r > tol:
            groups.append([])
        groups[-1].append(entry)
        prev = r
    out = []
    for g in groups:
        out.extend(sorted(g, key=lambda e: (cmath.phase(e[0]) % (2 * math.pi), -abs(e[0]))))
    return out


@dataclass(frozen=True)
class SpectrumMultiset:
    """Canonical multiset of nonzero complex numbers.

    Build instances with :func:`canonicalize` or :meth:`from_pairs`; the
    constructor trusts its arguments.
    """

    entries: tuple[tuple[complex, int], ...]
    tol: float = field(default=0.0, compare=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[complex, int]], tol: float | None = None) -> "SpectrumMultiset":
        pairs = [(_clean(complex(v)), int(m)) for v, m in pairs]
        if not pairs:
            raise EmptyMultiset("empty multiset")
        for v, m in pairs:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError(f"non-finite value {v!r}")
            if m < 1:
                raise InputError(f"multiplicity must be positive, got {m}")
        if tol is None:
            tol = default_tol(v for v, _ in pairs)
        if tol < 0:
            raise ValueError("tolerance must be nonnegative")
        for v, _ in pairs:
            if abs(v) <= tol:
                raise ZeroElement(f"element {v!r} has modulus <= {tol:g}")
        pairs = _merge(pairs, tol)
        pairs = _symmetrize(pairs, tol)
        pairs = [(_clean(v), m) for v, m in pairs]
        return cls(tuple(_canonical_order(pairs, tol)), float(tol))

    @property
    def n(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def rho(self) -> float:
        return max(abs(v) for v, _ in self.entries)

    @property
    def distinct(self) -> tuple[complex, ...]:
        return tuple(v for v, _ in self.entries)

    def values(self) -> np.ndarray:
        """All elements, repeated by multiplicity, in canonical order."""
        return np.array([v for v, m in self.entries for _ in range(m)], dtype=complex)

    def multiplicity(self, z: complex, tol: float | None = None) -> int:
        tol = self.tol if tol is None else tol
        return sum(m for v, m in self.entries if abs(v - z) <= tol)

    def conjugate(self) -> "SpectrumMultiset":
        return SpectrumMultiset.from_pairs(((v.conjugate(), m) for v, m in self.entries), self.tol)

    def is_real(self) -> bool:
        return all(v.imag == 0.0 for v, _ in self.entries)

    def as_list(self) -> list[list[float]]:
        """``[[re, im, multiplicity], ...]`` for serialization."""
        return [[v.real, v.imag, m] for v, m in self.entries]

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        parts = []
        for v, m in self.entries:
            s = format_complex(v)
            parts.append(s if m == 1 else f"{s} (x{m})")
        return "{" + ", ".join(parts) + "}"


def format_complex(z: complex, digits: int = 12) -> str:
    re = float(f"{z.real:.{digits}g}") + 0.0
    im = float(f"{z.imag:.{digits}g}") + 0.0
    if im == 0.0:
        return f"{re:.{digits}g}"
    if re == 0.0:
        return f"{im:.{digits}g}i"
    sign = "+" if im > 0 else "-"
    return f"{re:.{digits}g}{sign}{abs(im):.{digits}g}i"


def canonicalize(raw: Iterable[complex], tol: float | None = None) -> SpectrumMultiset:
    raw = [complex(z) for z in raw]
    if not raw:
        raise EmptyMultiset("empty input")
    return SpectrumMultiset.from_pairs(((z, 1) for z in raw), tol)


def spectral_radius(spectrum: SpectrumMultiset) -> float:
    return spectrum.rho


@dataclass(frozen=True)
class PeripheralSet:
    """Elements lying on the circle ``|z| = radius``; may be empty."""

    radius: float
    entries: tuple[tuple[complex, int], ...]

    @property
    def p(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return sum(m for _, m in self.entries)

    def as_multiset(self, tol: float | None = None) -> SpectrumMultiset:
        if not self.entries:
            raise EmptyMultiset(f"no elements on the circle of radius {self.radius:g}")
        return SpectrumMultiset.from_pairs(self.entries, tol)


def peripheral(spectrum: SpectrumMultiset, r: float | None = None, tol: float | None = None) -> PeripheralSet:
    """Sub-multiset of elements with modulus within ``tol`` of ``r``.

    ``r`` defaults to the spectral radius.
    """
    if r is None:
        r = spectrum.rho
    if r < 0:
        raise ValueError("radius must be nonnegative")
    tol = spectrum.tol if tol is None else tol
    entries = tuple((v, m) for v, m in spectrum.entries if abs(abs(v) - r) <= tol)
    return PeripheralSet(float(r), entries)


def rotate(spectrum: SpectrumMultiset, zeta: complex) -> SpectrumMultiset:
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > UNIT_MODULUS_TOL:
        raise NotUnitModulus(f"|zeta| = {abs(zeta)!r}")
    return SpectrumMultiset.from_pairs(((zeta * v, m) for v, m in spectrum.entries), spectrum.tol)


def root_of_unity(p: int) -> complex:
    """``exp(2*pi*i/p)`` with the exactly representable cases made exact."""
    exact = {1: 1 + 0j, 2: -1 + 0j, 4: 1j}
    if p in exact:
        return exact[p]
    return cmath.exp(2j * math.pi / p)


@dataclass(frozen=True)
class Matching:
    """Outcome of a tolerance matching between two multisets."""

    matched: bool
    max_residual: float
    unmatched_left: tuple[complex, ...]
    unmatched_right: tuple[complex, ...]


def match_multisets(left: SpectrumMultiset, right: SpectrumMultiset, tol: float | None = None) -> Matching:
    """Find a multiplicity-preserving bijection with every pair within ``tol``.

    Solved as a bipartite matching on the tolerance graph, so the answer is
    exact for the given tolerance rather than greedy.
    """
    if tol is None:
        tol = max(left.tol, right.tol)
    a = left.values()
    b = right.values()
    dist = np.abs(a[:, None] - b[None, :])
    close = dist <= tol
    graph = csr_matrix(close.astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    used_b = set(int(j) for j in match if j >= 0)
    unmatched_a = tuple(complex(a[i]) for i in range(len(a)) if match[i] < 0)
    unmatched_b = tuple(complex(b[j]) for j in range(len(b)) if j not in used_b)
    residual = max((float(dist[i, match[i]]) for i in range(len(a)) if match[i] >= 0), default=0.0)
    ok = len(a) == len(b) and not unmatched_a and not unmatched_b
    return Matching(ok, residual, unmatched_a, unmatched_b)


def multiset_equal(left: SpectrumMultiset, right: SpectrumMultiset, tol: float | None = None) -> bool:
    if left.n != right.n:
        return False
    return match_multisets(left, right, tol).matched


def power_map(spectrum: SpectrumMultiset, p: int) -> SpectrumMultiset:
    """Image under ``z -> z**p``; colliding values merge and add multiplicities."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if p == 1:
        return spectrum
    # first-order error growth of z**p around |z| = rho
    tol = spectrum.tol * p * max(1.0, spectrum.rho) ** (p - 1)
    return SpectrumMultiset.from_pairs(((ipow(v, p), m) for v, m in spectrum.entries), tol)


def repeat(spectrum: SpectrumMultiset, copies: int) -> SpectrumMultiset:
    """``copies`` disjoint copies of ``spectrum`` (multiplicities scaled)."""
    return SpectrumMultiset(tuple((v, m * copies) for v, m in spectrum.entries), spectrum.tol)
