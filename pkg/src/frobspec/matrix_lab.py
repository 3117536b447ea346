"""Analysis of dense nonnegative matrices.

Digraph structure (irreducibility, period, primitivity) is decided on the
support graph and cross-checked against boolean matrix powers.  Traces of
integral matrices are exact Python integers.  Eigenvalues of matrices up to
``EXACT_MAX_ORDER`` come from the exact characteristic polynomial, which
makes zero eigenvalues and repeated eigenvalues exact; larger matrices fall
back to LAPACK.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import EmptyMultiset, InconsistentAnalysis, InputError, NotIrreducible, Overflow
from .polynomials import roots_with_multiplicity
from .spectrum import SpectrumMultiset
from .symmetric import coefficients_from_power_sums, divisors, mobius

EXACT_MAX_ORDER = 32
IRREDUCIBLE_CROSSCHECK_MAX = 50
PRIMITIVE_CROSSCHECK_MAX = 12
_INT64_SAFE = 2**62


@dataclass(frozen=True, eq=False)
class NonnegativeMatrix:
    """Square matrix with nonnegative entries.

    ``integral`` is true when every entry is an exact integer; ``exact`` then
    holds the entries as Python ints so traces can be computed without
    rounding.
    """

    entries: np.ndarray
    integral: bool = False

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InputError(f"matrix must be square and nonempty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix has non-finite entries")
        if np.any(a < 0):
            i, j = np.argwhere(a < 0)[0]
            raise InputError(f"negative entry {a[i, j]!r} at ({i + 1}, {j + 1})")
        if self.integral and not np.all(a == np.round(a)):
            raise InputError("matrix flagged integral has non-integer entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_rows(cls, rows) -> "NonnegativeMatrix":
        """Build from nested sequences; integral iff every entry is an ``int``."""
        rows = [list(r) for r in rows]
        integral = all(isinstance(x, (int, np.integer)) and not isinstance(x, bool) for r in rows for x in r)
        return cls(np.array(rows, dtype=float), integral)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def exact(self) -> list[list]:
        """Entries as ints (integral) or exact binary fractions."""
        if self.integral:
            return [[int(x) for x in row] for row in self.entries]
        return [[Fraction(float(x)) for x in row] for row in self.entries]

    def support(self, zero_threshold: float = 0.0) -> np.ndarray:
        return self.entries > zero_threshold

    def __eq__(self, other):
        if not isinstance(other, NonnegativeMatrix):
            return NotImplemented
        return self.integral == other.integral and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"NonnegativeMatrix(order={self.order}, integral={self.integral})"


def as_matrix(a) -> NonnegativeMatrix:
    if isinstance(a, NonnegativeMatrix):
        return a
    if isinstance(a, np.ndarray):
        if np.issubdtype(a.dtype, np.integer):
            return NonnegativeMatrix(a.astype(float), True)
        return NonnegativeMatrix(a, False)
    return NonnegativeMatrix.from_rows(a)


# -- matrix file format -----------------------------------------------------


def _parse_value(tok: str, lineno: int):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise InputError(f"line {lineno}: cannot parse {tok!r} as a number") from None


def parse_matrix(text: str) -> NonnegativeMatrix:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InputError("empty matrix file")
    lineno, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise InputError(f"line {lineno}: expected the order N, got {first!r}") from None
    if n < 1:
        raise InputError(f"line {lineno}: order must be positive")
    body = lines[1:]
    if len(body) != n:
        raise InputError(f"expected {n} matrix rows, found {len(body)}")
    rows = []
    for lineno, ln in body:
        toks = ln.split()
        if len(toks) != n:
            raise InputError(f"line {lineno}: expected {n} values, found {len(toks)}")
        rows.append([_parse_value(t, lineno) for t in toks])
    return NonnegativeMatrix.from_rows(rows)


def read_matrix(path) -> NonnegativeMatrix:
    return parse_matrix(Path(path).read_text())


def format_matrix(a: NonnegativeMatrix) -> str:
    lines = [str(a.order)]
    for row in a.entries:
        if a.integral:
            lines.append(" ".join(str(int(x)) for x in row))
        else:
            lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_matrix(a: NonnegativeMatrix, path) -> None:
    Path(path).write_text(format_matrix(a))


# -- digraph structure ------------------------------------------------------


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return seen


def _strongly_connected(adj: np.ndarray) -> bool:
    if adj.shape[0] == 1:
        return bool(adj[0, 0])
    return bool(_reachable(adj, 0).all() and _reachable(adj.T, 0).all())


def _bool_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # saturating: entries stay in {0, 1}
    return (x.astype(np.int64) @ y.astype(np.int64)) > 0


def _bool_power(x: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(x.shape[0], dtype=bool)
    base = x.copy()
    while k:
        if k & 1:
            result = _bool_matmul(result, base)
        k >>= 1
        if k:
            base = _bool_matmul(base, base)
    return result


def _irreducible_by_powers(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 1:
        # (I + A)**0 = I is positive, but [[0]] is excluded by convention
        return bool(adj[0, 0])
    return bool(_bool_power(adj | np.eye(n, dtype=bool), n - 1).all())


def is_irreducible(a, zero_threshold: float = 0.0) -> bool:
    """Strong connectivity of the support digraph.

    For orders up to ``IRREDUCIBLE_CROSSCHECK_MAX`` the answer is checked
    against positivity of ``(I + A)**(N-1)``.
    """
    a = as_matrix(a)
    adj = a.support(zero_threshold)
    graph = _strongly_connected(adj)
    if a.order <= IRREDUCIBLE_CROSSCHECK_MAX and graph != _irreducible_by_powers(adj):
        raise InconsistentAnalysis("graph and (I+A)^(N-1) irreducibility tests disagree")
    return graph


def period(a, zero_threshold: float = 0.0) -> int:
    """Gcd of closed-walk lengths, from BFS levels out of vertex 0."""
    a = as_matrix(a)
    adj = a.support(zero_threshold)
    if not _strongly_connected(adj):
        raise NotIrreducible("period is defined only for irreducible matrices")
    n = adj.shape[0]
    level = [-1] * n
    level[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u, v in zip(*np.nonzero(adj)):
        g = math.gcd(g, abs(level[u] + 1 - level[v]))
    return g


def _primitive_by_powers(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    return bool(_bool_power(adj, (n - 1) ** 2 + 1).all())


def is_primitive(a, zero_threshold: float = 0.0) -> bool:
    a = as_matrix(a)
    adj = a.support(zero_threshold)
    graph = _strongly_connected(adj) and period(a, zero_threshold) == 1
    if a.order <= PRIMITIVE_CROSSCHECK_MAX and graph != _primitive_by_powers(adj):
        raise InconsistentAnalysis("period-1 and A^((N-1)^2+1) primitivity tests disagree")
    return graph


@dataclass(frozen=True)
class DigraphSummary:
    adjacency: np.ndarray
    strongly_connected: bool
    period: int | None


def digraph_summary(a, zero_threshold: float = 0.0) -> DigraphSummary:
    a = as_matrix(a)
    sc = is_irreducible(a, zero_threshold)
    return DigraphSummary(a.support(zero_threshold), sc, period(a, zero_threshold) if sc else None)


# -- traces ----------------------------------------------------------------


def _int_powers(rows: list[list[int]], kmax: int) -> list[int]:
    """Exact ``tr(A**k)`` for k = 1..kmax of a nonnegative integer matrix."""
    n = len(rows)
    row_sum = max(1, max(sum(r) for r in rows))
    fits = n * row_sum**kmax < _INT64_SAFE
    dtype = np.int64 if fits else object
    a = np.array(rows, dtype=dtype)
    p = a.copy()
    traces = [int(np.trace(p))]
    for _ in range(kmax - 1):
        p = p @ a
        traces.append(int(np.trace(p)))
    return traces


def power_traces(a, kmax: int) -> list:
    """``[tr A, tr A**2, ..., tr A**kmax]``; exact ints when ``a`` is integral."""
    a = as_matrix(a)
    if a.integral:
        return _int_powers(a.exact(), kmax)
    out = []
    p = a.entries.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, kmax + 1):
            if k > 1:
                p = p @ a.entries
            t = float(np.trace(p))
            if not math.isfinite(t):
                raise Overflow(f"tr(A^{k}) overflows")
            out.append(t)
    return out


def power_trace(a, k: int):
    """``tr(A**k)``; exact for integral matrices, repeated squaring otherwise."""
    a = as_matrix(a)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if a.integral:
        rows = a.exact()
        n = len(rows)
        row_sum = max(1, max(sum(r) for r in rows))
        dtype = np.int64 if n * row_sum**k < _INT64_SAFE else object
        base = np.array(rows, dtype=dtype)
        result = np.eye(n, dtype=np.int64).astype(dtype)
    else:
        base = a.entries.copy()
        result = np.eye(a.order)
    e = k
    with np.errstate(over="ignore", invalid="ignore"):
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
    if a.integral:
        return int(np.trace(result))
    t = float(np.trace(result))
    if not math.isfinite(t):
        raise Overflow(f"tr(A^{k}) overflows")
    return t


def net_trace_exact(a, k: int) -> int:
    """``sum_{d | k} mu(k/d) tr(A**d)`` in exact integer arithmetic."""
    a = as_matrix(a)
    if not a.integral:
        raise InputError("net_trace_exact needs an integral matrix")
    traces = _int_powers(a.exact(), k)
    return sum(mobius(k // d) * traces[d - 1] for d in divisors(k))


def net_traces_exact(a, kmax: int) -> list[int]:
    a = as_matrix(a)
    if not a.integral:
        raise InputError("net_traces_exact needs an integral matrix")
    traces = _int_powers(a.exact(), kmax)
    return [sum(mobius(k // d) * traces[d - 1] for d in divisors(k)) for k in range(1, kmax + 1)]


# -- characteristic polynomial and eigenvalues -------------------------------


def charpoly_exact(a) -> list:
    """Exact coefficients of ``det(zI - A)``, lowest degree first.

    Float entries are exact binary fractions; the matrix is scaled to an
    integer one, its traces taken exactly, and Newton's identities inverted
    over the rationals.
    """
    a = as_matrix(a)
    rows = a.exact()
    n = a.order
    if a.integral:
        scale = 1
        int_rows = rows
    else:
        scale = reduce(math.lcm, (x.denominator for r in rows for x in r), 1)
        int_rows = [[int(x * scale) for x in r] for r in rows]
    traces = _int_powers(int_rows, n)
    coeffs = coefficients_from_power_sums(traces, n)
    if scale != 1:
        # coefficient of z**(n-k) picks up scale**-k
        coeffs = [Fraction(c) / scale ** (n - i) for i, c in enumerate(coeffs)]
    return coeffs


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues with how they were obtained and how well they check out."""

    values: np.ndarray
    method: str
    residual: float
    exact_zero_count: int | None


def eigensystem(a) -> Eigensystem:
    a = as_matrix(a)
    if a.order <= EXACT_MAX_ORDER:
        poly = charpoly_exact(a)
        roots, zeros, err = roots_with_multiplicity(poly)
        values = [0j] * zeros + [z for z, m in roots for _ in range(m)]
        return Eigensystem(np.array(values, dtype=complex), "exact-charpoly", err, zeros)
    values = np.linalg.eigvals(a.entries)
    norm = max(1.0, float(np.abs(a.entries).sum(axis=1).max()))
    # residual of det(zI - A) at each computed eigenvalue, relative to ||A||**N
    res = 0.0
    for z in values:
        sign, logdet = np.linalg.slogdet(z * np.eye(a.order) - a.entries)
        if sign != 0:
            res = max(res, math.exp(logdet - a.order * math.log(norm + abs(z))))
    return Eigensystem(values.astype(complex), "lapack", res, None)


def eigenvalues(a) -> np.ndarray:
    """All N eigenvalues of ``a`` (zeros included)."""
    return eigensystem(a).values


def default_zero_cut(a) -> float:
    a = as_matrix(a)
    row_sum = float(a.entries.sum(axis=1).max())
    return 64 * a.order * np.finfo(float).eps * row_sum


@dataclass(frozen=True)
class NonzeroSpectrum:
    spectrum: SpectrumMultiset
    zeros_removed: int
    zero_cut: float
    eigen: Eigensystem


def analyze_spectrum(a, zero_cut: float | None = None, tol: float | None = None) -> NonzeroSpectrum:
    a = as_matrix(a)
    eig = eigensystem(a)
    if zero_cut is None:
        zero_cut = default_zero_cut(a)
    keep = [complex(z) for z in eig.values if abs(z) > zero_cut]
    removed = a.order - len(keep)
    if not keep:
        raise EmptyMultiset("every eigenvalue is zero (nilpotent matrix)")
    return NonzeroSpectrum(SpectrumMultiset.from_pairs(((z, 1) for z in keep), tol), removed, zero_cut, eig)


def nonzero_spectrum(a, zero_cut: float | None = None, tol: float | None = None) -> SpectrumMultiset:
    return analyze_spectrum(a, zero_cut, tol).spectrum
