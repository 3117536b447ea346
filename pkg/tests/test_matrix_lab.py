import math
from functools import reduce
from itertools import product

import networkx as nx
import numpy as np
import pytest

from frobspec.errors import EmptyMultiset, InputError, NotIrreducible
from frobspec.matrix_lab import (
    NonnegativeMatrix,
    _irreducible_by_powers,
    _primitive_by_powers,
    analyze_spectrum,
    charpoly_exact,
    eigenvalues,
    format_matrix,
    is_irreducible,
    is_primitive,
    net_trace_exact,
    nonzero_spectrum,
    parse_matrix,
    period,
    power_trace,
)
from frobspec.sampling import random_irreducible, random_matrix
from frobspec.spectrum import canonicalize, multiset_equal
from frobspec.symmetric import PowerSumSequence

SWAP2 = [[0, 1], [2, 0]]
CYCLE3 = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
CYCLE4 = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]


def as_graph(a: NonnegativeMatrix) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(a.order))
    g.add_edges_from(zip(*np.nonzero(a.entries)))
    return g


def period_by_cycles(a: NonnegativeMatrix) -> int:
    return reduce(math.gcd, (len(c) for c in nx.simple_cycles(as_graph(a))), 0)


def primitive_closed_walks(adj, k):
    """Closed walks of length k that are not a repetition of a shorter one."""
    n = len(adj)
    count = 0
    for walk in product(range(n), repeat=k):
        if all(adj[walk[i]][walk[(i + 1) % k]] for i in range(k)):
            if all(walk != walk[d:] + walk[:d] for d in range(1, k) if k % d == 0):
                count += 1
    return count


def test_irreducible_examples():
    assert is_irreducible(NonnegativeMatrix.from_rows(SWAP2))
    assert not is_irreducible(NonnegativeMatrix.from_rows([[1, 1], [0, 1]]))
    assert not is_irreducible(NonnegativeMatrix.from_rows([[0]]))
    assert is_irreducible(NonnegativeMatrix.from_rows([[3]]))


def test_period_examples():
    assert period(NonnegativeMatrix.from_rows(CYCLE3)) == 3
    assert period(NonnegativeMatrix.from_rows(SWAP2)) == 2
    assert period(NonnegativeMatrix.from_rows([[1, 1, 0], [0, 0, 1], [1, 0, 0]])) == 1
    with pytest.raises(NotIrreducible):
        period(NonnegativeMatrix.from_rows([[1, 1], [0, 1]]))


def test_primitive_examples():
    assert not is_primitive(NonnegativeMatrix.from_rows(SWAP2))
    assert is_primitive(NonnegativeMatrix.from_rows([[1, 1], [1, 0]]))
    assert is_primitive(NonnegativeMatrix.from_rows([[2]]))


def test_digraph_against_networkx():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 8))
        a = random_matrix(rng, n, float(rng.uniform(0.1, 0.6)))
        g = as_graph(a)
        expected = nx.is_strongly_connected(g) and (n > 1 or a.entries[0, 0] > 0)
        assert is_irreducible(a) == expected
        if expected:
            assert period(a) == period_by_cycles(a)
            assert is_primitive(a) == (period_by_cycles(a) == 1)
        else:
            assert not is_primitive(a)


def test_boolean_power_crosschecks_agree():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(1, 11))
        a = random_matrix(rng, n, float(rng.uniform(0.05, 0.5)))
        adj = a.support()
        assert _irreducible_by_powers(adj) == is_irreducible(a)
        assert _primitive_by_powers(adj) == is_primitive(a)


def test_power_trace_examples():
    assert power_trace(SWAP2, 2) == 4
    assert [power_trace(CYCLE3, k) for k in (1, 2, 3)] == [0, 0, 3]
    assert power_trace(np.eye(4), 7) == 4.0


def test_power_trace_is_exact_for_integers():
    a = NonnegativeMatrix.from_rows([[1, 1], [1, 0]])
    # tr F^k are Lucas numbers; far beyond float precision at k = 200
    lucas = [2, 1]
    for _ in range(200):
        lucas.append(lucas[-1] + lucas[-2])
    assert power_trace(a, 200) == lucas[200]
    assert isinstance(power_trace(a, 200), int)


def test_power_trace_matches_power_sums():
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        a = random_irreducible(rng, n, 0.3)
        s = nonzero_spectrum(a)
        ps = PowerSumSequence(s)
        for k in range(1, 21):
            t = power_trace(a, k)
            assert abs(t - ps.real(k)) <= 1e-8 * max(1.0, abs(t), s.rho**k)


def test_eigenvalue_examples():
    ev = eigenvalues(SWAP2)
    assert multiset_equal(canonicalize(ev), canonicalize([math.sqrt(2), -math.sqrt(2)]), 1e-14)
    assert list(eigenvalues([[2]])) == [2]
    assert multiset_equal(canonicalize(eigenvalues(CYCLE4)), canonicalize([1, 1j, -1, -1j]), 1e-14)


def test_eigenvalues_against_lapack():
    rng = np.random.default_rng(14)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        a = NonnegativeMatrix(rng.random((n, n)))
        ours = canonicalize(eigenvalues(a))
        ref = canonicalize(np.linalg.eigvals(a.entries))
        assert multiset_equal(ours, ref, 1e-9)


def test_charpoly_exact():
    assert charpoly_exact(SWAP2) == [-2, 0, 1]
    b = NonnegativeMatrix.from_rows([[0, 1, 0], [0, 0, 1], [2, 0, 0]])
    assert charpoly_exact(b) == [-2, 0, 0, 1]
    half = NonnegativeMatrix(np.array([[0.5, 0.25], [1.0, 0.0]]))
    assert charpoly_exact(half) == [-0.25, -0.5, 1]


def test_nonzero_spectrum_examples():
    with pytest.raises(EmptyMultiset):
        nonzero_spectrum([[0, 1], [0, 0]])
    info = analyze_spectrum(NonnegativeMatrix.from_rows([[2, 0], [0, 0]]))
    assert info.spectrum.entries == ((2 + 0j, 1),) and info.zeros_removed == 1
    s = nonzero_spectrum(SWAP2)
    assert multiset_equal(s, canonicalize([math.sqrt(2), -math.sqrt(2)]), 1e-14)


def test_nilpotent_block_removed_exactly():
    # a 4x4 Jordan-type nilpotent block next to [[3]]: LAPACK would scatter
    # the zero eigenvalue by eps**(1/4)
    a = np.zeros((5, 5))
    a[0, 0] = 3
    for i in range(1, 4):
        a[i, i + 1] = 1
    info = analyze_spectrum(NonnegativeMatrix(a))
    assert info.spectrum.entries == ((3 + 0j, 1),)
    assert info.eigen.exact_zero_count == 4


def test_net_trace_examples():
    assert [net_trace_exact(CYCLE3, k) for k in (1, 2, 3)] == [0, 0, 3]
    assert net_trace_exact([[1]], 1) == 1
    assert all(net_trace_exact([[1]], k) == 0 for k in range(2, 12))
    assert net_trace_exact(SWAP2, 2) == 4


def test_net_trace_counts_primitive_closed_walks():
    rng = np.random.default_rng(15)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        a = random_irreducible(rng, n, 0.4, integral=True)
        adj = a.entries.astype(int).tolist()
        for k in range(1, 7):
            t = net_trace_exact(a, k)
            assert t == primitive_closed_walks(adj, k)
            assert t % k == 0


def test_matrix_file_round_trip():
    text = "3\n0 1 0\n0 0 1\n2 0 0\n"
    a = parse_matrix(text)
    assert a.integral and a.order == 3
    assert format_matrix(a) == text
    b = parse_matrix("2\n0.5 1\n1 0\n")
    assert not b.integral
    assert parse_matrix(format_matrix(b)) == b


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    ("x\n", "line 1"),
    ("2\n1 2\n", "expected 2 matrix rows"),
    ("2\n1 2\n3\n", "line 3"),
    ("2\n1 a\n0 1\n", "'a'"),
    ("1\n-1\n", "negative"),
])
def test_matrix_file_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_matrix(text)
