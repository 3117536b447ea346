"""Random nonnegative matrices with prescribed digraph properties."""

from __future__ import annotations

import numpy as np

from .matrix_lab import NonnegativeMatrix, is_primitive


def random_irreducible(rng: np.random.Generator, order: int, density: float = 0.25,
                       integral: bool = False, max_entry: int = 1) -> NonnegativeMatrix:
    """Sparse matrix whose support contains a random Hamiltonian cycle.

    Entries are uniform on (0, 1] (or integers in ``1..max_entry`` when
    ``integral``); extra edges, self-loops included, appear independently
    with ``density``.
    """
    perm = rng.permutation(order)
    support = rng.random((order, order)) < density
    for i in range(order):
        support[perm[i], perm[(i + 1) % order]] = True
    if integral:
        a = support * rng.integers(1, max_entry + 1, (order, order)).astype(float)
    else:
        a = np.where(support, 1.0 - rng.random((order, order)), 0.0)
    return NonnegativeMatrix(a, integral)


def random_primitive_integer(rng: np.random.Generator, order: int, density: float = 0.4,
                             max_entry: int = 1, max_tries: int = 1000) -> NonnegativeMatrix:
    """Rejection-sampled primitive integer matrix with entries in ``0..max_entry``."""
    for _ in range(max_tries):
        a = random_irreducible(rng, order, density, integral=True, max_entry=max_entry)
        if is_primitive(a):
            return a
    raise RuntimeError(f"no primitive matrix of order {order} after {max_tries} tries")


def random_matrix(rng: np.random.Generator, order: int, density: float = 0.3,
                  integral: bool = False) -> NonnegativeMatrix:
    """Sparse nonnegative matrix with no structural guarantees."""
    support = rng.random((order, order)) < density
    if integral:
        return NonnegativeMatrix(support * rng.integers(1, 3, (order, order)).astype(float), True)
    return NonnegativeMatrix(np.where(support, rng.random((order, order)), 0.0), False)
