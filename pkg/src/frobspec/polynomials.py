"""Exact rational polynomial arithmetic and root extraction.

Polynomials are lists of coefficients, lowest degree first.  Exact
coefficients (``int`` or ``Fraction``) let us split off zero roots and
repeated roots before any floating point work, so that nilpotent parts and
multiple eigenvalues never reach the root finder.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EigenFailure

ROOT_BACKWARD_TOL = 1e-9


def trim(p: Sequence) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def monic(p: Sequence) -> list[Fraction]:
    p = trim(p)
    lead = Fraction(p[-1])
    return [Fraction(c) / lead for c in p]


def derivative(p: Sequence) -> list:
    if len(p) == 1:
        return [0]
    return [i * p[i] for i in range(1, len(p))]


def divmod_poly(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = a[:]
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        coef = r[i + len(b) - 1] / lead
        q[i] = coef
        if coef:
            for j, bj in enumerate(b):
                r[i + j] -= coef * bj
    return trim(q), trim(r[: len(b) - 1] or [Fraction(0)])


def gcd_poly(a: Sequence, b: Sequence) -> list[Fraction]:
    a, b = trim(a), trim(b)
    while b != [0]:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def sub_poly(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return trim(out)


def squarefree_decomposition(p: Sequence) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: monic squarefree factors paired with their multiplicity."""
    f = monic(p)
    if len(f) == 1:
        return []
    df = derivative(f)
    a = gcd_poly(f, df)
    b, _ = divmod_poly(f, a)
    c, _ = divmod_poly(df, a)
    d = sub_poly(c, derivative(b))
    out = []
    i = 1
    while len(trim(b)) > 1:
        a = gcd_poly(b, d)
        if len(a) > 1:
            out.append((a, i))
        b, _ = divmod_poly(b, a)
        c, _ = divmod_poly(d, a)
        d = sub_poly(c, derivative(b))
        i += 1
    return out


def _horner(coeffs: np.ndarray, z: complex) -> tuple[complex, complex]:
    """Value and derivative; ``coeffs`` highest degree first."""
    val = 0j
    der = 0j
    for c in coeffs:
        der = der * z + val
        val = val * z + c
    return val, der


def _backward_error(coeffs: np.ndarray, z: complex) -> float:
    val, _ = _horner(coeffs, z)
    scale = sum(abs(c) * abs(z) ** i for i, c in enumerate(coeffs[::-1]))
    return abs(val) / scale if scale else abs(val)


def simple_roots(p: Sequence) -> tuple[np.ndarray, float]:
    """Roots of a squarefree polynomial and the worst backward error."""
    f = monic(p)
    deg = len(f) - 1
    if deg == 0:
        return np.array([], dtype=complex), 0.0
    coeffs = np.array([float(c) for c in reversed(f)], dtype=float)
    if deg == 1:
        return np.array([complex(-coeffs[1])]), 0.0
    roots = np.roots(coeffs).astype(complex)
    polished = []
    for z in roots:
        err = _backward_error(coeffs, z)
        for _ in range(3):
            val, der = _horner(coeffs, z)
            if der == 0:
                break
            cand = z - val / der
            cand_err = _backward_error(coeffs, cand)
            if cand_err >= err:
                break
            z, err = cand, cand_err
        polished.append(z)
    roots = np.array(polished, dtype=complex)
    # the coefficients are real: restore exact conjugate pairing
    roots = _pair_conjugates(roots)
    worst = max(_backward_error(coeffs, z) for z in roots)
    return roots, worst


def _pair_conjugates(roots: np.ndarray) -> np.ndarray:
    out = roots.copy()
    used = np.zeros(len(roots), dtype=bool)
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i, z in enumerate(roots):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) <= 1e-14 * scale:
            out[i] = complex(z.real, 0.0)
            continue
        cand = [j for j in range(len(roots)) if not used[j]]
        if not cand:
            continue
        j = min(cand, key=lambda j: abs(roots[j] - z.conjugate()))
        if abs(roots[j] - z.conjugate()) <= 1e-8 * scale:
            used[j] = True
            re = (z.real + roots[j].real) / 2
            im = (z.imag - roots[j].imag) / 2
            out[i] = complex(re, im)
            out[j] = complex(re, -im)
    return out


def roots_with_multiplicity(p: Sequence) -> tuple[list[tuple[complex, int]], int, float]:
    """Roots of an exact polynomial.

    Returns ``(nonzero roots with multiplicities, multiplicity of the zero
    root, worst backward error)``.  Raises :class:`EigenFailure` when the
    root finder does not reach ``ROOT_BACKWARD_TOL``.
    """
    f = trim([Fraction(c) for c in p])
    zeros = 0
    while len(f) > 1 and f[0] == 0:
        f.pop(0)
        zeros += 1
    out: list[tuple[complex, int]] = []
    worst = 0.0
    for factor, mult in squarefree_decomposition(f):
        roots, err = simple_roots(factor)
        worst = max(worst, err)
        out.extend((complex(z), mult) for z in roots)
    if worst > ROOT_BACKWARD_TOL:
        raise EigenFailure(
            f"root finder backward error {worst:.3e} exceeds {ROOT_BACKWARD_TOL:g}",
            {"backward_error": worst, "degree": len(f) - 1},
        )
    return out, zeros, worst
