"""Constructing irreducible realizers from primitive ones.

A Frobenius multiset with ``p`` peripheral elements is the p-th root
inflation of a multiset ``Lambda_1`` whose peripheral set is a single
positive number.  Given a primitive ``B`` realizing ``Lambda_1``, the cyclic
block matrix with identity blocks on the superdiagonal and ``B`` in the
bottom-left corner is irreducible of period ``p`` and realizes the original
multiset.  This module builds that matrix and certifies it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.optimize import least_squares

from .conditions import (
    check_boyle_handelman,
    check_frobenius_set,
    exact_net_traces,
)
from .errors import (
    CertificateFailed,
    EigenFailure,
    EmptyMultiset,
    MalformedPeripheral,
    NotAdmissible,
    NotFrobenius,
    QuotientFailure,
    StructureMismatch,
    WrongQuotientRealizer,
)
from .matrix_lab import (
    NonnegativeMatrix,
    _int_powers,
    analyze_spectrum,
    as_matrix,
    charpoly_exact,
    is_irreducible,
    is_primitive,
    period,
)
from .spectrum import (
    SpectrumMultiset,
    match_multisets,
    peripheral,
    power_map,
    repeat,
    root_of_unity,
)
from .symmetric import PowerSumSequence, coefficients_from_spectrum, is_integer_polynomial

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
TRANSFER_HORIZON = 20


def _abs_tol(spectrum: SpectrumMultiset, tol: float) -> float:
    return max(spectrum.tol, tol * max(1.0, spectrum.rho))


def peripheral_period(spectrum: SpectrumMultiset, tol: float = DEFAULT_TOL) -> int:
    """Number of peripheral elements of a Frobenius multiset.

    Also confirms the peripheral set is ``{rho * zeta**j}`` for the p-th
    roots of unity ``zeta**j``.
    """
    failed = [v for v in check_frobenius_set(spectrum, tol) if v.status != "holds"]
    if failed:
        raise NotFrobenius("; ".join(f"{v.condition_id}: {v.witness}" for v in failed))
    atol = _abs_tol(spectrum, tol)
    rho = spectrum.rho
    per = peripheral(spectrum, rho, atol)
    p = per.p
    zeta = root_of_unity(p)
    expected = SpectrumMultiset.from_pairs(((rho * zeta**j, 1) for j in range(p)), spectrum.tol)
    if not match_multisets(per.as_multiset(spectrum.tol), expected, atol).matched:
        raise MalformedPeripheral(f"peripheral set is not rho times the {p}-th roots of unity")
    return p


@dataclass(frozen=True)
class QuotientResult:
    p: int
    lambda1: SpectrumMultiset
    copy_check_residual: float
    primitive_peripheral: bool


def quotient_spectrum(spectrum: SpectrumMultiset, p: int, tol: float = DEFAULT_TOL) -> QuotientResult:
    """``Lambda_1`` with ``phi_p(Lambda)`` equal to ``p`` copies of it.

    The power-sum transfer ``s_{kp}(Lambda) = p s_k(Lambda_1)`` is checked for
    ``k <= 20`` and its worst normalized deviation returned as the residual.
    """
    if p < 1:
        raise ValueError("p must be a positive integer")
    if p == 1:
        lam1 = spectrum
    else:
        image = power_map(spectrum, p)
        bad = [(v, m) for v, m in image.entries if m % p]
        if bad:
            v, m = bad[0]
            raise QuotientFailure(f"{v} has multiplicity {m} in the p-th power image, not divisible by p={p}")
        lam1 = SpectrumMultiset.from_pairs(((v, m // p) for v, m in image.entries), image.tol)
    ps = PowerSumSequence(spectrum)
    ps1 = PowerSumSequence(lam1)
    # rho(Lambda_1) = rho**p so the normalizations agree
    residual = max(abs(ps.normalized(k * p) - p * ps1.normalized(k)) for k in range(1, TRANSFER_HORIZON + 1))
    if residual > max(tol, 1e-6) * spectrum.n:
        raise QuotientFailure(f"power-sum transfer residual {residual:.3e} too large")
    atol1 = _abs_tol(lam1, tol)
    per1 = peripheral(lam1, lam1.rho, atol1)
    primitive = per1.n == 1 and abs(per1.entries[0][0] - lam1.rho) <= atol1
    return QuotientResult(p, lam1, float(residual), primitive)


def cyclic_block_lift(b, p: int) -> NonnegativeMatrix:
    """Order ``p*M`` block matrix: identities on the superdiagonal, ``B`` bottom-left."""
    b = as_matrix(b)
    if p < 1:
        raise ValueError("p must be a positive integer")
    if p == 1:
        return b
    m = b.order
    a = np.zeros((p * m, p * m))
    for i in range(p - 1):
        a[i * m:(i + 1) * m, (i + 1) * m:(i + 2) * m] = np.eye(m)
    a[(p - 1) * m:, :m] = b.entries
    return NonnegativeMatrix(a, b.integral)


@dataclass
class RealizationCertificate:
    matrix: NonnegativeMatrix
    claimed_spectrum: SpectrumMultiset
    p: int
    verified: bool
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "order": self.matrix.order,
            "integral": self.matrix.integral,
            "verified": self.verified,
            "claimed_spectrum": self.claimed_spectrum.as_list(),
            "evidence": self.evidence,
        }


def _check_quotient_realizer(b: NonnegativeMatrix, q: QuotientResult, tol: float):
    nz_b = analyze_spectrum(b)
    atol = max(1e-6, tol) * max(1.0, q.lambda1.rho)
    m = match_multisets(nz_b.spectrum, q.lambda1, atol)
    if nz_b.spectrum.n != q.lambda1.n or not m.matched:
        raise WrongQuotientRealizer(
            f"nonzero spectrum of B is {nz_b.spectrum}, expected {q.lambda1}"
        )
    return nz_b, m.max_residual


def _certify(a: NonnegativeMatrix, spectrum: SpectrumMultiset, p: int, b_primitive: bool, tol: float) -> RealizationCertificate:
    irreducible = is_irreducible(a)
    measured = period(a) if irreducible else None
    try:
        nz = analyze_spectrum(a)
    except (EmptyMultiset, EigenFailure) as exc:
        cert = RealizationCertificate(a, spectrum, p, False, {"irreducible": irreducible, "error": str(exc)})
        raise CertificateFailed(f"spectrum extraction failed: {exc}", cert) from exc
    atol = max(1e-6, tol) * max(1.0, spectrum.rho)
    m = match_multisets(nz.spectrum, spectrum, atol)
    evidence = {
        "irreducible": irreducible,
        "measured_period": measured,
        "spectrum_match_residual": m.max_residual if m.matched else None,
        "spectrum_match_tol": atol,
        "zeros_removed": nz.zeros_removed,
        "eigen_method": nz.eigen.method,
        "eigen_backward_error": nz.eigen.residual,
        "b_primitive": b_primitive,
    }
    ok = irreducible and m.matched and nz.spectrum.n == spectrum.n
    if b_primitive:
        ok = ok and measured == p
    cert = RealizationCertificate(a, spectrum, p, ok, evidence)
    if not ok:
        raise CertificateFailed("lifted matrix failed verification", cert)
    return cert


def realize_irreducible(spectrum: SpectrumMultiset, b, tol: float = DEFAULT_TOL) -> RealizationCertificate:
    """Lift a primitive realizer of the quotient to an irreducible realizer of ``spectrum``."""
    b = as_matrix(b)
    p = peripheral_period(spectrum, tol)
    q = quotient_spectrum(spectrum, p, tol)
    _, b_residual = _check_quotient_realizer(b, q, tol)
    b_primitive = is_primitive(b)
    a = cyclic_block_lift(b, p)
    cert = _certify(a, spectrum, p, b_primitive, tol)
    cert.evidence["quotient_residual"] = q.copy_check_residual
    cert.evidence["b_spectrum_residual"] = b_residual
    return cert


def _poly_compose_power(coeffs: list, p: int) -> list:
    """Coefficients of ``f(z**p)`` from those of ``f`` (lowest first)."""
    out = [0] * ((len(coeffs) - 1) * p + 1)
    for i, c in enumerate(coeffs):
        out[i * p] = c
    return out


def verify_kor_lift(spectrum: SpectrumMultiset, b, tol: float = DEFAULT_TOL) -> RealizationCertificate:
    """:func:`realize_irreducible` for integral ``B`` plus the exact integer identities."""
    b = as_matrix(b)
    if not b.integral:
        raise WrongQuotientRealizer("B must be an integral matrix")
    cert = realize_irreducible(spectrum, b, tol)
    a = cert.matrix
    p = cert.p
    if not a.integral:
        cert.verified = False
        raise StructureMismatch("lifted matrix is not integral", cert)

    # det(zI - A) = z**(zeros) * prod (z - lambda); strip the zero roots of both sides
    char_a = charpoly_exact(a)
    char_b = charpoly_exact(b)
    lhs = _strip_zero_roots(char_a)
    rhs = _poly_compose_power(_strip_zero_roots(char_b), p)
    scale = max(1.0, max(abs(c) for c in coefficients_from_spectrum(spectrum).coeffs))
    is_int, claimed = is_integer_polynomial(coefficients_from_spectrum(spectrum), tol * scale)
    identity_ok = lhs == rhs and is_int and claimed == lhs
    cert.evidence["polynomial_identity"] = identity_ok
    cert.evidence["nonzero_charpoly"] = [int(c) for c in lhs]

    horizon = 24 // p
    t_a = exact_net_traces(lhs, p * horizon)
    t_b = exact_net_traces(_strip_zero_roots(char_b), horizon)
    transfer_ok = all(t_a[p * k - 1] == p * t_b[k - 1] for k in range(1, horizon + 1))
    vanish_ok = all(t_a[k - 1] == 0 for k in range(1, p * horizon + 1) if k % p)
    cert.evidence["net_trace_transfer"] = transfer_ok and vanish_ok
    cert.evidence["net_trace_horizon"] = p * horizon
    if not identity_ok:
        cert.verified = False
        raise StructureMismatch("prod (z - lambda) != prod (z^p - kappa)", cert)
    if not (transfer_ok and vanish_ok):
        cert.verified = False
        raise StructureMismatch("t_{pk}(Lambda) != p t_k(Lambda_1)", cert)
    return cert


def _strip_zero_roots(coeffs: list) -> list:
    out = list(coeffs)
    while len(out) > 1 and out[0] == 0:
        out.pop(0)
    return out


# -- best-effort search for a primitive realizer ------------------------------


@dataclass
class SearchResult:
    """Outcome of :func:`search_primitive_realizer`.

    ``matrix`` is None when the budget ran out; that is inconclusive and says
    nothing about realizability.
    """

    matrix: NonnegativeMatrix | None
    evaluations: int
    objective: float | None
    order: int | None = None
    seed: int | None = None
    residual: float | None = None

    @property
    def status(self) -> str:
        return "found" if self.matrix is not None else "inconclusive"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "evaluations": self.evaluations,
            "objective": self.objective,
            "order": self.order,
            "spectrum_match_residual": self.residual,
            "matrix": None if self.matrix is None else self.matrix.entries.tolist(),
        }


class _TraceObjective:
    """Residuals ``(tr(A**k) - s_k) / rho**k`` for k = 1..N with analytic Jacobian.

    Matching the first N power sums of an N x N matrix pins down its
    characteristic polynomial, and zero eigenvalues contribute nothing, so
    this matches nonzero spectra without ever sorting eigenvalues.
    """

    def __init__(self, targets: list[float], order: int, rho: float):
        self.targets = np.asarray(targets)
        self.order = order
        self.scale = np.array([max(1.0, rho) ** k for k in range(1, order + 1)])
        self.evaluations = 0

    def _powers(self, x):
        a = x.reshape(self.order, self.order)
        pw = [np.eye(self.order), a]
        for _ in range(self.order - 1):
            pw.append(pw[-1] @ a)
        return pw

    def residuals(self, x):
        self.evaluations += 1
        pw = self._powers(x)
        tr = np.array([np.trace(pw[k]) for k in range(1, self.order + 1)])
        return (tr - self.targets) / self.scale

    def jacobian(self, x):
        pw = self._powers(x)
        # d tr(A**k) / dA = k (A**(k-1))^T
        rows = [k * pw[k - 1].T.ravel() / self.scale[k - 1] for k in range(1, self.order + 1)]
        return np.array(rows)


def _exact_trace_residuals(x: np.ndarray, targets: list[Fraction]) -> np.ndarray:
    order = x.shape[0]
    rows = [[Fraction(float(v)) for v in row] for row in x]
    scale = reduce(math.lcm, (v.denominator for row in rows for v in row), 1)
    traces = _int_powers([[int(v * scale) for v in row] for row in rows], order)
    return np.array([float(Fraction(t, scale ** (k + 1)) - targets[k]) for k, t in enumerate(traces)])


def _refine(x: np.ndarray, obj: "_TraceObjective", targets: list[Fraction], steps: int = 6) -> np.ndarray:
    """Gauss-Newton steps on the support of ``x`` with exactly evaluated residuals.

    Near a repeated eigenvalue the spectrum moves like the square root of the
    trace error, so the last digits of the residual matter.
    """
    support = x.ravel() > 0
    best = x
    best_err = np.linalg.norm(_exact_trace_residuals(x, targets) / obj.scale)
    for _ in range(steps):
        r = _exact_trace_residuals(best, targets) / obj.scale
        jac = obj.jacobian(best.ravel())[:, support]
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        cand = best.ravel().copy()
        cand[support] += step
        if np.any(cand < 0):
            break
        cand = cand.reshape(x.shape)
        err = np.linalg.norm(_exact_trace_residuals(cand, targets) / obj.scale)
        if err >= best_err:
            break
        best, best_err = cand, err
    return best


def _candidate_snaps(x: np.ndarray):
    """Nearby matrices on coarse rational grids, tried before the raw optimum."""
    for q in (1, 2, 3, 4, 6, 8):
        snapped = np.round(x * q) / q
        if np.all(snapped >= 0) and np.max(np.abs(snapped - x)) < 0.25 / q:
            yield snapped, q == 1
    yield x, False


def _verify_candidate(x: np.ndarray, target: SpectrumMultiset, integral: bool, match_tol: float):
    try:
        cand = NonnegativeMatrix(x, integral)
        if not is_primitive(cand):
            return None
        nz = analyze_spectrum(cand)
    except (EmptyMultiset, EigenFailure, ValueError):
        return None
    m = match_multisets(nz.spectrum, target, match_tol)
    if nz.spectrum.n == target.n and m.matched:
        return cand, m.max_residual
    return None


def search_primitive_realizer(
    target: SpectrumMultiset,
    N_max: int = 6,
    budget: int = 100_000,
    seed: int = 0,
    match_tol: float = 1e-6,
) -> SearchResult:
    """Randomized multi-start search for a primitive matrix with nonzero spectrum ``target``.

    Orders run from ``|target|`` upward (doubling, capped at ``N_max``).  Each
    start is a bounded nonlinear least-squares solve of the power-sum
    equations; solutions are snapped to small rational grids when that keeps
    them exact, then verified by eigenvalue matching and a primitivity test.
    """
    n = target.n
    if n > N_max or N_max > 8:
        raise ValueError("need |target| <= N_max <= 8")
    bh = check_boyle_handelman(target)
    if bh.status == "fails":
        raise NotAdmissible("; ".join(f"{v.condition_id}: {v.witness}" for v in bh.failures()))
    rho = target.rho
    if n == 1:
        return SearchResult(NonnegativeMatrix(np.array([[rho]]), float(rho).is_integer()), 0, 0.0, 1, seed, 0.0)

    orders = []
    order = n
    while order <= N_max:
        orders.append(order)
        order *= 2
    if orders[-1] != N_max and N_max > n:
        orders.append(N_max)

    rng = np.random.default_rng(seed)
    ps = PowerSumSequence(target)
    evaluations = 0
    best_obj = None
    while evaluations < budget:
        for order in orders:
            if evaluations >= budget:
                break
            targets = [ps.real(k) for k in range(1, order + 1)]
            exact_targets = [Fraction(t) for t in targets]
            obj = _TraceObjective(targets, order, rho)
            x0 = rng.uniform(0.0, 1.0, order * order) * (rho / order) * rng.uniform(0.5, 2.0)
            x0[rng.random(order * order) < 0.3] = 0.0
            remaining = budget - evaluations
            try:
                sol = least_squares(
                    obj.residuals, x0, jac=obj.jacobian, bounds=(0.0, np.inf),
                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=min(2000, max(1, remaining)),
                )
            except (ValueError, np.linalg.LinAlgError):
                evaluations += obj.evaluations
                continue
            evaluations += obj.evaluations
            value = float(np.sum(sol.fun ** 2))
            best_obj = value if best_obj is None else min(best_obj, value)
            if value > 1e-12:
                continue
            x = sol.x.reshape(order, order)
            x = _refine(np.where(x < 1e-12 * max(1.0, rho), 0.0, x), obj, exact_targets)
            for cand_x, integral in _candidate_snaps(x):
                found = _verify_candidate(cand_x, target, integral, match_tol * max(1.0, rho))
                if found:
                    cand, residual = found
                    log.debug("realizer of order %d found after %d evaluations", order, evaluations)
                    return SearchResult(cand, evaluations, value, order, seed, residual)
    return SearchResult(None, evaluations, best_obj, None, seed, None)
