"""Realizability condition checkers.

Every checker returns :class:`Verdict` objects gathered in a
:class:`ConditionReport`.  Families indexed by all ``k >= 1`` are checked
up to a finite horizon and say so: a passing verdict carries the horizon
and prints as ``holds (finite horizon K=...)``.

Power sums are compared in normalized form ``s_k / rho**k`` so tolerances
are relative and nothing overflows; the raw ``s_k`` is still reported in
witnesses when it is representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import Overflow
from .spectrum import (
    SpectrumMultiset,
    format_complex,
    match_multisets,
    peripheral,
    root_of_unity,
    rotate,
)
from .symmetric import (
    NetTraceSequence,
    PowerSumSequence,
    coefficients_from_spectrum,
    divisors,
    is_integer_polynomial,
    mobius,
    power_sums_from_coefficients,
)

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not-applicable"

DEFAULT_TOL = 1e-8


def _num(z):
    """JSON-friendly number: real floats stay floats, complex becomes [re, im]."""
    if isinstance(z, complex):
        return z.real if z.imag == 0 else [z.real, z.imag]
    return z


@dataclass
class Verdict:
    condition_id: str
    status: str
    witness: str = ""
    residual: float | None = None
    horizon: int | None = None
    data: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.status == HOLDS and self.horizon is not None:
            return f"holds (finite horizon K={self.horizon})"
        return self.status

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "status": self.status,
            "label": self.label,
            "witness": self.witness,
            "residual": self.residual,
            "horizon": self.horizon,
            "data": self.data,
        }


@dataclass
class ConditionReport:
    verdicts: list[Verdict] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    def add(self, *verdicts: Verdict) -> None:
        for v in verdicts:
            if any(x.condition_id == v.condition_id for x in self.verdicts):
                raise ValueError(f"duplicate condition id {v.condition_id!r}")
            self.verdicts.append(v)

    def __getitem__(self, condition_id: str) -> Verdict:
        for v in self.verdicts:
            if v.condition_id == condition_id:
                return v
        raise KeyError(condition_id)

    def __contains__(self, condition_id) -> bool:
        return any(v.condition_id == condition_id for v in self.verdicts)

    @property
    def status(self) -> str:
        statuses = {v.status for v in self.verdicts}
        if FAILS in statuses:
            return FAILS
        if INCONCLUSIVE in statuses:
            return INCONCLUSIVE
        return HOLDS

    @property
    def passed(self) -> bool:
        return self.status == HOLDS

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == FAILS]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "parameters": self.parameters,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def default_horizon(spectrum: SpectrumMultiset) -> int:
    p = max(1, peripheral(spectrum).p)
    return max(50, 4 * spectrum.n * p)


def _abs_tol(spectrum: SpectrumMultiset, tol: float) -> float:
    return max(spectrum.tol, tol * spectrum.rho)


def _raw_power_sum(ps: PowerSumSequence, k: int):
    try:
        return _num(ps.value(k))
    except Overflow:
        return None


# -- trace conditions -------------------------------------------------------


def check_trace_conditions(
    spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL, ps: PowerSumSequence | None = None
) -> Verdict:
    """``s_k >= -tol * rho**k`` for ``k = 1..K_max`` (and ``s_k`` real)."""
    K = K_max or default_horizon(spectrum)
    ps = ps or PowerSumSequence(spectrum)
    worst = math.inf
    worst_imag = 0.0
    for k in range(1, K + 1):
        s = ps.normalized(k)
        worst_imag = max(worst_imag, abs(s.imag))
        if abs(s.imag) > tol:
            return Verdict(
                "traces", FAILS, f"s_{k} is not real (normalized imaginary part {s.imag:.3e})",
                residual=abs(s.imag), data={"k": k, "s_k": _raw_power_sum(ps, k), "normalized": _num(s)},
            )
        if s.real < -tol:
            raw = _raw_power_sum(ps, k)
            shown = format_complex(complex(raw)) if isinstance(raw, float) else f"{s.real:.6g}*rho^{k}"
            return Verdict(
                "traces", FAILS, f"k={k}: s_{k} = {shown} < 0",
                residual=s.real, data={"k": k, "s_k": raw, "normalized": s.real},
            )
        worst = min(worst, s.real)
    return Verdict(
        "traces", HOLDS, f"s_k >= 0 for k=1..{K}", residual=worst, horizon=K,
        data={"min_normalized_s_k": worst, "max_normalized_imag": worst_imag},
    )


# -- structure forced by eventually nonnegative traces -----------------------


def _conjugate_verdict(cid: str, spectrum: SpectrumMultiset, atol: float) -> Verdict:
    m = match_multisets(spectrum, spectrum.conjugate(), atol)
    if m.matched:
        return Verdict(cid, HOLDS, "multiset is closed under conjugation", residual=m.max_residual)
    missing = [z.conjugate() for z in m.unmatched_left]
    return Verdict(
        cid, FAILS, "conjugate missing for " + ", ".join(format_complex(z.conjugate()) for z in missing),
        residual=None, data={"unmatched": [_num(z.conjugate()) for z in missing]},
    )


def _rho_in_verdict(cid: str, spectrum: SpectrumMultiset, atol: float) -> Verdict:
    rho = spectrum.rho
    m = spectrum.multiplicity(rho, atol)
    if m:
        return Verdict(cid, HOLDS, f"rho = {rho:.12g} is an element (multiplicity {m})", data={"rho": rho})
    return Verdict(cid, FAILS, f"rho = {rho:.12g} is not an element", data={"rho": rho})


def check_trace_structure(spectrum: SpectrumMultiset, tol: float = DEFAULT_TOL) -> list[Verdict]:
    """The four structural consequences of eventually nonnegative traces."""
    atol = _abs_tol(spectrum, tol)
    rho = spectrum.rho
    per = peripheral(spectrum, rho, atol)
    m_rho = spectrum.multiplicity(rho, atol)
    out = [_conjugate_verdict("structure.conjugate", spectrum, atol), _rho_in_verdict("structure.rho_in", spectrum, atol)]

    heavier = [(v, m) for v, m in per.entries if m > m_rho]
    if heavier:
        v, m = heavier[0]
        out.append(Verdict(
            "structure.multiplicity", FAILS, f"m({format_complex(v)}) = {m} > m(rho) = {m_rho}",
            data={"lambda": _num(v), "m_lambda": m, "m_rho": m_rho},
        ))
    else:
        out.append(Verdict("structure.multiplicity", HOLDS, f"m(rho) = {m_rho} is maximal on the peripheral circle",
                           data={"m_rho": m_rho}))

    if m_rho == 0:
        out.append(Verdict("structure.rotation", INCONCLUSIVE, "rho is not an element; p is undefined"))
    else:
        top = [v for v, m in per.entries if m == m_rho]
        p = len(top)
        zeta = root_of_unity(p)
        per_set = per.as_multiset(spectrum.tol)
        m = match_multisets(rotate(per_set, zeta), per_set, atol)
        if m.matched:
            out.append(Verdict("structure.rotation", HOLDS, f"peripheral set invariant under exp(2*pi*i/{p})",
                               residual=m.max_residual, data={"p": p}))
        else:
            out.append(Verdict(
                "structure.rotation", FAILS,
                f"rotation by exp(2*pi*i/{p}) moves " + ", ".join(format_complex(z) for z in m.unmatched_left)
                + " off the peripheral set", data={"p": p, "unmatched": [_num(z) for z in m.unmatched_left]},
            ))
    return out


# -- Loewy-London ------------------------------------------------------------


def check_loewy_london(
    spectrum: SpectrumMultiset, n_override: int | None = None, K_max: int | None = None,
    tol: float = DEFAULT_TOL, ps: PowerSumSequence | None = None,
) -> Verdict:
    """``n**(k-1) s_{km} >= s_m**k`` for all ``m >= 1, k >= 2, mk <= K_max``.

    Both sides are divided by ``(n rho**m)**k`` before comparing.
    """
    n = n_override or spectrum.n
    K = K_max or default_horizon(spectrum)
    ps = ps or PowerSumSequence(spectrum)
    worst = math.inf
    for m in range(1, K // 2 + 1):
        sm = ps.normalized(m).real / n
        for k in range(2, K // m + 1):
            lhs = ps.normalized(k * m).real / n
            rhs = sm**k
            gap = lhs - rhs
            if gap < -tol:
                return Verdict(
                    "loewy_london", FAILS,
                    f"m={m}, k={k}: n^(k-1) s_{k * m} < s_{m}^k (n={n})",
                    residual=gap, data={"m": m, "k": k, "n": n, "normalized_gap": gap},
                )
            worst = min(worst, gap)
    return Verdict(
        "loewy_london", HOLDS, f"holds for all m*k <= {K} with n={n}",
        residual=worst if worst < math.inf else None, horizon=K, data={"n": n},
    )


def check_positivity_propagation(
    spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL,
    ps: PowerSumSequence | None = None,
) -> Verdict:
    """If ``s_m > 0`` then ``s_{km} > 0``; strictness means beyond ``tol * rho**(km)``."""
    K = K_max or default_horizon(spectrum)
    ps = ps or PowerSumSequence(spectrum)
    borderline = None
    worst = math.inf
    for m in range(1, K // 2 + 1):
        if ps.normalized(m).real <= tol:
            continue
        for k in range(2, K // m + 1):
            s = ps.normalized(k * m).real
            if s <= -tol:
                return Verdict(
                    "positivity", FAILS, f"s_{m} > 0 but s_{k * m} = {s:.6g}*rho^{k * m} <= 0",
                    residual=s, data={"m": m, "k": k, "normalized_s_km": s},
                )
            if s <= tol and borderline is None:
                borderline = (m, k, s)
            worst = min(worst, s)
    data = {"threshold": tol}
    if borderline:
        m, k, s = borderline
        data.update({"m": m, "k": k, "normalized_s_km": s})
        return Verdict("positivity", INCONCLUSIVE, f"s_{m} > 0 but s_{k * m} is within +-tol of 0",
                       residual=s, horizon=K, data=data)
    return Verdict("positivity", HOLDS, f"s_m > 0 implies s_km > 0 for km <= {K}",
                   residual=worst if worst < math.inf else None, horizon=K, data=data)


def check_odd_case_refinement(
    spectrum: SpectrumMultiset, tol: float = DEFAULT_TOL, ps: PowerSumSequence | None = None
) -> Verdict:
    """``(n-1) s_4 >= s_2**2`` when ``s_1 = 0`` and ``n`` is odd."""
    n = spectrum.n
    ps = ps or PowerSumSequence(spectrum)
    s1 = ps.normalized(1).real
    if n % 2 == 0:
        return Verdict("odd_refinement", NOT_APPLICABLE, f"n = {n} is even")
    if abs(s1) > tol:
        return Verdict("odd_refinement", NOT_APPLICABLE, f"s_1 = {s1:.6g}*rho is nonzero")
    s2 = ps.normalized(2).real
    s4 = ps.normalized(4).real
    gap = ((n - 1) * s4 - s2 * s2) / (n * n)
    if gap < -tol:
        return Verdict("odd_refinement", FAILS, f"(n-1) s_4 < s_2^2 with n={n}", residual=gap,
                       data={"n": n, "normalized_gap": gap})
    return Verdict("odd_refinement", HOLDS, f"(n-1) s_4 >= s_2^2 with n={n}", residual=gap, data={"n": n})


# -- Frobenius sets ----------------------------------------------------------


def check_frobenius_set(spectrum: SpectrumMultiset, tol: float = DEFAULT_TOL) -> list[Verdict]:
    """The four defining conditions; the rotation acts on the whole multiset."""
    atol = _abs_tol(spectrum, tol)
    rho = spectrum.rho
    per = peripheral(spectrum, rho, atol)
    out = [_conjugate_verdict("frobenius.conjugate", spectrum, atol), _rho_in_verdict("frobenius.rho_in", spectrum, atol)]

    repeated = [(v, m) for v, m in per.entries if m > 1]
    if repeated:
        v, m = repeated[0]
        out.append(Verdict("frobenius.simple_peripheral", FAILS, f"peripheral element {format_complex(v)} has multiplicity {m}",
                           data={"lambda": _num(v), "multiplicity": m}))
    else:
        out.append(Verdict("frobenius.simple_peripheral", HOLDS, f"{per.p} simple peripheral element(s)"))

    p = per.p
    zeta = root_of_unity(p)
    m = match_multisets(rotate(spectrum, zeta), spectrum, atol)
    if m.matched:
        out.append(Verdict("frobenius.rotation", HOLDS, f"invariant under exp(2*pi*i/{p})", residual=m.max_residual,
                           data={"p": p}))
    else:
        out.append(Verdict(
            "frobenius.rotation", FAILS,
            f"exp(2*pi*i/{p}) * Lambda contains " + ", ".join(format_complex(z) for z in m.unmatched_left)
            + " with no partner in Lambda",
            data={"p": p, "unmatched": [_num(z) for z in m.unmatched_left]},
        ))
    return out


def _report(spectrum, K, tol, **extra) -> ConditionReport:
    params = {"K_max": K, "tol": tol, "abs_tol": _abs_tol(spectrum, tol), "n": spectrum.n, "rho": spectrum.rho}
    params.update(extra)
    return ConditionReport(parameters=params)


def check_boyle_handelman(spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Primitive realizability: peripheral set ``{rho}`` plus traces and positivity."""
    K = K_max or default_horizon(spectrum)
    atol = _abs_tol(spectrum, tol)
    report = _report(spectrum, K, tol)
    rho = spectrum.rho
    per = peripheral(spectrum, rho, atol)
    only_rho = per.p == 1 and per.n == 1 and abs(per.entries[0][0] - rho) <= atol
    if only_rho:
        report.add(Verdict("peripheral_singleton", HOLDS, "peripheral set is {rho}"))
    else:
        shown = ", ".join(format_complex(v) + (f" (x{m})" if m > 1 else "") for v, m in per.entries)
        report.add(Verdict("peripheral_singleton", FAILS, f"peripheral set is {{{shown}}}, not {{rho}}",
                           data={"peripheral": [[_num(v), m] for v, m in per.entries]}))
    ps = PowerSumSequence(spectrum)
    report.add(check_trace_conditions(spectrum, K, tol, ps), check_positivity_propagation(spectrum, K, tol, ps))
    return report


def check_irreducible_realizability(
    spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL
) -> ConditionReport:
    """Frobenius set plus trace conditions plus positivity propagation."""
    K = K_max or default_horizon(spectrum)
    report = _report(spectrum, K, tol)
    report.add(*check_frobenius_set(spectrum, tol))
    ps = PowerSumSequence(spectrum)
    report.add(check_trace_conditions(spectrum, K, tol, ps), check_positivity_propagation(spectrum, K, tol, ps))
    return report


def exact_net_traces(int_coeffs: list[int], K: int) -> list[int]:
    """Net traces ``t_1..t_K`` of the roots of a monic integer polynomial, exactly."""
    s = power_sums_from_coefficients(int_coeffs, K)
    return [sum(mobius(k // d) * s[d - 1] for d in divisors(k)) for k in range(1, K + 1)]


def check_kor_integer_realizability(
    spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL
) -> ConditionReport:
    """Frobenius set, integer characteristic polynomial, nonnegative net traces.

    When the polynomial rounds to integers the net traces are computed
    exactly from the rounded coefficients.
    """
    K = K_max or default_horizon(spectrum)
    report = _report(spectrum, K, tol)
    report.add(*check_frobenius_set(spectrum, tol))

    poly = coefficients_from_spectrum(spectrum)
    scale = max(1.0, max(abs(c) for c in poly.coeffs))
    ok, rounded = is_integer_polynomial(poly, tol * scale)
    if ok:
        err = max(abs(c - r) for c, r in zip(poly.coeffs, rounded))
        report.add(Verdict("integer_polynomial", HOLDS, f"coefficients (low to high) {rounded}", residual=err,
                           data={"coefficients": rounded}))
        t = exact_net_traces(rounded, K)
        bad = next((k for k, tk in enumerate(t, 1) if tk < 0), None)
        data = {"exact": True, "t": t[: min(K, 24)], "divisible_by_k": all(tk % k == 0 for k, tk in enumerate(t, 1))}
        if bad is not None:
            report.add(Verdict("net_traces", FAILS, f"k={bad}: t_{bad} = {t[bad - 1]} < 0", residual=float(t[bad - 1]),
                               data={**data, "k": bad}))
        else:
            report.add(Verdict("net_traces", HOLDS, f"t_k >= 0 for k=1..{K} (exact)", residual=float(min(t)),
                               horizon=K, data=data))
        return report

    bad_coeff = next(
        (i, c) for i, c in enumerate(poly.coeffs)
        if abs((c.real if isinstance(c, complex) else c) - round(c.real if isinstance(c, complex) else c)) > tol * scale
        or (isinstance(c, complex) and abs(c.imag) > tol * scale)
    )
    i, c = bad_coeff
    report.add(Verdict("integer_polynomial", FAILS, f"coefficient of z^{i} is {format_complex(complex(c))}, not an integer",
                       data={"degree": i, "coefficient": _num(c)}))
    nt = NetTraceSequence(PowerSumSequence(spectrum))
    worst = math.inf
    for k in range(1, K + 1):
        try:
            t = nt.normalized(k)
        except OverflowError:
            report.add(Verdict("net_traces", INCONCLUSIVE, f"t_{k} / rho^{k} overflows"))
            return report
        if t < -tol:
            report.add(Verdict("net_traces", FAILS, f"k={k}: t_{k} = {t:.6g}*rho^{k} < 0", residual=t,
                               data={"exact": False, "k": k}))
            return report
        worst = min(worst, t)
    report.add(Verdict("net_traces", HOLDS, f"t_k >= 0 for k=1..{K}", residual=worst, horizon=K, data={"exact": False}))
    return report


# -- suites used by the command line -------------------------------------------


def _suite_traces(spectrum, K, tol, n_override):
    r = _report(spectrum, K, tol)
    r.add(check_trace_conditions(spectrum, K, tol))
    return r


def _suite_structure(spectrum, K, tol, n_override):
    r = _report(spectrum, K, tol)
    r.add(*check_trace_structure(spectrum, tol))
    return r


def _suite_loewy_london(spectrum, K, tol, n_override):
    r = _report(spectrum, K, tol, n_used=n_override or spectrum.n)
    ps = PowerSumSequence(spectrum)
    r.add(
        check_loewy_london(spectrum, n_override, K, tol, ps),
        check_positivity_propagation(spectrum, K, tol, ps),
        check_odd_case_refinement(spectrum, tol, ps),
    )
    return r


def _suite_frobenius(spectrum, K, tol, n_override):
    r = _report(spectrum, K, tol)
    r.add(*check_frobenius_set(spectrum, tol))
    return r


SUITES: dict[str, Callable[..., ConditionReport]] = {
    "traces": _suite_traces,
    "structure": _suite_structure,
    "loewy-london": _suite_loewy_london,
    "frobenius": _suite_frobenius,
    "boyle-handelman": lambda s, K, tol, n: check_boyle_handelman(s, K, tol),
    "irreducible": lambda s, K, tol, n: check_irreducible_realizability(s, K, tol),
    "kor": lambda s, K, tol, n: check_kor_integer_realizability(s, K, tol),
}


def run_suite(name: str, spectrum: SpectrumMultiset, K_max: int | None = None, tol: float = DEFAULT_TOL,
              n_override: int | None = None) -> ConditionReport:
    K = K_max or default_horizon(spectrum)
    return SUITES[name](spectrum, K, tol, n_override)
