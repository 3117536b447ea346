"""Acceptance criteria, each run at its stated tolerance and time limit.

Every test records one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from frobspec.cli import main
from frobspec.conditions import (
    FAILS,
    HOLDS,
    check_boyle_handelman,
    check_frobenius_set,
    check_kor_integer_realizability,
    check_positivity_propagation,
    check_trace_structure,
    check_trace_conditions,
)
from frobspec.matrix_lab import (
    _irreducible_by_powers,
    _primitive_by_powers,
    analyze_spectrum,
    charpoly_exact,
    is_irreducible,
    is_primitive,
    net_traces_exact,
    nonzero_spectrum,
    period,
    write_matrix,
)
from frobspec.realization import (
    cyclic_block_lift,
    quotient_spectrum,
    search_primitive_realizer,
    verify_kor_lift,
)
from frobspec.sampling import random_irreducible, random_matrix, random_primitive_integer
from frobspec.spectrum import canonicalize, multiset_equal, power_map, repeat
from frobspec.symmetric import (
    PowerSumSequence,
    coefficients_from_spectrum,
    divisors,
    mobius,
    power_sums_from_coefficients,
)

SEED = 20240501


def test_criterion_1_irreducible_necessity(criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    failures = []
    for i in range(200):
        a = random_irreducible(rng, int(rng.integers(1, 9)), float(rng.uniform(0.1, 0.4)))
        assert is_irreducible(a)
        s = nonzero_spectrum(a)
        verdicts = [*check_frobenius_set(s), check_trace_conditions(s, 30, 1e-8), check_positivity_propagation(s, 30)]
        bad = [v.condition_id for v in verdicts if v.status != HOLDS]
        if bad:
            failures.append((i, bad))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    criterion(1, "random irreducible spectra pass Frobenius/traces/positivity", ok,
              f"{200 - len(failures)}/200 pass in {elapsed:.2f}s (limit 30s)" + (f"; first failures {failures[:3]}" if failures else ""))
    assert ok


def test_criterion_2_integer_necessity(criterion):
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    failures = []
    for i in range(100):
        a = random_irreducible(rng, int(rng.integers(1, 9)), float(rng.uniform(0.1, 0.4)), integral=True)
        assert a.integral and is_irreducible(a)
        t = net_traces_exact(a, 12)
        poly = charpoly_exact(a)
        traces_ok = all(isinstance(tk, int) and tk >= 0 and tk % k == 0 for k, tk in enumerate(t, 1))
        poly_ok = all(isinstance(c, int) for c in poly) and poly[-1] == 1
        if not (traces_ok and poly_ok):
            failures.append(i)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    criterion(2, "0/1 irreducible: exact t_k >= 0, k | t_k (k <= 12), integer char. polynomial", ok,
              f"{100 - len(failures)}/100 pass in {elapsed:.2f}s (limit 30s)")
    assert ok


@pytest.fixture(scope="module")
def lifted_instances():
    rng = np.random.default_rng(SEED + 2)
    start = time.perf_counter()
    out = []
    for _ in range(50):
        b = random_primitive_integer(rng, int(rng.integers(1, 6)), float(rng.uniform(0.2, 0.6)), max_entry=3)
        nz_b = nonzero_spectrum(b)
        for p in (2, 3, 4, 5):
            a = cyclic_block_lift(b, p)
            out.append((b, p, a, nz_b, nonzero_spectrum(a)))
    return out, time.perf_counter() - start


def test_criterion_3_lift_round_trip(criterion, lifted_instances):
    instances, build_time = lifted_instances
    start = time.perf_counter()
    failures = []
    worst = 0.0
    for idx, (b, p, a, nz_b, nz_a) in enumerate(instances):
        ok_struct = is_irreducible(a) and period(a) == p and is_primitive(b)
        ok_power = multiset_equal(power_map(nz_a, p), repeat(nz_b, p), 1e-6)
        q = quotient_spectrum(nz_a, p)
        ok_quot = multiset_equal(q.lambda1, nz_b, 1e-6)
        worst = max(worst, q.copy_check_residual)
        if not (ok_struct and ok_power and ok_quot):
            failures.append((idx, ok_struct, ok_power, ok_quot))
    elapsed = build_time + time.perf_counter() - start
    ok = not failures and elapsed < 60
    criterion(3, "cyclic block lift: period p, power map = p copies, quotient inverts", ok,
              f"{len(instances) - len(failures)}/{len(instances)} pass in {elapsed:.2f}s (limit 60s), "
              f"worst transfer residual {worst:.1e}")
    assert ok


def test_criterion_4_power_sum_transfer(criterion, lifted_instances):
    instances, _ = lifted_instances
    failures = []
    exact_checked = 0
    for idx, (b, p, a, nz_b, nz_a) in enumerate(instances):
        ps_a, ps_b = PowerSumSequence(nz_a), PowerSumSequence(nz_b)
        # normalized sums: s_k / rho**k, with rho(Lambda_B) = rho(Lambda_A)**p
        vanish = all(abs(ps_a.normalized(k)) <= 1e-6 for k in range(1, 10 * p + 1) if k % p)
        transfer = all(abs(ps_a.normalized(k * p) - p * ps_b.normalized(k)) <= 1e-6 for k in range(1, 11))
        t_a = net_traces_exact(a, 24)
        t_b = net_traces_exact(b, 24 // p)
        exact = all(t_a[p * k - 1] == p * t_b[k - 1] for k in range(1, 24 // p + 1))
        exact_checked += 1
        if not (vanish and transfer and exact):
            failures.append((idx, vanish, transfer, exact))
    ok = not failures
    criterion(4, "power-sum transfer s_k = 0 (p !| k), s_kp = p s_k(B), exact t_pk = p t_k(B)", ok,
              f"{len(instances) - len(failures)}/{len(instances)} pass ({exact_checked} integral, pk <= 24)")
    assert ok


def test_criterion_5_decision_table(criterion):
    r2 = math.sqrt(2)
    rows = {}

    s = canonicalize([r2, -r2])
    kor = check_kor_integer_realizability(s, 30)
    cert = verify_kor_lift(s, [[2]])
    rows["{sqrt2,-sqrt2} kor + lift [[2]]"] = kor.status == HOLDS and cert.verified and cert.p == 2

    fr = {v.condition_id: v for v in check_frobenius_set(canonicalize([2, -2, 1]))}
    rot = fr["frobenius.rotation"]
    rows["{2,-2,1} rotation witness -1"] = rot.status == FAILS and rot.data["unmatched"] == [-1.0]

    tr = check_trace_conditions(canonicalize([-1]), 30)
    rows["{-1} fails at k=1"] = tr.status == FAILS and tr.data["k"] == 1

    st = {v.condition_id: v for v in check_trace_structure(canonicalize([1, -1, -1]))}
    mult = st["structure.multiplicity"]
    rows["{1,-1,-1} m(-1)=2"] = mult.status == FAILS and mult.data["lambda"] == -1 and mult.data["m_lambda"] == 2

    target = canonicalize([2, -1, -1])
    bh = check_boyle_handelman(target, 30)
    res = search_primitive_realizer(target, N_max=3, budget=100_000, seed=0)
    found = (
        res.matrix is not None and res.evaluations <= 100_000 and res.matrix.order == 3
        and is_primitive(res.matrix) and multiset_equal(nonzero_spectrum(res.matrix), target, 2e-6)
    )
    rows["{2,-1,-1} BH + search 3x3"] = bh.status == HOLDS and found

    ok = all(rows.values())
    criterion(5, "curated decision table", ok,
              ", ".join(f"{k}: {'ok' if v else 'WRONG'}" for k, v in rows.items())
              + f" (search used {res.evaluations} evaluations)")
    assert ok


def test_criterion_6_oracle_equivalences(criterion):
    parts = {}
    parts["mobius divisor sums n <= 5000"] = all(
        sum(mobius(d) for d in divisors(n)) == (1 if n == 1 else 0) for n in range(1, 5001)
    )

    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        n_pairs = int(rng.integers(0, n // 2 + 1))
        radii = rng.uniform(0.05, 2.0, n)
        angles = rng.uniform(0, 2 * math.pi, n_pairs)
        vals = [r * complex(math.cos(t), math.sin(t)) for r, t in zip(radii, angles)]
        vals += [v.conjugate() for v in vals]
        vals += list(radii[2 * n_pairs:] * rng.choice([-1.0, 1.0], n - 2 * n_pairs))
        s = canonicalize(vals)
        K = 30
        newton = power_sums_from_coefficients(coefficients_from_spectrum(s), K)
        ps = PowerSumSequence(s)
        for k in range(1, K + 1):
            # relative to sum |lambda|^k, the natural size of s_k
            scale = max(1.0, math.fsum(m * abs(v) ** k for v, m in s.entries))
            worst = max(worst, abs(newton[k - 1] - ps.real(k)) / scale)
    parts["Newton round trip"] = worst <= 1e-8

    rng = np.random.default_rng(SEED + 4)
    agree_irr = agree_prim = True
    for _ in range(200):
        a = random_matrix(rng, int(rng.integers(1, 11)), float(rng.uniform(0.05, 0.5)))
        adj = a.support()
        agree_irr &= _irreducible_by_powers(adj) == is_irreducible(a)
        graph_primitive = is_irreducible(a) and period(a) == 1
        agree_prim &= _primitive_by_powers(adj) == graph_primitive
    parts["irreducibility graph vs (I+A)^(N-1)"] = agree_irr
    parts["primitivity period-1 vs A^((N-1)^2+1)"] = agree_prim

    ok = all(parts.values())
    criterion(6, "oracle equivalences", ok,
              ", ".join(f"{k}: {'ok' if v else 'DISAGREE'}" for k, v in parts.items())
              + f" (Newton worst relative error {worst:.1e})")
    assert ok


def test_criterion_7_determinism(criterion, tmp_path):
    d = tmp_path / "mats"
    d.mkdir()
    rng = np.random.default_rng(SEED + 5)
    for i in range(6):
        write_matrix(random_irreducible(rng, 2 + i, 0.3, integral=bool(i % 2)), d / f"m{i}.txt")
    runs = {
        "check": ["check", "--spectrum", "2 -1 -1 1+i 1-i", "--seed", "7"],
        "batch": ["batch", str(d), "--seed", "7"],
    }
    same = {}
    for name, argv in runs.items():
        blobs = []
        for rep in range(3):
            out = tmp_path / f"{name}{rep}.json"
            main([*argv, "--out", str(out)])
            blobs.append(out.read_bytes())
        same[name] = len(set(blobs)) == 1 and len(blobs[0]) > 0
    ok = all(same.values())
    criterion(7, "byte-identical reports for fixed seed", ok,
              ", ".join(f"{k}: {'identical' if v else 'DIFFER'}" for k, v in same.items()))
    assert ok
