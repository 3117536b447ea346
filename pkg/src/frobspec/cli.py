"""Command-line front end.

Exit status: 0 every requested check holds (up to the finite horizon),
1 some check fails, 2 nothing fails but something is inconclusive,
3 input or usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import conditions as cond
from .conditions import ConditionReport, Verdict
from .errors import (
    CertificateFailed,
    EigenFailure,
    EmptyMultiset,
    FrobspecError,
    InputError,
    NotAdmissible,
    ZeroElement,
)
from .matrix_lab import (
    NonnegativeMatrix,
    analyze_spectrum,
    format_matrix,
    is_irreducible,
    is_primitive,
    net_traces_exact,
    period,
    read_matrix,
    write_matrix,
)
from .polynomials import roots_with_multiplicity
from .realization import (
    cyclic_block_lift,
    realize_irreducible,
    search_primitive_realizer,
    verify_kor_lift,
)
from .report import SCHEMA_VERSION, dumps, render_text
from .spectrum import SpectrumMultiset, match_multisets, power_map, repeat

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


def _float(tok: str, whole: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InputError(f"cannot parse {whole!r} as a complex literal") from None


def parse_complex(tok: str) -> complex:
    """Parse ``a``, ``a+bi``, ``bi``, ``i`` (``j`` also accepted)."""
    if not tok or tok.lower() in ("nan", "inf", "-inf", "+inf", "infinity"):
        raise InputError(f"cannot parse {tok!r} as a complex literal")
    if tok[-1] not in "ij":
        return complex(_float(tok, tok), 0.0)
    body = tok[:-1]
    split = None
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            split = pos
            break
    re_tok, im_tok = (body[:split], body[split:]) if split is not None else ("", body)
    re_part = _float(re_tok, tok) if re_tok else 0.0
    if im_tok in ("", "+"):
        im = 1.0
    elif im_tok == "-":
        im = -1.0
    else:
        im = _float(im_tok, tok)
    z = complex(re_part, im)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"non-finite literal {tok!r}")
    return z


def _tokens(text: str) -> list[str]:
    text = text.strip().strip("[](){}")
    return [t for t in re.split(r"[\s,;]+", text) if t]


def parse_spectrum(text: str) -> list[complex]:
    toks = _tokens(text)
    if not toks:
        raise InputError("empty spectrum")
    return [parse_complex(t) for t in toks]


def parse_polynomial(text: str) -> list:
    """Coefficients highest degree first; returns them lowest first, exact."""
    toks = _tokens(text)
    if len(toks) < 2:
        raise InputError("polynomial needs at least degree 1")
    coeffs = []
    for t in toks:
        try:
            coeffs.append(Fraction(int(t)))
        except ValueError:
            try:
                coeffs.append(Fraction(float(t)))
            except ValueError:
                raise InputError(f"cannot parse coefficient {t!r}") from None
    if coeffs[0] != 1:
        raise InputError(f"polynomial must be monic, leading coefficient is {toks[0]}")
    return coeffs[::-1]


def spectrum_from_polynomial(coeffs_low_first: list) -> SpectrumMultiset:
    roots, zeros, _ = roots_with_multiplicity(coeffs_low_first)
    if zeros:
        raise ZeroElement(f"polynomial has 0 as a root (multiplicity {zeros})")
    return SpectrumMultiset.from_pairs(roots)


def _exit_code(statuses) -> int:
    statuses = set(statuses)
    if cond.FAILS in statuses:
        return EXIT_FAIL
    if cond.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _overall(code: int) -> str:
    return {EXIT_OK: "holds", EXIT_FAIL: "fails", EXIT_INCONCLUSIVE: "inconclusive", EXIT_USAGE: "error"}[code]


def _params(args) -> dict:
    keys = ("kmax", "tol", "zero_cut", "seed", "budget", "nmax", "n_override")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _envelope(command: str, args) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "parameters": _params(args)}


# -- commands ----------------------------------------------------------------


def cmd_check(args) -> dict:
    report = _envelope("check", args)
    if args.spectrum is not None:
        spectrum = SpectrumMultiset.from_pairs((z, 1) for z in parse_spectrum(args.spectrum))
        report["input"] = {"spectrum": args.spectrum}
    else:
        spectrum = spectrum_from_polynomial(parse_polynomial(args.poly))
        report["input"] = {"polynomial": args.poly}
    report["input"]["canonical"] = str(spectrum)
    report["input"]["canonical_list"] = spectrum.as_list()
    checks = args.checks or list(cond.SUITES)
    unknown = [c for c in checks if c not in cond.SUITES]
    if unknown:
        raise InputError(f"unknown check(s): {', '.join(unknown)}")
    suites = {}
    for name in checks:
        suites[name] = cond.run_suite(name, spectrum, args.kmax, args.tol, args.n_override).to_dict()
    report["suites"] = suites
    code = _exit_code(s["status"] for s in suites.values())
    report["status"], report["exit_code"] = _overall(code), code
    return report


def _matrix_analysis(a: NonnegativeMatrix, args) -> tuple[dict, dict[str, ConditionReport]]:
    irreducible = is_irreducible(a)
    info = {
        "order": a.order,
        "integral": a.integral,
        "irreducible": irreducible,
        "period": period(a) if irreducible else None,
        "primitive": is_primitive(a),
    }
    suites: dict[str, ConditionReport] = {}
    try:
        nz = analyze_spectrum(a, args.zero_cut)
    except EmptyMultiset:
        info.update({"nonzero_spectrum": [], "nonzero_spectrum_text": "{}", "zeros_removed": a.order})
        return info, suites
    info.update({
        "nonzero_spectrum": nz.spectrum.as_list(),
        "nonzero_spectrum_text": str(nz.spectrum),
        "zeros_removed": nz.zeros_removed,
        "zero_cut": nz.zero_cut,
        "eigen_method": nz.eigen.method,
        "eigen_backward_error": nz.eigen.residual,
    })
    if not irreducible:
        info["skipped"] = "not irreducible: necessity checks skipped"
        return info, suites
    suites["irreducible"] = cond.check_irreducible_realizability(nz.spectrum, args.kmax, args.tol)
    if a.integral:
        suites["kor"] = cond.check_kor_integer_realizability(nz.spectrum, args.kmax, args.tol)
        horizon = 12
        t = net_traces_exact(a, horizon)
        bad = next((k for k, tk in enumerate(t, 1) if tk < 0 or tk % k), None)
        rep = ConditionReport(parameters={"K_max": horizon, "exact": True})
        if bad is None:
            rep.add(Verdict("exact_net_traces", cond.HOLDS, f"t_k >= 0 and k | t_k for k=1..{horizon}",
                            horizon=horizon, data={"t": t}))
        else:
            rep.add(Verdict("exact_net_traces", cond.FAILS, f"k={bad}: t_{bad} = {t[bad - 1]}",
                            data={"t": t, "k": bad}))
        suites["matrix_net_traces"] = rep
    return info, suites


def cmd_analyze(args) -> dict:
    report = _envelope("analyze", args)
    report["input"] = {"matrix_file": str(args.matrix)}
    a = read_matrix(args.matrix)
    info, suites = _matrix_analysis(a, args)
    report["analysis"] = info
    report["suites"] = {k: v.to_dict() for k, v in suites.items()}
    code = _exit_code(s.status for s in suites.values())
    report["status"], report["exit_code"] = _overall(code), code
    return report


def cmd_lift(args) -> dict:
    report = _envelope("lift", args)
    b = read_matrix(args.matrix)
    report["input"] = {"matrix_file": str(args.matrix)}
    cons: dict = {}
    if args.target is not None:
        spectrum = SpectrumMultiset.from_pairs((z, 1) for z in parse_spectrum(args.target))
        report["input"]["spectrum"] = args.target
        report["input"]["canonical"] = str(spectrum)
        try:
            cert = verify_kor_lift(spectrum, b, args.tol) if b.integral else realize_irreducible(spectrum, b, args.tol)
            cons = cert.to_dict()
            cons["status"] = "verified"
            a = cert.matrix
            code = EXIT_OK
        except CertificateFailed as exc:
            cons = exc.certificate.to_dict() if exc.certificate else {}
            cons.update({"status": "failed", "reason": str(exc)})
            a = exc.certificate.matrix if exc.certificate else None
            code = EXIT_FAIL
        except FrobspecError as exc:
            if isinstance(exc, InputError):
                raise
            cons = {"status": "failed", "reason": f"{type(exc).__name__}: {exc}"}
            a = None
            code = EXIT_FAIL
    else:
        if args.p is None:
            raise InputError("lift needs --p or --target")
        a = cyclic_block_lift(b, args.p)
        code, cons = _lift_law(a, b, args.p, args)
    if a is not None:
        cons["matrix_text"] = format_matrix(a)
        if args.emit:
            write_matrix(a, args.emit)
    report["constructions"] = {"lift": cons}
    report["status"], report["exit_code"] = _overall(code), code
    return report


def _lift_law(a: NonnegativeMatrix, b: NonnegativeMatrix, p: int, args) -> tuple[int, dict]:
    """Spectrum and period laws of the cyclic block matrix, measured."""
    irreducible = is_irreducible(a)
    b_primitive = is_primitive(b)
    measured = period(a) if irreducible else None
    cons = {"p": p, "order": a.order, "irreducible": irreducible, "measured_period": measured,
            "b_primitive": b_primitive}
    try:
        nz_a = analyze_spectrum(a, args.zero_cut).spectrum
        nz_b = analyze_spectrum(b, args.zero_cut).spectrum
    except (EmptyMultiset, EigenFailure) as exc:
        cons.update({"status": "inconclusive", "reason": str(exc)})
        return EXIT_INCONCLUSIVE, cons
    m = match_multisets(power_map(nz_a, p), repeat(nz_b, p), 1e-6 * max(1.0, nz_b.rho))
    cons["nonzero_spectrum"] = str(nz_a)
    cons["power_map_matches_copies"] = m.matched
    cons["power_map_residual"] = m.max_residual
    ok = m.matched and (not b_primitive or measured == p)
    if is_irreducible(b):
        ok = ok and irreducible
    cons["status"] = "verified" if ok else "failed"
    return (EXIT_OK if ok else EXIT_FAIL), cons


def cmd_search(args) -> dict:
    report = _envelope("search", args)
    target = SpectrumMultiset.from_pairs((z, 1) for z in parse_spectrum(args.spectrum))
    report["input"] = {"spectrum": args.spectrum, "canonical": str(target)}
    nmax = args.nmax or min(8, max(target.n, 4))
    try:
        res = search_primitive_realizer(target, nmax, args.budget, args.seed)
    except NotAdmissible as exc:
        report["constructions"] = {"search": {"status": "not-admissible", "reason": str(exc)}}
        report["status"], report["exit_code"] = _overall(EXIT_FAIL), EXIT_FAIL
        return report
    cons = res.to_dict()
    if res.matrix is not None:
        cons["matrix_text"] = format_matrix(res.matrix)
        if args.emit:
            write_matrix(res.matrix, args.emit)
        code = EXIT_OK
    else:
        code = EXIT_INCONCLUSIVE
    report["constructions"] = {"search": cons}
    report["status"], report["exit_code"] = _overall(code), code
    return report


def cmd_batch(args) -> dict:
    report = _envelope("batch", args)
    directory = Path(args.directory)
    report["input"] = {"directory": str(args.directory)}
    if not directory.is_dir():
        raise InputError(f"{directory} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.is_file() and not p.name.startswith("."))
    if not files:
        raise InputError(f"{directory} contains no matrix files")
    entries, errors = [], []
    counts = {"matrices": 0, "irreducible": 0, "pass": 0, "fail": 0, "inconclusive": 0, "skipped": 0, "unreadable": 0}
    for path in files:
        try:
            a = read_matrix(path)
            info, suites = _matrix_analysis(a, args)
        except (FrobspecError, OSError, UnicodeDecodeError) as exc:
            errors.append(f"{path.name}: {exc}")
            counts["unreadable"] += 1
            entries.append({"file": path.name, "status": "unreadable", "error": str(exc)})
            continue
        counts["matrices"] += 1
        counts["irreducible"] += bool(info["irreducible"])
        if not suites:
            status = "skipped"
            counts["skipped"] += 1
        else:
            status = _overall(_exit_code(s.status for s in suites.values()))
            counts[{"holds": "pass", "fails": "fail", "inconclusive": "inconclusive"}[status]] += 1
        entries.append({"file": path.name, "status": status, "analysis": info,
                        "suites": {k: v.to_dict() for k, v in suites.items()}})
    report["batch"] = {"counts": counts, "entries": entries}
    report["errors"] = errors
    if counts["fail"]:
        code = EXIT_FAIL
    elif counts["inconclusive"] or counts["unreadable"]:
        code = EXIT_INCONCLUSIVE if counts["matrices"] else EXIT_USAGE
    else:
        code = EXIT_OK
    report["status"], report["exit_code"] = _overall(code), code
    return report


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kmax", type=int, default=None, help="horizon for infinite condition families")
    common.add_argument("--tol", type=float, default=cond.DEFAULT_TOL, help="relative tolerance (default 1e-8)")
    common.add_argument("--zero-cut", type=float, default=None, help="eigenvalues at or below this modulus count as zero")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=100_000, help="objective evaluations for search")
    common.add_argument("--out", type=Path, default=None, help="write the structured report here")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="frobspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="run condition suites on a spectrum or polynomial")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spectrum", help="complex literals, e.g. '[2, -1, -1]' or '1+2i 1-2i 3'")
    src.add_argument("--poly", help="monic coefficients, highest degree first, e.g. '1 0 -2'")
    p.add_argument("--checks", type=lambda s: [c for c in re.split(r"[\s,]+", s) if c],
                   help=f"comma separated subset of: {', '.join(cond.SUITES)} (default: all)")
    p.add_argument("--n-override", type=int, default=None, help="matrix order for the Loewy-London inequalities")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("analyze", parents=[common], help="analyze a matrix file")
    p.add_argument("matrix", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lift", parents=[common], help="cyclic block lift of a matrix")
    p.add_argument("matrix", type=Path, help="matrix file holding B")
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--p", type=int, help="period of the lift")
    how.add_argument("--target", help="target spectrum; p and the quotient are derived and verified")
    p.add_argument("--emit", type=Path, default=None, help="write the lifted matrix here")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("search", parents=[common], help="search for a primitive realizer")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--nmax", type=int, default=None, help="largest matrix order to try (<= 8)")
    p.add_argument("--emit", type=Path, default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("batch", parents=[common], help="necessity checks over a directory of matrix files")
    p.add_argument("directory", type=Path)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.kmax is not None and args.kmax < 1:
        print("error: --kmax must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = args.func(args)
    except (InputError, ZeroElement, EmptyMultiset, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render_text(report))
    if args.out:
        args.out.write_text(dumps(report))
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
