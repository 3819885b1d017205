"""Command-line surface: compute optima over grids, emit and verify
certificates, evaluate bounds and thresholds, and run monotonicity sweeps.

Exit codes: 0 on success / verdict true, 1 when a requested check has verdict
false, 2 on usage or parse errors.  All rational quantities are printed as
exact ``num/den`` strings; floats appear only in integrator output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .bounds import (
    check_impexp_relation,
    existence_step_threshold,
    upper_bound_explicit,
    upper_bound_implicit,
)
from .certificates import (
    CertificateParseError,
    certificate_from_text,
    certificate_to_text,
    verify_certificate,
)
from .integrate import BUILTIN_PROBLEMS, monotonicity_sweep
from .optimize import (
    DEFAULT_TOLERANCE,
    NoPositiveSSP,
    SSPQuery,
    extract_optimal_method,
    optimal_ssp,
    support_analysis,
)
from .order_conditions import MethodCoefficients, UNBOUNDED, Variant


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"expected an exact fraction like 2/3 or 0.25, got {text!r}"
        ) from None


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected N or A..B, got {text!r}"
        ) from None
    if lo > hi or lo < 1:
        raise argparse.ArgumentTypeError(f"empty or invalid range {text!r}")
    return lo, hi


def _parse_variant(text: str) -> Variant:
    try:
        return Variant(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"variant must be 'explicit' or 'implicit', got {text!r}"
        ) from None


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def method_to_json(method: MethodCoefficients) -> str:
    return json.dumps(
        {
            "k": method.k,
            "explicit": method.explicit,
            "alpha": [_fraction_str(a) for a in method.alpha],
            "beta": [_fraction_str(b) for b in method.beta],
        },
        indent=2,
    )


def method_from_json(text: str) -> MethodCoefficients:
    data = json.loads(text)
    try:
        return MethodCoefficients(
            k=int(data["k"]),
            explicit=bool(data["explicit"]),
            alpha=tuple(Fraction(a) for a in data["alpha"]),
            beta=tuple(Fraction(b) for b in data["beta"]),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid method file: {exc}") from exc


def _worker_count() -> int:
    env = os.environ.get("SSPLMM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _cert_filename(variant: Variant, k: int, p: int) -> str:
    return f"cert_{variant.value}_k{k}_p{p}.txt"


def _cmd_compute(args) -> int:
    k_lo, k_hi = args.k
    p_lo, p_hi = args.p
    variant = args.variant
    cells = [
        (k, p)
        for k in range(k_lo, k_hi + 1)
        for p in range(p_lo, p_hi + 1)
    ]
    queries = [
        SSPQuery(k=k, p=p, variant=variant, tolerance=args.tol) for k, p in cells
    ]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        brackets = list(pool.map(optimal_ssp, queries))

    cert_dir: Optional[Path] = args.cert_dir
    rows = []
    for (k, p), bracket in zip(cells, brackets):
        cert_path = ""
        if cert_dir is not None:
            cert_dir.mkdir(parents=True, exist_ok=True)
            path = cert_dir / _cert_filename(variant, k, p)
            path.write_text(certificate_to_text(bracket.dual_at_hi))
            cert_path = str(path)
        rows.append(
            {
                "k": k,
                "p": p,
                "variant": variant.value,
                "r_lo": _fraction_str(bracket.r_lo),
                "r_hi": _fraction_str(bracket.r_hi),
                "exact": "yes" if bracket.exact else "no",
                "certificate": cert_path,
            }
        )

    out = args.output.open("w") if args.output else sys.stdout
    try:
        if args.format == "csv":
            writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        else:
            header = f"{'k':>3} {'p':>3} {'variant':>9} {'r_lo':>24} {'r_hi':>24} {'exact':>6}"
            print(header, file=out)
            for row in rows:
                print(
                    f"{row['k']:>3} {row['p']:>3} {row['variant']:>9} "
                    f"{row['r_lo']:>24} {row['r_hi']:>24} {row['exact']:>6}",
                    file=out,
                )
    finally:
        if args.output:
            out.close()
    return 0


def _cmd_certify(args) -> int:
    try:
        text = args.file.read_text()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    try:
        cert = certificate_from_text(text)
    except CertificateParseError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return 2
    report = verify_certificate(cert)
    print(f"certificate: k={cert.target_k} degree<={cert.degree_bound} "
          f"r={_fraction_str(cert.target_r)} system={cert.system.value}")
    for check in report.conditions:
        status = "ok      " if check.holds else "VIOLATED"
        print(f"  {status} {check.label:<28} value = {check.value}")
    print(f"verdict: {'valid' if report.valid else 'invalid'}")
    return 0 if report.valid else 1


def _cmd_bounds(args) -> int:
    k, p = args.k, args.p
    if args.variant is Variant.EXPLICIT:
        report = upper_bound_explicit(k, p)
    else:
        try:
            report = upper_bound_implicit(k, p)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    cert_path = ""
    if args.cert_out:
        args.cert_out.write_text(certificate_to_text(report.certificate))
        cert_path = str(args.cert_out)
    if args.json:
        print(
            json.dumps(
                {
                    "k": k,
                    "p": p,
                    "variant": args.variant.value,
                    "bound": _fraction_str(report.bound_value),
                    "certificate": cert_path,
                },
                indent=2,
            )
        )
    else:
        print(f"bound = {_fraction_str(report.bound_value)}")
        if cert_path:
            print(f"certificate written to {cert_path}")
    return 0


def _cmd_threshold(args) -> int:
    value = existence_step_threshold(args.p)
    if args.json:
        print(json.dumps({"p": args.p, "threshold": value}))
    else:
        print(value)
    return 0


def _cmd_impexp(args) -> int:
    k, p = args.k, args.p
    c_exp = optimal_ssp(SSPQuery(k=k, p=p, variant=Variant.EXPLICIT, tolerance=args.tol))
    c_imp = optimal_ssp(
        SSPQuery(k=k, p=2 * p, variant=Variant.IMPLICIT, tolerance=args.tol)
    )
    report = check_impexp_relation(k, p, c_exp, c_imp)
    payload = {
        "k": k,
        "p": p,
        "implicit_lower": _fraction_str(report.implicit_lower),
        "doubled_explicit_upper": _fraction_str(report.doubled_explicit_upper),
        "margin": _fraction_str(report.margin),
        "squared_certificate_valid": report.squared_ok,
        "verdict": report.verdict,
    }
    print(json.dumps(payload, indent=2))
    return 0 if report.verdict else 1


def _cmd_validate(args) -> int:
    try:
        method = method_from_json(args.method.read_text())
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    problem = BUILTIN_PROBLEMS[args.problem]()
    try:
        h_values = [float(Fraction(h)) for h in args.h.split(",") if h]
    except (ValueError, ZeroDivisionError):
        print(f"error: bad step-size list {args.h!r}", file=sys.stderr)
        return 2
    report = monotonicity_sweep(method, problem, h_values, args.steps)
    if args.json:
        print(report.to_json())
    else:
        limit = "unbounded" if report.h_limit is None else f"{report.h_limit:.6g}"
        print(f"problem: {report.problem_name}   guaranteed for h <= {limit}")
        for entry in report.entries:
            tag = "guaranteed" if entry.guaranteed else "observational"
            state = "monotone" if entry.monotone else "VIOLATION"
            print(
                f"  h = {entry.h:<10.6g} {tag:<14} {state:<10} "
                f"max_violation = {entry.record.max_violation:.3e}"
            )
        print("all guaranteed runs monotone" if report.guaranteed_all_monotone
              else "guaranteed run violated monotonicity")
    return 0 if report.guaranteed_all_monotone else 1


def _cmd_support(args) -> int:
    query = SSPQuery(k=args.k, p=args.p, variant=args.variant, tolerance=args.tol)
    bracket = optimal_ssp(query)
    try:
        report = support_analysis(bracket)
        method = extract_optimal_method(bracket)
    except NoPositiveSSP as exc:
        print(json.dumps({"k": args.k, "p": args.p, "error": str(exc)}))
        return 1
    payload = {
        "k": args.k,
        "p": args.p,
        "variant": args.variant.value,
        "r_lo": _fraction_str(bracket.r_lo),
        "r_hi": _fraction_str(bracket.r_hi),
        "exact": bracket.exact,
        "delta_support_allowed": list(report.delta_support_allowed),
        "beta_support_allowed": list(report.beta_support_allowed),
        "rank": report.rank,
        "unique": report.unique,
        "approximate": report.approximate,
        "method_alpha": [_fraction_str(a) for a in method.alpha],
        "method_beta": [_fraction_str(b) for b in method.beta],
    }
    print(json.dumps(payload, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssplmm",
        description="Exact optimizer and certificates for monotone multistep methods",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="bracket optima over a (k, p) grid")
    p_compute.add_argument("--variant", type=_parse_variant, required=True)
    p_compute.add_argument("--k", type=_parse_range, required=True, metavar="A..B")
    p_compute.add_argument("--p", type=_parse_range, required=True, metavar="A..B")
    p_compute.add_argument("--tol", type=_parse_fraction, default=DEFAULT_TOLERANCE)
    p_compute.add_argument("--format", choices=("table", "csv"), default="table")
    p_compute.add_argument("--cert-dir", type=Path, default=None)
    p_compute.add_argument("--output", type=Path, default=None)
    p_compute.set_defaults(func=_cmd_compute)

    p_certify = sub.add_parser("certify", help="verify a certificate file")
    p_certify.add_argument("file", type=Path)
    p_certify.set_defaults(func=_cmd_certify)

    p_bounds = sub.add_parser("bounds", help="closed-form ceiling with certificate")
    p_bounds.add_argument("--variant", type=_parse_variant, required=True)
    p_bounds.add_argument("--k", type=int, required=True)
    p_bounds.add_argument("--p", type=int, required=True)
    p_bounds.add_argument("--cert-out", type=Path, default=None)
    p_bounds.add_argument("--json", action="store_true")
    p_bounds.set_defaults(func=_cmd_bounds)

    p_threshold = sub.add_parser(
        "threshold", help="step count guaranteeing a positive coefficient"
    )
    p_threshold.add_argument("--p", type=int, required=True)
    p_threshold.add_argument("--json", action="store_true")
    p_threshold.set_defaults(func=_cmd_threshold)

    p_impexp = sub.add_parser(
        "impexp", help="check C_imp(k,2p) <= 2 C_exp(k,p) on computed brackets"
    )
    p_impexp.add_argument("--k", type=int, required=True)
    p_impexp.add_argument("--p", type=int, required=True)
    p_impexp.add_argument("--tol", type=_parse_fraction, default=DEFAULT_TOLERANCE)
    p_impexp.set_defaults(func=_cmd_impexp)

    p_validate = sub.add_parser("validate", help="monotonicity sweep for a method")
    p_validate.add_argument("--method", type=Path, required=True)
    p_validate.add_argument(
        "--problem", choices=sorted(BUILTIN_PROBLEMS), required=True
    )
    p_validate.add_argument("--h", type=str, required=True, metavar="H1,H2,...")
    p_validate.add_argument("--steps", type=int, default=200)
    p_validate.add_argument("--json", action="store_true")
    p_validate.set_defaults(func=_cmd_validate)

    p_support = sub.add_parser(
        "support", help="binding-set analysis of an optimal bracket"
    )
    p_support.add_argument("--variant", type=_parse_variant, required=True)
    p_support.add_argument("--k", type=int, required=True)
    p_support.add_argument("--p", type=int, required=True)
    p_support.add_argument("--tol", type=_parse_fraction, default=DEFAULT_TOLERANCE)
    p_support.set_defaults(func=_cmd_support)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
