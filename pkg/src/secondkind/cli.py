"""Command-line front end.

Exit codes: 0 pass, 1 condition false, 2 verification mismatch, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import cones, flow, oracle, spectra, verification
from .errors import SecondKindError

EXIT_OK, EXIT_FALSE, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2, 64

FLOW_HEADER = [
    "t", "a", "b", "c", "S", "a_over_S", "ab_over_S", "neg_c_over_S",
    "lm_over_S", "neg_lp_over_S", "neg_ric2_over_S2",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(v: float) -> str:
    """Short human-readable number; values within 5e-13 of zero print as 0."""
    if abs(v) < 5e-13:
        v = 0.0
    return f"{v:.12g}"


def _csv_num(v) -> str:
    if v is None or v != v:
        return ""
    return format(float(v), ".17g")


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, newline="\n", encoding="utf-8")
    else:
        sys.stdout.write(text)


def _abc(values) -> spectra.FirstKindEigs3:
    try:
        return spectra.FirstKindEigs3(*values)
    except SecondKindError as exc:
        raise UsageError(f"--abc: {exc}") from exc


def _parse_schouten(text: str, dim: int | None) -> spectra.SchoutenSpectrum:
    try:
        pairs = []
        for item in text.split(","):
            mu, mult = item.split(":")
            pairs.append((float(mu), int(mult)))
        s = spectra.SchoutenSpectrum.from_pairs(pairs)
    except (ValueError, SecondKindError) as exc:
        raise UsageError(f"--schouten: cannot parse {text!r} ({exc})") from exc
    if dim is not None and dim != s.dim:
        raise UsageError(f"--dim {dim} does not match total multiplicity {s.dim}")
    if not 2 <= s.dim <= 8:
        raise UsageError("dimension must lie in [2, 8]")
    return s


def cmd_spectrum(args) -> int:
    if (args.abc is None) == (args.schouten is None):
        raise UsageError("give exactly one of --abc or --schouten")
    if args.abc is not None:
        e = _abc(args.abc)
        analytic = spectra.spectrum3d(e)
        numeric = oracle.numeric_spectrum_3d(e)
    else:
        s = _parse_schouten(args.schouten, args.dim)
        analytic = spectra.spectrum_general(s)
        numeric = oracle.numeric_spectrum_general(s.diagonal(), s.dim)
    cmp = oracle.compare(analytic, numeric, args.tol)
    lines = [
        "analytic: " + " ".join(_num(v) for v in analytic.values()),
        "numeric:  " + " ".join(_num(v) for v in cmp.numeric),
        "entries:  " + "; ".join(
            f"{_num(e.value)} x{e.multiplicity} [{'+'.join(e.provenance)}]" for e in analytic.entries
        ),
        f"max_gap:  {cmp.max_abs_gap:.3e}",
        "PASS" if cmp.passed else "MISMATCH",
    ]
    print("\n".join(lines))
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "analytic", "numeric"])
        for i, (x, y) in enumerate(zip(analytic.values(), cmp.numeric)):
            w.writerow([i, _csv_num(x), _csv_num(y)])
        _write(args.out, buf.getvalue())
    return EXIT_OK if cmp.passed else EXIT_MISMATCH


def cmd_cone(args) -> int:
    e = _abc(args.abc)
    if not 1 <= args.alpha <= 5:
        raise UsageError(f"--alpha must lie in [1, 5], got {args.alpha}")
    rep = cones.condition_report(e, args.alpha, args.mode, tol=args.tol)
    fields = {
        "abc": list(e),
        "alpha": rep.alpha,
        "mode": args.mode,
        "alpha_value": rep.alpha_value,
        "f_alpha": rep.f_alpha,
        "holds": rep.holds,
        "sec_nonneg": rep.sec_nonneg,
        "ric_nonneg": rep.ric_nonneg,
        "scal_nonneg": rep.scal_nonneg,
        "pinching_ratio": rep.pinching_ratio,
        "closed_form_10_3": rep.closed_form_10_3,
        "closed_form_4": rep.closed_form_4,
        "closed_forms_agree": rep.closed_forms_agree,
    }
    for key, value in fields.items():
        shown = _num(value) if isinstance(value, float) else value
        print(f"{key}: {shown}")
    if args.out:
        _write(args.out, json.dumps(fields, indent=2) + "\n")
    if not rep.closed_forms_agree:
        return EXIT_MISMATCH
    return EXIT_OK if rep.holds else EXIT_FALSE


def cmd_flow(args) -> int:
    e = _abc(args.abc)
    if not args.h > 0:
        raise UsageError(f"--h must be positive, got {args.h}")
    if args.alpha is not None and not 1 <= args.alpha <= 5:
        raise UsageError(f"--alpha must lie in [1, 5], got {args.alpha}")
    try:
        cfg = flow.FlowConfig(h=args.h, t_max=args.tmax, blowup_cap=args.cap, sample_every=args.sample_every)
    except SecondKindError as exc:
        raise UsageError(str(exc)) from exc
    try:
        trace = flow.integrate(e, cfg)
    except SecondKindError as exc:
        print(f"FAIL integration: {exc}", file=sys.stderr)
        return EXIT_MISMATCH

    cols = trace.columns()
    header = list(FLOW_HEADER)
    extra = None
    if args.alpha is not None:
        header.append("f_alpha_over_S")
        extra = trace.functional_over_S(args.alpha, "f")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, t in enumerate(trace.t):
        row = [t, *trace.abc[i], cols["S"][i]] + [cols[name][i] for name in flow.QUANTITY_NAMES]
        if extra is not None:
            row.append(extra[i])
        w.writerow([_csv_num(v) for v in row])

    worst = trace.worst_decrease(trace.quantity_matrix())
    if extra is not None:
        worst = min(worst, trace.worst_decrease(extra))
    ok = worst >= -args.tol
    verdict = (
        f"{'MONOTONE' if ok else 'NOT MONOTONE'} worst_step_decrease={max(0.0, -worst):.3e} "
        f"samples={len(trace.t)} halt={trace.halt_reason} t_end={trace.t[-1]:.6g}"
    )
    if args.out:
        _write(args.out, buf.getvalue())
        print(verdict)
    else:
        sys.stdout.write(buf.getvalue())
        print(verdict, file=sys.stderr)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_verify(args) -> int:
    if args.suite not in (*verification.SUITES, "all"):
        raise UsageError(f"unknown suite {args.suite!r}")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    results = verification.run_suites(args.suite, args.samples, args.seed)
    all_ok = True
    summary = {}
    for suite, checks in results.items():
        ok = all(c.passed for c in checks)
        all_ok &= ok
        print(f"[{suite}] {'PASS' if ok else 'FAIL'}")
        for c in checks:
            print("  " + c.line())
            if not c.passed and c.detail:
                print("        " + json.dumps(c.detail, sort_keys=True, default=str))
            print(f"  {c.name}: {c.seconds:.2f}s", file=sys.stderr)
        summary[suite] = [
            {"name": c.name, "passed": c.passed, "worst": c.worst, "samples": c.samples, "detail": c.detail}
            for c in checks
        ]
    if args.out:
        _write(args.out, json.dumps(summary, indent=2, default=str) + "\n")
    return EXIT_OK if all_ok else EXIT_MISMATCH


def cmd_examples(args) -> int:
    rows = []
    ok = True
    for eps in (0.01, 0.001):
        for ex in cones.sharpness_examples(eps):
            gap = max(abs(x - y) for x, y in zip(ex.lambda_pm, ex.lambda_pm_closed))
            good = gap <= 1e-12 and ex.condition_holds and ex.converse_violated
            ok &= good
            rows.append((ex, gap, good))
    head = f"{'ex':>2} {'eps':>6} {'a':>8} {'b':>8} {'c':>8} {'lam_minus':>20} {'lam_plus':>20}  condition / converse"
    print(head)
    for ex, gap, good in rows:
        a, b, c = ex.abc
        print(
            f"{ex.name:>2} {ex.eps:>6g} {a:>8.4g} {b:>8.4g} {c:>8.4g} "
            f"{ex.lambda_pm[0]:>20.15g} {ex.lambda_pm[1]:>20.15g}  "
            f"holds: {ex.condition} = {_num(ex.condition_value)}; "
            f"fails: {ex.converse} = {_num(ex.converse_value)}  "
            f"[{'ok' if good else 'BAD'} closed-form gap {gap:.1e}]"
        )
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["example", "eps", "a", "b", "c", "lambda_minus", "lambda_plus",
                    "lambda_minus_closed", "lambda_plus_closed", "condition", "condition_value",
                    "converse", "converse_value"])
        for ex, _, _ in rows:
            w.writerow([ex.name, _csv_num(ex.eps), *map(_csv_num, ex.abc), *map(_csv_num, ex.lambda_pm),
                        *map(_csv_num, ex.lambda_pm_closed), ex.condition, _csv_num(ex.condition_value),
                        ex.converse, _csv_num(ex.converse_value)])
        _write(args.out, buf.getvalue())
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (CSV or JSON depending on command)")
    common.add_argument("--config", default=None, help="flat JSON file of flag values; flags override it")

    parser = _Parser(prog="secondkind", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="analytic vs numeric spectrum")
    p.add_argument("--abc", type=float, nargs=3, metavar=("A", "B", "C"))
    p.add_argument("--schouten", help='distinct eigenvalues with multiplicities, e.g. "-0.5:1,0.5:2"')
    p.add_argument("--dim", type=int)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("cone", parents=[common], help="alpha-condition report")
    p.add_argument("--abc", type=float, nargs=3, metavar=("A", "B", "C"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=[m.value for m in cones.Mode], default="nonneg")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("flow", parents=[common], help="integrate the eigenvalue ODE, write CSV")
    p.add_argument("--abc", type=float, nargs=3, metavar=("A", "B", "C"), required=True)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--cap", type=float, default=1e6)
    p.add_argument("--sample-every", type=int, default=1)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("verify", parents=[common], help="run the randomised verification suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", parents=[common], help="reproduce the four sharpness examples")
    p.set_defaults(func=cmd_examples)
    return parser


def _config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _load_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    path = _config_path(argv)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if path is None or command not in choices:
        return parser.parse_args(argv)
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"--config: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError("--config must hold a flat JSON object")
    config = {k.replace("-", "_"): v for k, v in config.items()}
    subparser = choices[command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(config) - known - {"command"})
    if unknown:
        raise UsageError(f"--config: unknown keys {unknown}")
    config.pop("command", None)
    subparser.set_defaults(**config)
    for action in subparser._actions:
        if action.dest in config:
            action.required = False
    return parser.parse_args(argv)


def _glue_values(argv: list[str]) -> list[str]:
    """Attach the --schouten value so a leading minus is not read as a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--schouten" and i + 1 < len(argv):
            out.append(f"--schouten={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = _load_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
