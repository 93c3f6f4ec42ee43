"""Command-line entry point ``jlp``.

Exit codes: 0 success, 1 reproduction failure, 2 usage, 3 IO, 4 numeric.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

from . import decisions, gaussian, proportions, reproduce, student
from .numcore import BracketError, ConvergenceError, DomainError, EvidenceRatio

EXIT_OK, EXIT_REPRO, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4

TABLES = ("jeffreys1935", "jeffreys1936", "jeffreys1938t", "jeffreys1938chi2")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits; non-finite values become null."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2) + "\n"


def _envelope(command: str, inputs: dict, results: dict, log_bf: float | None = None,
              seed: int | None = None) -> dict:
    out: dict[str, Any] = {"command": command, "inputs": inputs, "results": results}
    if log_bf is not None:
        out["log_bf"] = log_bf
    if seed is not None:
        out["seed"] = seed
    return out


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def _table_data(name: str, method: str) -> tuple[list[str], list[str], list[list[float]], list[str]]:
    """(csv/json column names, markdown headers, rows, printf formats)."""
    if name == "jeffreys1935":
        rows = [[r.size, r.max_odds, r.critical_difference, r.ratio]
                for r in proportions.jeffreys1935_table(method=method)]
        return (["size", "max_odds", "critical_difference", "ratio"],
                ["x + y", "P(q) / P(~q)", "x' - y'", "(x' - y') / (x + y)^1/2"],
                rows, ["{:d}", "{:.3g}", "{:.1f}", "{:.2f}"])
    if name == "jeffreys1936":
        rows = [[n, r] for n, r in gaussian.jeffreys1936_table()]
        return ["n", "b_over_sigma_b"], ["n", "b / sigma_b"], rows, ["{:d}", "{:.2f}"]
    if name == "jeffreys1938t":
        rows = [[n, k] for n, _t, k in student.jeffreys1938t_table()]
        return ["n", "K"], ["n (Fisher's n+1)", "K"], rows, ["{:d}", "{:.3f}"]
    rows = [[r.n, *r.k, *r.a0_root_n, *r.chi2] for r in gaussian.jeffreys1938chi2_table()]
    return (["n", "K_c1", "K_c2", "a0_root_n_c1", "a0_root_n_c2", "chi2_c1", "chi2_c2"],
            ["n", "K (c1)", "K (c2)", "a0 n^1/2 (c1)", "a0 n^1/2 (c2)", "chi^2 (c1)", "chi^2 (c2)"],
            rows, ["{:d}"] + ["{:.2f}"] * 6)


def render_table(name: str, fmt: str, method: str = "leading") -> str:
    cols, headers, rows, fmts = _table_data(name, method)
    if fmt == "json":
        payload = _envelope(f"table {name}", {"name": name, "method": method},
                            {"columns": cols, "rows": rows})
        return dumps(payload)
    cells = [[f.format(v) for f, v in zip(fmts, row)] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        writer.writerows(cells)
        return buf.getvalue()
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---:" for _ in headers) + "|"]
    lines += ["| " + " | ".join(c) + " |" for c in cells]
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    _emit(render_table(args.name, args.format, args.method), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bf
# ---------------------------------------------------------------------------


def _bf_payload(subject: str, inputs: dict, bf: EvidenceRatio, extra: dict | None = None) -> dict:
    results = {"bf": bf.value, "log_bf": bf.log_value, "orientation": bf.orientation,
               "warnings": list(bf.warnings)}
    if extra:
        results.update(extra)
    return _envelope(f"bf {subject}", inputs, results, log_bf=bf.log_value)


def cmd_bf(args) -> int:
    s = args.subject
    if s == "two-prop":
        counts = proportions.TwoProportionCounts(args.x, args.y, args.x2, args.y2)
        fn = proportions.approx_two_proportion_odds if args.approx else proportions.exact_two_proportion_odds
        inputs = {"x": args.x, "y": args.y, "x2": args.x2, "y2": args.y2, "approx": args.approx}
        payload = _bf_payload(s, inputs, fn(counts))
    elif s == "z":
        bf = gaussian.point_null_z_bf(args.z, args.n, args.g)
        payload = _bf_payload(s, {"z": args.z, "n": args.n, "g": args.g}, bf,
                              {"critical_z": gaussian.critical_z_for_unit_bf(args.n, args.g)})
    elif s == "t-jeffreys":
        bf = student.jeffreys1938_t_bf(student.TTestSpec(args.t, args.n))
        payload = _bf_payload(s, {"t": args.t, "n": args.n}, bf)
    elif s == "t-cauchy":
        spec = student.TTestSpec(args.t, args.n)
        prior = student.CauchyPrior(args.scale)
        bf = student.cauchy_t_bf10(spec, prior)
        direction = student.posterior_direction_masses(spec, prior)
        payload = _bf_payload(s, {"t": args.t, "n": args.n, "scale": args.scale}, bf, {
            "mass_negative": direction.mass_negative,
            "bf_plus_minus": direction.bf_plus_minus,
            "one_sided_p": student.one_sided_p(spec),
        })
    elif s == "perinull":
        spec = gaussian.PeriNullSpec(args.z, args.n, args.g0, args.g1)
        extra = {"bound": gaussian.perinull_bound(args.g0, args.g1)} if 0 < args.g0 < args.g1 else {}
        payload = _bf_payload(s, {"z": args.z, "n": args.n, "g0": args.g0, "g1": args.g1},
                              gaussian.perinull_bf(spec), extra)
    else:
        spec = gaussian.UniformitySpec(args.n, args.a0, args.c)
        payload = _bf_payload(s, {"n": args.n, "a0": args.a0, "c": args.c},
                              gaussian.uniformity_bf(spec), {"chi2": gaussian.uniformity_chi2(spec)})
    sys.stdout.write(dumps(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    k = args.kind
    if k == "figure1":
        prior = student.CauchyPrior(args.scale)
        tri = student.paradox_triple_construct(args.mass_neg, args.bf10, prior, n_max=args.n_max)
        inputs = {"mass_neg": args.mass_neg, "bf10": args.bf10, "scale": args.scale, "n_max": args.n_max}
        results = {"t": tri.t, "n": tri.n, "bf10": tri.bf10, "mass_negative": tri.mass_negative,
                   "log_bf10_gap": tri.log_bf10_gap}
        payload = _envelope("construct figure1", inputs, results, log_bf=math.log(tri.bf10))
    elif k == "lindley":
        n = gaussian.lindley_construct(args.alpha, args.posterior, args.I, args.sigma, args.prior_h0)
        z = gaussian.z_for_alpha(args.alpha, "two")
        inputs = {"alpha": args.alpha, "posterior": args.posterior, "I": args.I,
                  "sigma": args.sigma, "prior_h0": args.prior_h0}
        bf = gaussian.lindley_bf(n, z, args.I, args.sigma)
        results = {"n": n, "z": z, "K": bf.value,
                   "posterior_h0": gaussian.lindley_posterior_h0(n, z, args.I, args.sigma, args.prior_h0)}
        payload = _envelope("construct lindley", inputs, results, log_bf=bf.log_value)
    else:
        res = proportions.simplissimus_construct(args.epsilon, args.p)
        inputs = {"epsilon": args.epsilon, "p": args.p}
        results = {"n": res.n, "s": res.s, "p_value": res.p_value, "proportion": res.proportion,
                   "log_likelihood_ratio": res.log_likelihood_ratio}
        payload = _envelope("construct simplissimus", inputs, results)
    sys.stdout.write(dumps(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# decision
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        values = [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated counts, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def cmd_decision(args) -> int:
    if args.action == "sweep":
        series = []
        for n in args.n:
            opt = decisions.minimize_weighted_errors(args.lam, n, args.g)
            series.append({"n": n, "c_star": opt.critical_value, "alpha_star": opt.alpha,
                           "beta_star": opt.beta, "objective": opt.objective})
        payload = _envelope("decision sweep", {"lambda": args.lam, "g": args.g, "n": args.n},
                            {"series": series})
    else:
        if len(args.n) != 1:
            raise UsageError("decision mc takes a single --n")
        config = decisions.TrialConfig(args.n[0], args.g, args.prior_h0, args.trials, args.seed, args.h1_prior)
        rule = decisions.parse_rule(args.rule, args.g)
        tally = decisions.run_mistake_count(config, rule, workers=args.workers)
        inputs = {"n": config.n, "g": config.prior_variance_g, "prior_h0": config.prior_prob_h0,
                  "trials": config.trials, "rule": args.rule, "h1_prior": config.h1_prior}
        results = {"critical_value": tally.critical_value, "type1": tally.type1, "type2": tally.type2,
                   "total": tally.total, "h0_trials": tally.h0_trials, "h1_trials": tally.h1_trials}
        payload = _envelope("decision mc", inputs, results, seed=config.seed)
    sys.stdout.write(dumps(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def cmd_report(args) -> int:
    rows = reproduce.run_report()
    summary = reproduce.summarize(rows)
    if args.format == "json":
        sys.stdout.write(dumps(_envelope("report reproduce", {}, summary)))
    else:
        for r in rows:
            if r.status != "pass":
                sys.stdout.write(f"{r.status.upper():8s} {r.table_id:8s} {r.row_key:32s} "
                                 f"paper={r.paper_value:g} computed={r.computed_value:.6g} "
                                 f"delta={r.delta:+.4g}\n")
        c = summary["counts"]
        sys.stdout.write(f"{c['pass']} pass, {c['fail']} fail, {c['flagged']} flagged\n")
    return EXIT_OK if summary["ok"] else EXIT_REPRO


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jlp", description="Bayes factors and tables around the Jeffreys-Lindley paradox.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="regenerate a historical table")
    t.add_argument("name", choices=TABLES)
    t.add_argument("--format", choices=("csv", "json", "md"), default="md")
    t.add_argument("--out", default=None)
    t.add_argument("--method", choices=proportions.TABLE1_METHODS, default="leading",
                   help="odds used for the jeffreys1935 critical difference")
    t.set_defaults(func=cmd_table)

    b = sub.add_parser("bf", help="evaluate one Bayes factor")
    bsub = b.add_subparsers(dest="subject", required=True)
    s = bsub.add_parser("two-prop")
    for name in ("x", "y", "x2", "y2"):
        s.add_argument(f"--{name}", type=int, required=True)
    s.add_argument("--approx", action="store_true")
    s = bsub.add_parser("z")
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--g", type=float, default=1.0)
    s = bsub.add_parser("t-jeffreys")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s = bsub.add_parser("t-cauchy")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--scale", type=float, default=1 / math.sqrt(2))
    s = bsub.add_parser("perinull")
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--g0", type=float, required=True)
    s.add_argument("--g1", type=float, required=True)
    s = bsub.add_parser("uniformity")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--a0", type=float, required=True)
    s.add_argument("--c", type=float, default=gaussian.UNIFORMITY_C_FIRST)
    b.set_defaults(func=cmd_bf)

    c = sub.add_parser("construct", help="paradox constructions")
    csub = c.add_subparsers(dest="kind", required=True)
    s = csub.add_parser("figure1")
    s.add_argument("--mass-neg", type=float, required=True)
    s.add_argument("--bf10", type=float, required=True)
    s.add_argument("--scale", type=float, default=1 / math.sqrt(2))
    s.add_argument("--n-max", type=int, default=None)
    s = csub.add_parser("lindley")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--posterior", type=float, required=True)
    s.add_argument("--I", type=float, default=1.0)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--prior-h0", type=float, default=0.5)
    s = csub.add_parser("simplissimus")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--p", type=float, required=True)
    c.set_defaults(func=cmd_construct)

    d = sub.add_parser("decision", help="error trade-offs and Monte Carlo tallies")
    d.add_argument("action", choices=("sweep", "mc"))
    d.add_argument("--n", type=_int_list, required=True)
    d.add_argument("--g", type=float, default=1.0)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--prior-h0", type=float, default=0.5)
    d.add_argument("--trials", type=int, default=100_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--rule", default="bf:1")
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--h1-prior", choices=("normal", "uniform"), default="normal")
    d.set_defaults(func=cmd_decision)

    r = sub.add_parser("report", help="compare regenerated values with the stored fixtures")
    r.add_argument("what", choices=("reproduce",))
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"jlp: {exc}\n")
        return EXIT_USAGE
    except (BracketError, ConvergenceError, OverflowError, ZeroDivisionError) as exc:
        sys.stderr.write(f"jlp: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"jlp: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
