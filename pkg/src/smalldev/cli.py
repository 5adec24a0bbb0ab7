"""Command-line surface.

Every command prints a machine-readable record (``--format json|csv``) on
stdout and can drop a reproducibility manifest next to it (``--manifest``).
Randomized commands require an explicit ``--seed``; there is no wall-clock
default, so reruns with the same flags are byte-identical.

Exit codes: 0 success, 2 usage or parameter validation, 3 domain error,
4 divergent-series rejection.
"""

import argparse
import json
import sys
import time
from typing import Optional

from . import __version__
from .dichotomy import PsiSpec, classify_psi, partial_sum_diagnostic
from .errors import DivergentSeriesError, DomainError
from .brownian import sup_cdf, wiener_term_prob
from .params import DriftSpec, WeightParams
from .scaling import phi
from .series import (critical_threshold, eps_for_lambda, limit_constant,
                     limit_probe, weighted_series_wiener)
from .simulate import (IncrementLaw, estimate_small_dev, exponent_check,
                       gaussian_grid_oracle, rademacher_oracle)

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_DIVERGENT = 4


def _fmt_float(v) -> str:
    return f"{v:.17g}"


def _csv_cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def _emit_record(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(record, indent=2))
    else:
        keys = list(record.keys())
        print(",".join(keys))
        print(",".join(_csv_cell(record[k]) for k in keys))


def _emit_table(rows, header, footer, fmt: str, json_envelope: dict) -> None:
    if fmt == "json":
        print(json.dumps(json_envelope, indent=2))
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_csv_cell(v) for v in row))
        for row in footer:
            print(",".join(_csv_cell(v) for v in row))


def _strip_manifest(argv):
    """Drop the --manifest flag (and its value) from a recorded command line."""
    out = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--manifest":
            skip = True
            continue
        if a.startswith("--manifest="):
            continue
        out.append(a)
    return out


def _write_manifest(path: Optional[str], argv, args_ns, seed, workers,
                    wall_time: float) -> None:
    if path is None:
        return
    params = {k: v for k, v in vars(args_ns).items()
              if k not in ("func", "manifest")}
    manifest = {
        "argv": _strip_manifest(argv),
        "version": __version__,
        "seed": seed,
        "workers": workers,
        "wall_time_s": wall_time,
        "parameters": params,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _parse_float_list(parser, text, flag):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        parser.error(f"{flag} expects a comma-separated list of numbers")


def _add_common(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--manifest", metavar="PATH", default=None,
                     help="write a reproducibility manifest to PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smalldev",
        description="Small-deviation asymptotics of random-walk maxima: exact "
                    "Brownian band probabilities, weighted series and their "
                    "limits, convergence dichotomy, Monte Carlo with exact "
                    "oracles.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("brownian-cdf",
                        help="P(sup |W| <= x) with certified truncation error")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_common(p)
    p.set_defaults(func=_cmd_brownian_cdf)

    p = subs.add_parser("limit-probe",
                        help="normalized series along a lambda schedule plus "
                             "extrapolated and analytic limits")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--lambdas", type=str, required=True,
                   help="comma-separated, strictly decreasing, positive")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--agree-tol", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_limit_probe)

    p = subs.add_parser("term-prob",
                        help="single series term P(sup|W| <= sqrt(pi^2/(8 log n)) (eps+a_n))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_common(p)
    p.set_defaults(func=_cmd_term_prob)

    p = subs.add_parser("series",
                        help="weighted series at one eps or lambda (rejects "
                             "supercritical eps with exit code 4)")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.0)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--eps", type=float)
    group.add_argument("--lam", type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--cutoff", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_series)

    p = subs.add_parser("threshold",
                        help="critical eps separating convergence from divergence")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--scaling", choices=("phi", "sqrt_n_over_log_n"), default="phi")
    _add_common(p)
    p.set_defaults(func=_cmd_threshold)

    p = subs.add_parser("exponent-check",
                        help="empirical decay exponent -log P / log n along an "
                             "n schedule (tends to 1/x^2)")
    p.add_argument("--law", default="rademacher",
                   choices=("rademacher", "gaussian", "uniform_centered",
                            "exponential_centered", "symmetric_pareto"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--ns", type=str, required=True,
                   help="comma-separated increasing integers")
    p.add_argument("--method", choices=("oracle", "mc"), default="oracle")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=_cmd_exponent_check)

    p = subs.add_parser("simulate",
                        help="Monte Carlo estimate of P(M_n <= sigma phi(n) (eps+a_n))")
    p.add_argument("--law", required=True,
                   choices=("rademacher", "gaussian", "uniform_centered",
                            "exponential_centered", "symmetric_pareto"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--confidence", type=float, default=0.95)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("dichotomy",
                        help="convergence verdict for psi = c log n + b loglog n + d "
                             "plus a partial-sum table")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--N", type=int, default=1_000_000)
    p.add_argument("--mode", choices=("exponential", "wiener_prob"),
                   default="exponential")
    _add_common(p)
    p.set_defaults(func=_cmd_dichotomy)

    p = subs.add_parser("oracle",
                        help="exact stay-in-band probability (dynamic program or "
                             "grid convolution)")
    p.add_argument("--kind", choices=("rademacher", "gaussian"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=512)
    _add_common(p)
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = subs.add_parser("replay",
                        help="re-run the command recorded in a manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_replay)

    return parser


def _validate_weights(parser, r, a):
    if not (r > 1.0):
        parser.error(f"--r must exceed 1, got {r}")
    if not (a > -1.0):
        parser.error(f"--a must exceed -1, got {a}")


def _cmd_brownian_cdf(parser, args, argv):
    t0 = time.perf_counter()
    res = sup_cdf(args.x, args.tol)
    record = {"value": res.value, "k_terms": res.k_terms,
              "error_bound": res.error_bound}
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_limit_probe(parser, args, argv):
    _validate_weights(parser, args.r, args.a)
    lams = _parse_float_list(parser, args.lambdas, "--lambdas")
    if not lams or any(v <= 0 for v in lams) \
            or any(b >= a for a, b in zip(lams, lams[1:])):
        parser.error("--lambdas must be positive and strictly decreasing")
    t0 = time.perf_counter()
    res = limit_probe(WeightParams(args.r, args.a), DriftSpec.canonical(args.tau),
                      lams, args.tol, args.agree_tol)
    rows = list(zip(res.lambdas, res.normalized_values))
    footer = [("extrapolated", res.extrapolated), ("analytic", res.analytic)]
    envelope = {
        "rows": [{"lambda": l, "normalized": v} for l, v in rows],
        "extrapolated": res.extrapolated,
        "analytic": res.analytic,
        "agrees": res.agrees,
        "extrapolation_model": res.extrapolation_model,
    }
    _emit_table(rows, ("lambda", "normalized"), footer, args.format, envelope)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_term_prob(parser, args, argv):
    t0 = time.perf_counter()
    res = wiener_term_prob(args.n, args.eps, DriftSpec.canonical(args.tau), args.tol)
    record = {"n": args.n, "eps": args.eps, "tau": args.tau,
              "value": res.value, "k_terms": res.k_terms,
              "error_bound": res.error_bound}
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_series(parser, args, argv):
    _validate_weights(parser, args.r, args.a)
    t0 = time.perf_counter()
    params = WeightParams(args.r, args.a)
    eps = args.eps if args.eps is not None else eps_for_lambda(params, args.lam)
    res = weighted_series_wiener(params, eps, DriftSpec.canonical(args.tau),
                                 args.tol, args.cutoff)
    record = {
        "r": args.r, "a": args.a, "tau": args.tau, "eps": eps,
        "lambda": res.lam,
        "partial_sum": res.partial_sum,
        "tail_correction": res.tail_correction,
        "total": res.total,
        "normalized": res.normalized,
        "cutoff_N": res.cutoff_N,
        "rel_err_bound": res.rel_err_bound,
        "analytic_limit": limit_constant(params, args.tau),
    }
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_threshold(parser, args, argv):
    _validate_weights(parser, args.r, args.a)
    t0 = time.perf_counter()
    value = critical_threshold(WeightParams(args.r, args.a), args.sigma, args.scaling)
    record = {"r": args.r, "a": args.a, "sigma": args.sigma,
              "scaling": args.scaling, "threshold": value}
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_exponent_check(parser, args, argv):
    t0 = time.perf_counter()
    ns = [int(v) for v in _parse_float_list(parser, args.ns, "--ns")]
    law = IncrementLaw(args.law, sigma=args.sigma)
    rows = exponent_check(law, args.x, ns, args.method, samples=args.samples,
                          seed=args.seed, workers=args.workers)
    table = [(r.n, r.p, r.exponent, r.lower_bound_only) for r in rows]
    footer = [("target_inv_x2", 1.0 / (args.x * args.x))]
    envelope = {
        "rows": [{"n": r.n, "p": r.p, "exponent": r.exponent,
                  "lower_bound_only": r.lower_bound_only} for r in rows],
        "target_inv_x2": 1.0 / (args.x * args.x),
    }
    _emit_table(table, ("n", "p", "exponent", "lower_bound_only"),
                footer, args.format, envelope)
    _write_manifest(args.manifest, argv, args, args.seed, args.workers,
                    time.perf_counter() - t0)
    return EXIT_OK


def _cmd_simulate(parser, args, argv):
    t0 = time.perf_counter()
    law = IncrementLaw(args.law, sigma=args.sigma)
    drift = DriftSpec.canonical(args.tau)
    est = estimate_small_dev(law, args.n, args.eps, drift, args.samples,
                             args.seed, args.workers, args.confidence)
    record = {
        "law": args.law,
        "n": args.n,
        "eps": args.eps,
        "tau": args.tau,
        "sigma": args.sigma,
        "threshold": args.sigma * phi(args.n) * (args.eps + drift.value_at(args.n)),
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "confidence": est.confidence,
        "samples": est.samples,
        "seed": est.seed,
        "workers": est.workers,
        "successes": est.successes,
        "flagged_zero": est.flagged_zero,
    }
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, args.seed, args.workers,
                    time.perf_counter() - t0)
    return EXIT_OK


def _cmd_dichotomy(parser, args, argv):
    _validate_weights(parser, args.r, args.a)
    t0 = time.perf_counter()
    psi = PsiSpec(args.c, args.b, args.d)
    params = WeightParams(args.r, args.a)
    verdict = classify_psi(psi, params)
    table = partial_sum_diagnostic(psi, params, args.N, args.mode)
    rows = list(zip(table.cutoffs, table.partial_sums))
    footer = [("verdict", verdict.value)]
    envelope = {
        "verdict": verdict.value,
        "mode": table.mode,
        "cutoffs": list(table.cutoffs),
        "partial_sums": list(table.partial_sums),
    }
    _emit_table(rows, ("cutoff", "partial_sum"), footer, args.format, envelope)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_oracle(parser, args, argv):
    t0 = time.perf_counter()
    if args.kind == "rademacher":
        value = rademacher_oracle(args.n, args.x, args.sigma)
        record = {"kind": args.kind, "n": args.n, "x": args.x,
                  "sigma": args.sigma, "value": value}
    else:
        res = gaussian_grid_oracle(args.n, args.x, args.grid)
        record = {"kind": args.kind, "n": args.n, "x": args.x,
                  "grid_points": res.grid_points, "value": res.value,
                  "error_estimate": res.error_estimate}
    _emit_record(record, args.format)
    _write_manifest(args.manifest, argv, args, None, 1, time.perf_counter() - t0)
    return EXIT_OK


def _cmd_serve(parser, args, argv):
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _cmd_replay(parser, args, argv):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    recorded = manifest.get("argv")
    if not isinstance(recorded, list) or not recorded:
        print("manifest has no recorded argv", file=sys.stderr)
        return EXIT_USAGE
    return main(recorded)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args, list(argv))
    except DivergentSeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
