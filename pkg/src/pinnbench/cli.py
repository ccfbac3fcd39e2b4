"""Command-line interface.

Verbs: run, list-presets, report, export-heatmap, verify. Exit codes:
0 success, 2 configuration error, 3 divergence (with --strict), 4 I/O
error. The output root defaults to $PINNBENCH_OUT, then ./runs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import harness, presets
from .errors import ConfigurationError, ContractError, PinnbenchError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

OUT_ENV = "PINNBENCH_OUT"


def _out_root(args) -> str:
    return args.out or os.environ.get(OUT_ENV) or "runs"


def _cmd_run(args) -> int:
    records = harness.run_preset(args.target, _out_root(args))
    diverged = [r for r in records if r.diverged]
    for r, rec in enumerate(records):
        if rec.diverged:
            print(f"repeat {r}: DIVERGED at epoch {rec.divergence_epoch}")
        else:
            print(f"repeat {r}: final risk {rec.final_risk:.6e} "
                  f"fractional error {rec.final_error:.6e}")
    if diverged and args.strict:
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_list_presets(_args) -> int:
    for name in presets.preset_names():
        print(name)
    return EXIT_OK


def _cmd_report(args) -> int:
    path = harness.compare_report(args.dir)
    print(f"report written to {path}")
    return EXIT_OK


def _cmd_export_heatmap(args) -> int:
    written = harness.export_heatmap_grid(
        args.checkpoint, args.out or os.path.dirname(args.checkpoint) or ".",
        resolution=args.res, times=args.times)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_verify(_args) -> int:
    """Fast invariant suite: oracles, constraint exactness, metric identities."""
    from . import pde_zoo, sampling
    from .losses import _value
    from .models import (PredictorModel, boundary_exactness_check,
                         initial_exactness_check, oracle_bundle)
    from .network import NetSpec

    failures = []

    def check(label, value, tol):
        status = "ok" if value <= tol else "FAIL"
        print(f"  {label}: {value:.3e} (tol {tol:.0e}) {status}")
        if value > tol:
            failures.append(label)

    problems = {"poisson_d1": pde_zoo.poisson(1),
                "poisson_d3": pde_zoo.poisson(3),
                "burgers1_inviscid": pde_zoo.burgers1_inviscid(),
                "burgers1_viscid": pde_zoo.burgers1_viscid(0.1),
                "burgers2": pde_zoo.burgers2_inviscid(),
                "burgers3_re100": pde_zoo.burgers3_viscid(100.0),
                "kdv1": pde_zoo.kdv(1), "kdv2": pde_zoo.kdv(2),
                "kdv3": pde_zoo.kdv(3)}
    print("closed-form residuals at 100 interior points:")
    for label, prob in problems.items():
        pts = sampling.sample_bulk(prob, 100, 7).points
        res = pde_zoo.residual(prob, oracle_bundle(prob, pts))
        worst = max(float(np.max(np.abs(_value(r)))) for r in res)
        check(label, worst, 1e-3)

    print("constraint exactness of included predictors:")
    for label, prob in problems.items():
        if label == "poisson_d3":
            continue
        spec = NetSpec(prob.input_dim, prob.n_fields, 4, 8)
        model = PredictorModel("boundary_included", prob, spec)
        check(f"{label} boundary", boundary_exactness_check(model, 200, 11), 1e-12)
        if prob.has_time:
            model = PredictorModel("initial_included", prob, spec)
            check(f"{label} initial", initial_exactness_check(model, 200, 11), 1e-12)

    print("fractional-error identities on a poisson mesh:")
    prob = pde_zoo.poisson(2)
    mesh = sampling.test_mesh(prob, 21)
    pts = mesh.points
    exact = np.stack([np.asarray(pde_zoo.exact_solution(
        prob, [pts[:, j] for j in range(2)])[0])], axis=1)

    def frac(pred):
        denom = float(np.sum(exact * exact))
        return float(np.sum((pred - exact) ** 2)) / denom

    check("exact -> 0", frac(exact), 1e-12)
    check("zero -> 1", abs(frac(0.0 * exact) - 1.0), 1e-12)
    check("2*exact -> 1", abs(frac(2.0 * exact) - 1.0), 1e-12)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinnbench",
        description="PDE benchmark harness for constraint-included "
                    "physics-informed network training")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train a preset or a config file")
    p.add_argument("target", help="preset name or path to a YAML config")
    p.add_argument("--out", help=f"output root (default ${OUT_ENV} or ./runs)")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 if any repeat diverges")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("list-presets", help="print all preset names")
    p.set_defaults(fn=_cmd_list_presets)

    p = sub.add_parser("report", help="aggregate a results directory")
    p.add_argument("dir", help="output root holding results.csv")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("export-heatmap",
                       help="evaluate a checkpoint on a grid and render heatmaps")
    p.add_argument("checkpoint")
    p.add_argument("--res", type=int, default=101)
    p.add_argument("--times", type=float, nargs="*", default=None)
    p.add_argument("--out", help="destination directory")
    p.set_defaults(fn=_cmd_export_heatmap)

    p = sub.add_parser("verify", help="run the fast invariant suite")
    p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, ContractError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except PinnbenchError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
