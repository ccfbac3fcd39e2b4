"""Disk-facing experiment runner: traces, checkpoints, reports, heatmaps.

Layout under the output root: one directory per run name containing a
manifest, one subdirectory per repeat (trace.csv + checkpoint.txt), and a
shared results.csv at the root. Every artifact is reconstructible from the
manifest's (config, seeds). Floats are written at 17 significant digits.

CSV schemas:
  trace.csv    epoch, risk, fractional_error (error blank off-cadence)
  results.csv  name, repeat, final_risk, min_fractional_error, epochs, diverged
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import yaml

from . import network, pde_zoo, sampling, training
from .errors import ConfigurationError, SingularityError
from .models import PredictorModel, predict_values
from .network import NetSpec
from .pde_zoo import BLOWUP_EPS, PdeProblem
from .presets import ExperimentConfig, config_from_dict, get_preset
from .training import RunRecord

RESULTS_COLUMNS = ("name", "repeat", "final_risk", "min_fractional_error",
                   "epochs", "diverged")


def _g(v) -> str:
    return format(float(v), ".17g")


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as err:
        raise ConfigurationError(f"cannot parse {path}: {err}") from err
    return config_from_dict(data)


def resolve_config(name_or_path: str) -> ExperimentConfig:
    """A preset name, or a path to a config file."""
    p = Path(name_or_path)
    if p.suffix in (".yml", ".yaml") or p.is_file():
        return load_config(p)
    return get_preset(name_or_path)


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=False))


def _write_trace(record: RunRecord, path: Path) -> None:
    errors = dict(zip(record.error_epochs, record.error_trace))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "risk", "fractional_error"])
        for epoch, risk in enumerate(record.risk_trace):
            err = errors.get(epoch)
            writer.writerow([epoch, _g(risk), "" if err is None else _g(err)])


def _append_results(root: Path, rows: list[list]) -> None:
    path = root / "results.csv"
    fresh = not path.exists()
    with path.open("a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(RESULTS_COLUMNS)
        writer.writerows(rows)


def run_config(cfg: ExperimentConfig, out_root: str | Path) -> list[RunRecord]:
    """Train all repeats, writing traces, checkpoints, manifest, results."""
    root = Path(out_root)
    run_dir = root / cfg.name
    run_dir.mkdir(parents=True, exist_ok=True)
    problem, model, risk, train_cfg = cfg.resolve()
    seeds = [(cfg.seed_init + r, cfg.seed_sample + 10 * r)
             for r in range(cfg.repeats)]
    manifest = {"config": cfg.to_dict(),
                "seeds": [{"repeat": r, "seed_init": si, "seed_sample": ss}
                          for r, (si, ss) in enumerate(seeds)]}
    (run_dir / "manifest.yaml").write_text(yaml.safe_dump(manifest, sort_keys=False))
    records = training.train(problem, model, risk, train_cfg)
    rows = []
    for r, record in enumerate(records):
        rep_dir = run_dir / f"repeat{r}"
        rep_dir.mkdir(exist_ok=True)
        _write_trace(record, rep_dir / "trace.csv")
        network.save_checkpoint(
            rep_dir / "checkpoint.txt", model.spec, seeds[r][0],
            record.final_params,
            extra={"config": json.dumps(cfg.to_dict())})
        err = record.min_error
        rows.append([cfg.name, r, _g(record.final_risk),
                     "" if np.isnan(err) else _g(err),
                     record.epochs, int(record.diverged)])
    _append_results(root, rows)
    return records


def run_preset(name_or_path: str, out_root: str | Path) -> list[RunRecord]:
    return run_config(resolve_config(name_or_path), out_root)


# reports ------------------------------------------------------------------

def _read_results(root: Path) -> list[dict]:
    path = root / "results.csv"
    if not path.exists():
        raise ConfigurationError(f"no results.csv under {root}")
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigurationError(f"{path} holds no completed runs")
    return rows


def _group_key(name: str) -> tuple[str, str, str]:
    """(group, model, size) from a run name like kdv1_initial_included_57p."""
    for kind in ("vanilla", "boundary_included", "initial_included"):
        tag = f"_{kind}_"
        if tag in name:
            head, _, size = name.partition(tag)
            return head, kind, size
        if name.endswith("_" + kind):
            return name[:-len(kind) - 1], kind, ""
    return name, "", ""


def compare_report(results_dir: str | Path) -> Path:
    """Aggregate min fractional error per run, mark best models, render figures."""
    root = Path(results_dir)
    rows = _read_results(root)
    runs: dict[str, dict] = {}
    for row in rows:
        rec = runs.setdefault(row["name"], {"errors": [], "diverged": False,
                                            "epochs": row["epochs"]})
        if row["diverged"] == "1":
            rec["diverged"] = True
        elif row["min_fractional_error"]:
            rec["errors"].append(float(row["min_fractional_error"]))

    groups: dict[tuple[str, str], dict[str, dict]] = {}
    for name, rec in runs.items():
        group, model, size = _group_key(name)
        rec["name"] = name
        groups.setdefault((group, size), {})[model or name] = rec

    report_csv = root / "report.csv"
    with report_csv.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "size", "model", "min_fractional_error",
                         "diverged", "best"])
        lines = ["# Benchmark comparison", "",
                 "Minimum fractional error per run; diverged runs are flagged",
                 "and excluded from best-model selection.", ""]
        for (group, size), models in sorted(groups.items()):
            healthy = {m: min(r["errors"]) for m, r in models.items()
                       if r["errors"] and not r["diverged"]}
            best = min(healthy, key=healthy.get) if healthy else None
            lines.append(f"## {group} {size}".rstrip())
            lines.append("")
            lines.append("| model | min fractional error | diverged | best |")
            lines.append("|---|---|---|---|")
            for m, rec in sorted(models.items()):
                err = min(rec["errors"]) if rec["errors"] else float("nan")
                mark = "*" if m == best else ""
                writer.writerow([group, size, m,
                                 "" if np.isnan(err) else _g(err),
                                 int(rec["diverged"]), mark])
                lines.append(f"| {m} | {err:.3e} | {rec['diverged']} | {mark} |")
            lines.append("")
    (root / "report.md").write_text("\n".join(lines) + "\n")
    _render_trace_figures(root, runs)
    return root / "report.md"


def _render_trace_figures(root: Path, runs: dict) -> None:
    """One risk/error-curve PNG per run directory that has traces."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name in runs:
        rep_dirs = sorted((root / name).glob("repeat*"))
        traces = [d / "trace.csv" for d in rep_dirs if (d / "trace.csv").exists()]
        if not traces:
            continue
        fig, (ax_risk, ax_err) = plt.subplots(1, 2, figsize=(10, 4))
        for trace in traces:
            with trace.open(newline="") as fh:
                rows = list(csv.DictReader(fh))
            epochs = [int(r["epoch"]) for r in rows]
            risks = [float(r["risk"]) for r in rows]
            pts = [(int(r["epoch"]), float(r["fractional_error"]))
                   for r in rows if r["fractional_error"]]
            ax_risk.plot(epochs, risks, label=trace.parent.name)
            if pts:
                ax_err.plot(*zip(*pts), label=trace.parent.name)
        for ax, title in ((ax_risk, "empirical risk"), (ax_err, "fractional error")):
            ax.set_yscale("log")
            ax.set_xlabel("epoch")
            ax.set_title(title)
            ax.legend(fontsize=8)
        fig.suptitle(name)
        fig.tight_layout()
        fig.savefig(root / name / "curves.png", dpi=120)
        plt.close(fig)


# heatmap export -----------------------------------------------------------

def load_checkpoint_model(path: str | Path) -> tuple[PredictorModel, np.ndarray]:
    spec, _seed, flat, extra = network.load_checkpoint(path)
    if "config" not in extra:
        raise ConfigurationError(f"{path} lacks an embedded run config")
    cfg = config_from_dict(json.loads(extra["config"]))
    problem = cfg.problem()
    model = PredictorModel(cfg.model_kind, problem, spec,
                           lam=cfg.lam, q_blend=cfg.q_blend)
    return model, flat


def _write_grid(path: Path, grid: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(grid):
            writer.writerow([_g(v) for v in row])


def _render_heatmap(path: Path, grid: np.ndarray, extent, title: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(grid.T, origin="lower", aspect="auto", extent=extent,
                   cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _slice_points(problem: PdeProblem, res: int, t: float | None):
    """A 2D evaluation grid and its plot axes for one time slice.

    1-spatial problems with time use the full space-time rectangle (t
    ignored); 2+ spatial dimensions grid the first two axes and pin the
    rest to their midpoints at the given time.
    """
    bounds = problem.axis_bounds()
    if problem.has_time and problem.spatial_dim == 1:
        ax0, ax1 = 0, 1
    else:
        ax0, ax1 = 0, min(1, problem.input_dim - 1)
    g0 = np.linspace(*bounds[ax0], res)
    g1 = np.linspace(*bounds[ax1], res) if ax1 != ax0 else np.array([0.0])
    a, b = np.meshgrid(g0, g1, indexing="ij")
    pts = np.empty((a.size, problem.input_dim))
    for j, (lo, hi) in enumerate(bounds):
        pts[:, j] = 0.5 * (lo + hi)
    pts[:, ax0] = a.ravel()
    if ax1 != ax0:
        pts[:, ax1] = b.ravel()
    if problem.has_time and problem.spatial_dim > 1:
        pts[:, -1] = 0.0 if t is None else t
    extent = (*bounds[ax0], *bounds[ax1]) if ax1 != ax0 else (*bounds[ax0], 0, 1)
    return pts, (a.shape if ax1 != ax0 else (res, 1)), extent


def export_heatmap_grid(checkpoint: str | Path, out_dir: str | Path,
                        resolution: int = 101,
                        times: list[float] | None = None) -> list[Path]:
    """CSV grids (predicted, exact, absolute error) plus PNG renderings."""
    if resolution < 2:
        raise ConfigurationError("heatmap resolution must be at least 2")
    model, flat = load_checkpoint_model(checkpoint)
    problem = model.problem
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if problem.has_time and problem.spatial_dim > 1:
        slices = times if times else [problem.time_bounds[1]]
    else:
        slices = [None]
    written: list[Path] = []
    for t in slices:
        if t is not None:
            lo, hi = problem.time_bounds
            if not lo <= t <= hi:
                raise ConfigurationError(f"time slice {t} outside {problem.time_bounds}")
            if problem.kind == "burgers2_inviscid" and \
                    abs(1.0 - 2.0 * t * t) < BLOWUP_EPS:
                raise SingularityError(f"t={t} is the blow-up time")
        pts, shape, extent = _slice_points(problem, resolution, t)
        pred = predict_values(model, flat, pts)
        exact = pde_zoo.exact_solution(
            problem, [pts[:, j] for j in range(pts.shape[1])])
        exact = np.stack([np.broadcast_to(np.asarray(e, dtype=float),
                                          (pts.shape[0],)) for e in exact], axis=1)
        tag = "full" if t is None else "t" + format(t, "g").replace(".", "p")
        for j in range(problem.n_fields):
            fname = f"u{j}" if problem.n_fields > 1 else "u"
            for kind, grid in (("pred", pred[:, j]), ("exact", exact[:, j]),
                               ("err", np.abs(pred[:, j] - exact[:, j]))):
                g = grid.reshape(shape)
                path = out / f"{tag}_{fname}_{kind}.csv"
                _write_grid(path, g)
                _render_heatmap(out / f"{tag}_{fname}_{kind}.png", g, extent,
                                f"{problem.kind} {fname} {kind} {tag}")
                written.append(path)
    return written
