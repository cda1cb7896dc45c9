"""Command-line pipeline: ingest -> build -> sweep/analyze -> fits -> regressions.

Configuration comes from an optional JSON file plus flags; flags win.  Every
command writes a manifest.json with the config hash, input checksums, stage
timings and the output listing.  Exit codes: 0 success, 1 analysis error,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from . import heavytail as ht
from . import metrics as mx
from . import plots
from . import regress as rg
from .errors import CrisisnetError, InputFormatError
from .graph import (
    build_subgraph,
    export_edges_csv,
    load_graph,
    prepare_edges,
    save_graph,
    to_undirected,
)
from .ingest import (
    ActivityTable,
    FilterSpec,
    ParseStats,
    compute_activity,
    filter_relevant,
    parse_edges,
    parse_tweets,
)
from .manifest import PipelineConfig, RunManifest, file_checksum


def _check_input(path: str | None, what: str) -> Path:
    if not path:
        raise InputFormatError(f"no {what} file given (flag or config)")
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} file not found: {p}")
    return p


def _sanitize(obj):
    """Make numpy scalars/arrays JSON-serializable."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    return obj


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_sanitize(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_bc_mode(value: str) -> tuple[int | None, bool]:
    """'auto' | 'exact' | 'sampled:K' -> (pivots, force_exact)."""
    if value == "auto":
        return None, False
    if value == "exact":
        return None, True
    if value.startswith("sampled:"):
        try:
            k = int(value.split(":", 1)[1])
        except ValueError:
            k = 0
        if k < 1:
            raise InputFormatError(f"bad betweenness mode {value!r}: pivot count must be >= 1")
        return k, False
    raise InputFormatError(
        f"bad betweenness mode {value!r}: expected exact, auto, or sampled:K"
    )


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _str_list(text: str) -> list[str]:
    return [part for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crisisnet",
        description="Batch analytics for activity-thresholded social subgraphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="random seed for sampled modes")
        p.add_argument("--threads", type=int, help="cap worker threads")

    p = sub.add_parser("ingest", help="parse/filter tweets into an activity table")
    common(p)
    p.add_argument("--tweets", help="tweet file (jsonl or tsv)")
    p.add_argument("--tweet-format", dest="tweet_format", choices=["jsonl", "tsv"])
    p.add_argument("--keyword", help="relevance keyword (substring match)")
    p.add_argument("--lang", help="language code to keep")
    p.add_argument(
        "--require-lang",
        dest="require_lang",
        action="store_const",
        const=True,
        help="drop records with no language field",
    )

    p = sub.add_parser("sweep", help="graph summaries across activity thresholds")
    common(p)
    p.add_argument("--edges", help="edge file")
    p.add_argument("--edge-format", dest="edge_format", choices=["csv", "adj"])
    p.add_argument("--activity", help="activity CSV from ingest")
    p.add_argument("--thresholds", type=_int_list, help="comma-separated, ascending")

    p = sub.add_parser("analyze", help="full artifact set for one threshold")
    common(p)
    p.add_argument("--edges", help="edge file")
    p.add_argument("--edge-format", dest="edge_format", choices=["csv", "adj"])
    p.add_argument("--activity", help="activity CSV from ingest")
    p.add_argument("--threshold", type=int, help="activity threshold (default: first of --thresholds)")
    p.add_argument("--betweenness", help="exact, auto, or sampled:K")
    p.add_argument("--censor", type=float, help="tobit censor point (default: threshold)")
    p.add_argument("--regressors", type=_str_list, help="metric columns for the tobit")
    p.add_argument("--fit-families", dest="fit_families", type=_str_list)
    p.add_argument("--x-min", dest="x_min", type=float, help="fix the tail start")
    p.add_argument("--no-figures", dest="figures", action="store_const", const=False)

    p = sub.add_parser("fit-dist", help="heavy-tail fits for an activity table")
    common(p)
    p.add_argument("--activity", help="activity CSV from ingest")
    p.add_argument("--fit-families", dest="fit_families", type=_str_list)
    p.add_argument("--x-min", dest="x_min", type=float)

    p = sub.add_parser("regress", help="tobit + univariate models from a metrics CSV")
    common(p)
    p.add_argument("--metrics", required=True, help="metrics CSV from analyze")
    p.add_argument("--censor", type=float)
    p.add_argument("--regressors", type=_str_list)

    p = sub.add_parser("export-edges", help="attributed edge list for one threshold")
    common(p)
    p.add_argument("--edges", help="edge file")
    p.add_argument("--edge-format", dest="edge_format", choices=["csv", "adj"])
    p.add_argument("--activity", help="activity CSV from ingest")
    p.add_argument("--threshold", type=int)

    return parser


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    base = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    known = {f.name for f in fields(PipelineConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in known}
    return base.merged(overrides)


def _outdir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_activity(cfg: PipelineConfig) -> tuple[ActivityTable, Path]:
    path = _check_input(cfg.activity, "activity")
    return ActivityTable.from_csv(path), path


def _edge_index(cfg: PipelineConfig, activity: ActivityTable):
    path = _check_input(cfg.edges, "edge")
    stats = ParseStats()
    index = prepare_edges(parse_edges(path, cfg.edge_format, stats), activity)
    return index, path, stats


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg: PipelineConfig) -> int:
    tweets = _check_input(cfg.tweets, "tweet")
    out = _outdir(cfg)
    manifest = RunManifest("ingest", cfg)
    manifest.add_input(tweets)
    stats = ParseStats()
    spec = FilterSpec(keyword=cfg.keyword, language=cfg.lang, require_lang=cfg.require_lang)
    with manifest.stage("ingest"):
        records = parse_tweets(tweets, cfg.tweet_format, stats)
        table = compute_activity(filter_relevant(records, spec))
    activity_csv = out / "activity.csv"
    table.to_csv(activity_csv)
    stats_doc = {
        "lines": stats.lines,
        "parsed": stats.parsed,
        "skipped": stats.skipped,
        "relevant_tweets": table.total(),
        "users": len(table),
    }
    _write_json(stats_doc, out / "ingest_stats.json")
    manifest.add_output(activity_csv)
    manifest.add_output(out / "ingest_stats.json")
    manifest.write(out / "manifest.json")
    print(f"ingest: {stats.parsed} rows parsed, {stats.skipped} skipped, "
          f"{table.total()} relevant tweets from {len(table)} users")
    return 0


def cmd_sweep(cfg: PipelineConfig) -> int:
    activity, activity_path = _load_activity(cfg)
    out = _outdir(cfg)
    manifest = RunManifest("sweep", cfg)
    manifest.add_input(activity_path)
    with manifest.stage("parse-edges"):
        index, edge_path, _ = _edge_index(cfg, activity)
    manifest.add_input(edge_path)
    with manifest.stage("sweep"):
        rows = mx.threshold_sweep(index, None, cfg.thresholds)
    sweep_csv = out / "sweep.csv"
    mx.write_sweep_csv(rows, sweep_csv)
    manifest.add_output(sweep_csv)
    with manifest.stage("figures"):
        fig = out / "sweep.png"
        plots.plot_sweep(rows, fig)
        manifest.add_output(fig)
    manifest.write(out / "manifest.json")
    for row in rows:
        print(f"t={row.threshold}: n={row.n} m={row.m_directed} "
              f"components={row.n_components} isolates={row.n_isolates}")
    return 0


def _cached_graph(cfg, index, activity_path: Path, edge_path: Path, threshold: int, out: Path):
    """Build the thresholded graph, reusing a cache keyed by input checksums."""
    cache_dir = out / "cache"
    cache_dir.mkdir(exist_ok=True)
    key = (file_checksum(edge_path) + file_checksum(activity_path))[:16]
    cache = cache_dir / f"graph_{key}_t{threshold}.bin"
    if cache.is_file():
        return load_graph(cache), cache
    g = build_subgraph(index, threshold=threshold)
    save_graph(g, cache)
    return g, cache


def cmd_analyze(cfg: PipelineConfig, threshold: int | None, figures: bool) -> int:
    t = threshold if threshold is not None else cfg.thresholds[0]
    activity, activity_path = _load_activity(cfg)
    out = _outdir(cfg)
    manifest = RunManifest("analyze", cfg)
    manifest.add_input(activity_path)
    with manifest.stage("parse-edges"):
        index, edge_path, _ = _edge_index(cfg, activity)
    manifest.add_input(edge_path)

    with manifest.stage("build"):
        g, cache = _cached_graph(cfg, index, activity_path, edge_path, t, out)
    with manifest.stage("summary"):
        summary = mx.summarize(g, t)
    summary_doc = {k: getattr(summary, k) for k in mx.SWEEP_COLUMNS.split(",")}
    _write_json(summary_doc, out / "summary.json")
    manifest.add_output(out / "summary.json")
    print(f"analyze t={t}: n={summary.n} m={summary.m_directed} "
          f"lcc={summary.n_lcc} radius={summary.radius} diameter={summary.diameter}")

    pivots, force_exact = _parse_bc_mode(cfg.betweenness)
    with manifest.stage("node-metrics"):
        nm = mx.compute_node_metrics(
            g, bc_pivots=pivots, bc_exact=force_exact, seed=cfg.seed
        )
    metrics_csv = out / "metrics.csv"
    mx.write_metrics_csv(nm, metrics_csv)
    manifest.add_output(metrics_csv)

    with manifest.stage("fit-distributions"):
        fit_doc: dict = {}
        samples = {
            "activity": ht.TailSample(nm.af.astype(np.float64), is_discrete=True),
            "degree": ht.TailSample.from_degrees(to_undirected(g).degree()),
        }
        for name, sample in samples.items():
            try:
                fit_doc[name] = ht.fit_report(sample, tuple(cfg.fit_families), cfg.x_min)
            except (CrisisnetError, ValueError) as exc:
                fit_doc[name] = {"error": str(exc)}
    _write_json(fit_doc, out / "fit_report.json")
    manifest.add_output(out / "fit_report.json")
    for name, sample in samples.items():
        ccdf_csv = out / f"ccdf_{name}.csv"
        ht.write_ccdf_csv(sample, ccdf_csv)
        manifest.add_output(ccdf_csv)

    with manifest.stage("regress"):
        regress_doc = _regression_doc(nm.columns(), cfg, censor=cfg.censor if cfg.censor is not None else float(t), out=out, manifest=manifest)
    _write_json(regress_doc, out / "regression.json")
    manifest.add_output(out / "regression.json")

    if figures:
        with manifest.stage("figures"):
            for name, sample in samples.items():
                report = fit_doc.get(name, {})
                fits = _fits_from_report(report, sample)
                fig = out / f"dist_{name}.png"
                plots.plot_ccdf_fits(sample, fits, name, fig)
                manifest.add_output(fig)
            cols = nm.columns()
            for reg in cfg.regressors:
                band_csv = out / f"band_{reg}.csv"
                if not band_csv.is_file():
                    continue
                band = _read_band(band_csv)
                fig = out / f"spreading_{reg}.png"
                plots.plot_band(cols[reg], cols["af"], band, reg, "af", fig)
                manifest.add_output(fig)
    manifest.write(out / "manifest.json")
    return 0


def _fits_from_report(report: dict, sample: ht.TailSample) -> list[ht.FitResult]:
    fits = []
    for fam, entry in report.get("fits", {}).items():
        if "error" in entry:
            continue
        fits.append(
            ht.FitResult(
                family=fam,
                params=entry["params"],
                x_min=report["x_min"],
                n_tail=entry["n_tail"],
                loglik=entry["loglik"],
                ks=entry["ks"],
                is_discrete=sample.is_discrete,
            )
        )
    return fits


def _read_band(path: Path) -> rg.PredictionBand:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    data = np.atleast_2d(data)
    return rg.PredictionBand(x=data[:, 0], mean=data[:, 1], lo=data[:, 2], hi=data[:, 3])


def _regression_doc(
    cols: dict[str, np.ndarray],
    cfg: PipelineConfig,
    censor: float,
    out: Path,
    manifest: RunManifest,
) -> dict:
    """Tobit + per-regressor univariate models; writes the band CSVs."""
    for reg in cfg.regressors:
        if reg not in cols:
            raise InputFormatError(f"unknown regressor {reg!r}; have {sorted(cols)}")
    y = cols["af"].astype(np.float64)
    doc: dict = {"censor": censor, "describe": rg.describe(
        {k: v for k, v in cols.items() if k != "user_id"}
    )}
    X = np.column_stack([cols[r].astype(np.float64) for r in cfg.regressors])
    try:
        tob = rg.fit_tobit(y, X, censor, names=list(cfg.regressors))
        doc["tobit"] = {
            "names": tob.names,
            "beta": tob.beta,
            "se": tob.se,
            "tstats": tob.tstats,
            "ci_lower": tob.ci_lower,
            "ci_upper": tob.ci_upper,
            "sigma": tob.sigma,
            "sigma_se": tob.sigma_se,
            "loglik": tob.loglik,
            "loglik_null": tob.loglik_null,
            "pseudo_r2": tob.pseudo_r2,
            "n": tob.n,
            "n_censored": tob.n_censored,
            "n_iter": tob.n_iter,
        }
    except CrisisnetError as exc:
        doc["tobit"] = {"error": str(exc)}
    doc["univariate"] = {}
    for reg in cfg.regressors:
        x = cols[reg].astype(np.float64)
        try:
            lin = rg.fit_polynomial(y, x, 1)
        except CrisisnetError as exc:
            doc["univariate"][reg] = {"error": str(exc)}
            continue
        try:
            quad = rg.fit_polynomial(y, x, 2)
        except CrisisnetError:
            quad = None  # too few distinct x values for a quadratic
        if quad is None:
            chosen, stat, p = lin, None, None
        else:
            chosen = rg.select_model(lin, quad)
            stat, p = rg.lr_test(lin, quad)
        grid = np.linspace(float(x.min()), float(x.max()), 100)
        band = rg.prediction_band(chosen, grid)
        band_csv = out / f"band_{reg}.csv"
        rg.write_band_csv(band, band_csv)
        manifest.add_output(band_csv)
        doc["univariate"][reg] = {
            "order": chosen.order,
            "coef": chosen.coef,
            "sigma": chosen.sigma,
            "loglik_linear": lin.loglik,
            "loglik_quadratic": quad.loglik if quad is not None else None,
            "lr_stat": stat,
            "lr_p": p,
        }
    return doc


def cmd_fit_dist(cfg: PipelineConfig) -> int:
    activity, activity_path = _load_activity(cfg)
    out = _outdir(cfg)
    manifest = RunManifest("fit-dist", cfg)
    manifest.add_input(activity_path)
    values = np.array(sorted(activity.entries.values()), dtype=np.float64)
    sample = ht.TailSample(values, is_discrete=True)
    with manifest.stage("fit"):
        report = ht.fit_report(sample, tuple(cfg.fit_families), cfg.x_min)
    _write_json(report, out / "fit_report.json")
    ht.write_ccdf_csv(sample, out / "ccdf.csv")
    with manifest.stage("figures"):
        plots.plot_ccdf_fits(sample, _fits_from_report(report, sample), "activity", out / "dist.png")
    for name in ("fit_report.json", "ccdf.csv", "dist.png"):
        manifest.add_output(out / name)
    manifest.write(out / "manifest.json")
    for fam, entry in report["fits"].items():
        desc = entry.get("error") or ", ".join(
            f"{k}={v:.5g}" for k, v in entry["params"].items()
        )
        print(f"{fam}: {desc}")
    return 0


def cmd_regress(cfg: PipelineConfig, metrics_path: str, censor: float | None) -> int:
    path = _check_input(metrics_path, "metrics")
    out = _outdir(cfg)
    manifest = RunManifest("regress", cfg)
    manifest.add_input(path)
    cols = mx.read_metrics_csv(path)
    c = censor if censor is not None else (cfg.censor if cfg.censor is not None else float(cols["af"].min()))
    with manifest.stage("regress"):
        doc = _regression_doc(cols, cfg, censor=c, out=out, manifest=manifest)
    _write_json(doc, out / "regression.json")
    manifest.add_output(out / "regression.json")
    with manifest.stage("figures"):
        for reg in cfg.regressors:
            band_csv = out / f"band_{reg}.csv"
            if not band_csv.is_file():
                continue
            band = _read_band(band_csv)
            fig = out / f"spreading_{reg}.png"
            plots.plot_band(cols[reg], cols["af"], band, reg, "af", fig)
            manifest.add_output(fig)
    manifest.write(out / "manifest.json")
    if "error" in doc["tobit"]:
        print(f"tobit: {doc['tobit']['error']}")
    else:
        tob = doc["tobit"]
        terms = ", ".join(f"{n}={b:.5f}" for n, b in zip(tob["names"], tob["beta"]))
        print(f"tobit: {terms} (pseudo-R2 {tob['pseudo_r2']:.5f})")
    return 0


def cmd_export_edges(cfg: PipelineConfig, threshold: int | None) -> int:
    t = threshold if threshold is not None else cfg.thresholds[0]
    activity, activity_path = _load_activity(cfg)
    out = _outdir(cfg)
    manifest = RunManifest("export-edges", cfg)
    manifest.add_input(activity_path)
    with manifest.stage("parse-edges"):
        index, edge_path, _ = _edge_index(cfg, activity)
    manifest.add_input(edge_path)
    with manifest.stage("build"):
        g = build_subgraph(index, threshold=t)
    dest = out / f"edges_t{t}.csv"
    with manifest.stage("export"):
        export_edges_csv(g, dest)
    manifest.add_output(dest)
    manifest.write(out / "manifest.json")
    print(f"exported {g.m} edges over {g.n} nodes to {dest}")
    return 0


# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if cfg.threads is not None:
            import numba

            numba.set_num_threads(max(1, cfg.threads))
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.threshold, getattr(args, "figures", None) is not False)
        if args.command == "fit-dist":
            return cmd_fit_dist(cfg)
        if args.command == "regress":
            return cmd_regress(cfg, args.metrics, args.censor)
        if args.command == "export-edges":
            return cmd_export_edges(cfg, args.threshold)
        parser.error(f"unknown command {args.command!r}")
    except (FileNotFoundError, IsADirectoryError, PermissionError, InputFormatError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CrisisnetError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
