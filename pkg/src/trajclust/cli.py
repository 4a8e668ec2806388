"""Command-line interface.

Subcommands: generate | cluster | sweep | evaluate.  Every command is
deterministic given its flags and seed; the effective configuration is
echoed into reports.  Exit codes: 0 success, 1 runtime failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, load_config
from .data import (
    Embedding,
    Labeling,
    labeling_from_tags,
    load_labeling,
    load_trajectories,
    save_labeling,
    save_matrix,
    save_trajectories,
)
from .evaluation import mutual_information, rand_index, v_measure
from .pipeline import METHODS, RunReport, format_report_table, run_method, sweep_ks
from .scenarios import SCENARIOS, ScenarioSpec, build_evaluation_sets, generate
from .seeding import derive_seed

_SET_NAMES = ("set1", "set2", "set3", "set4", "set5", "set6")


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="root random seed (default 42)")
    p.add_argument("--config", type=Path, default=None, help="key=value config file")
    p.add_argument("--threads", type=int, default=None, help="cap worker threads")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")


def _build_config(args: argparse.Namespace) -> Config:
    overrides: dict[str, object] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    cfg = load_config(args.config, overrides)
    if cfg.threads is not None:
        import numba

        numba.set_num_threads(max(1, min(cfg.threads, numba.config.NUMBA_NUM_THREADS)))
    return cfg


def _scenario_tag(raw: str) -> str:
    tag = raw.replace("-", "_")
    if tag not in SCENARIOS:
        raise argparse.ArgumentTypeError(f"unknown scenario {raw!r}; choose from {SCENARIOS}")
    return tag


def _save_embedding_csv(path: Path, ids: list[str], emb: Embedding) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for tid, row in zip(ids, emb.coords):
            fh.write(",".join([tid] + [f"{v:.17g}" for v in row]) + "\n")


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.sets:
        if args.sets != "table1":
            print(f"unknown set collection {args.sets!r}", file=sys.stderr)
            return 2
        sets = build_evaluation_sets(args.n, cfg.seed)
        for name in _SET_NAMES:
            tset = sets[name]
            save_trajectories(tset, out_dir / f"{name}.jsonl")
            counts: dict[str, int] = {}
            for t in tset:
                counts[t.truth_label] = counts.get(t.truth_label, 0) + 1
            summary = ", ".join(f"{s}={c}" for s, c in sorted(counts.items()))
            print(f"{name}: K={len(tset)} ({summary})")
        return 0

    spec = ScenarioSpec(
        scenario=args.scenario,
        count=args.count,
        length_range_s=tuple(args.lengths),
        lane_offset_m=cfg.gen.lane_offset_m,
        noise_sigma_m=cfg.gen.noise_sigma_m,
        perturb_scale=args.perturb_scale,
        seed=derive_seed(cfg.seed, "single", args.scenario),
    )
    tset = generate(spec)
    out = args.out or (out_dir / f"{args.scenario}.jsonl")
    save_trajectories(tset, out)
    print(f"{args.scenario}: {len(tset)} trajectories -> {out}")
    return 0


# ---------------------------------------------------------------------------
# cluster


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    if args.k != "auto":
        cfg = replace(cfg, cluster=replace(cfg.cluster, k=int(args.k)))
    tset = load_trajectories(args.input)
    set_name = args.input.stem
    report, artifacts = run_method(tset, args.method, cfg, set_name=set_name)

    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    labeling = Labeling(np.asarray(report.labels), report.selected_k)
    save_labeling(
        labeling,
        out_dir / f"{set_name}_{args.method}_labels.json",
        method=args.method,
        seed=cfg.seed,
        ids=tset.ids,
    )
    _save_embedding_csv(out_dir / f"{set_name}_{args.method}_embedding.csv", tset.ids, artifacts.final_embedding)
    if args.emit_intermediate:
        save_matrix(artifacts.cost, out_dir / f"{set_name}_{args.method}_cost.csv")
        if artifacts.minimax is not None:
            save_matrix(artifacts.minimax, out_dir / f"{set_name}_{args.method}_minimax.csv")
        if artifacts.pre_embedding is not None:
            _save_embedding_csv(
                out_dir / f"{set_name}_{args.method}_pre_embedding.csv", tset.ids, artifacts.pre_embedding
            )
    if args.emit_plot:
        from .svgplot import scatter_svg

        scatter_svg(
            artifacts.final_embedding.coords,
            np.asarray(report.labels),
            args.emit_plot,
            title=f"{set_name} {args.method} (k={report.selected_k})",
        )
    with (out_dir / "reports.jsonl").open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(report.to_dict()) + "\n")

    print(f"stages: {' -> '.join(report.stages)}")
    print(format_report_table([report]))
    return 0


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    cfg = replace(cfg, cluster=replace(cfg.cluster, k_min=args.k_min, k_max=args.k_max))
    tset = load_trajectories(args.input)
    set_name = args.input.stem
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            print(f"unknown method {m!r}; choose from {METHODS}", file=sys.stderr)
            return 2

    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    all_rows = []
    for method in methods:
        all_rows.extend(sweep_ks(tset, method, cfg, set_name=set_name))

    metric_names = ["silhouette"] + (["RI", "MI", "VM"] if tset.has_truth() else [])
    csv_path = out_dir / f"{set_name}_sweep.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write("set,method,metric,k,value\n")
        for metric in metric_names:
            for row in all_rows:
                fh.write(f"{row['set']},{row['method']},{metric},{row['k']},{row[metric]:.17g}\n")

    from .svgplot import line_svg

    ks = sorted({row["k"] for row in all_rows})
    for metric in metric_names:
        series = {
            method: np.array([row[metric] for row in all_rows if row["method"] == method])
            for method in methods
        }
        line_svg(
            np.array(ks, dtype=float),
            series,
            out_dir / f"{set_name}_sweep_{metric.lower()}.svg",
            title=f"{set_name}: {metric} over k",
            x_label="clusters k",
        )

    for method in methods:
        rows = [row for row in all_rows if row["method"] == method]
        peaks = {m: max(rows, key=lambda r: r[m])["k"] for m in metric_names}
        print(f"{method}: " + ", ".join(f"{m} peaks at k={k}" for m, k in peaks.items()))
    print(f"wrote {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(args: argparse.Namespace) -> int:
    _build_config(args)
    tset = load_trajectories(args.truth)
    if not tset.has_truth():
        print("truth file has unlabeled trajectories", file=sys.stderr)
        return 1
    pred, doc = load_labeling(args.pred)
    if "ids" in doc:
        order = {tid: i for i, tid in enumerate(doc["ids"])}
        missing = [tid for tid in tset.ids if tid not in order]
        if missing:
            print(f"prediction missing ids: {missing[:5]}", file=sys.stderr)
            return 1
        aligned = np.asarray([pred.labels[order[tid]] for tid in tset.ids])
        pred = Labeling(aligned, pred.k)
    elif len(pred) != len(tset):
        print("prediction length does not match truth and has no ids", file=sys.stderr)
        return 1
    truth = labeling_from_tags([t.truth_label for t in tset])
    result = {
        "RI": rand_index(truth, pred),
        "MI": mutual_information(truth, pred, normalized=True),
        "VM": v_measure(truth, pred),
    }
    text = json.dumps(result)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trajclust", description=__doc__)
    parser.add_argument("--version", action="version", version=f"trajclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write synthetic scenario trajectories")
    _common_flags(p)
    p.add_argument("--sets", choices=["table1"], default=None, help="emit the six standard sets")
    p.add_argument("--n", type=int, default=512, choices=[256, 512, 1024], help="count per scenario for --sets")
    p.add_argument("--scenario", type=_scenario_tag, default="cut_in", help="single-scenario mode")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--lengths", type=float, nargs=2, default=[3.0, 7.0], metavar=("MIN_S", "MAX_S"))
    p.add_argument("--perturb-scale", type=float, default=1.0)
    p.add_argument("--out", type=Path, default=None, help="output file (single-scenario mode)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="run one clustering method on a trajectory file")
    _common_flags(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--method", choices=METHODS, default="dtmm")
    p.add_argument("--k", default="auto", help="cluster count, or 'auto' for silhouette selection")
    p.add_argument("--emit-plot", type=Path, default=None, help="write an SVG scatter of the embedding")
    p.add_argument("--emit-intermediate", action="store_true", help="persist cost/minimax matrices")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sweep", help="score a range of cluster counts")
    _common_flags(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--methods", default="dtmm", help="comma-separated method list")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=7)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", help="score a labeling against ground truth")
    _common_flags(p)
    p.add_argument("--truth", type=Path, required=True, help="trajectory JSONL with labels")
    p.add_argument("--pred", type=Path, required=True, help="labeling JSON")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
