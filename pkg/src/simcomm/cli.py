"""Command-line entry point: ``simcomm <command> ...``.

Commands
--------
generate   grow a benchmark graph and write its edge list and communities
detect     run one detector on an (optionally weighted) edge list
pipeline   run one learner-detector configuration over seeds
grid       run all 16 configurations plus the 4 original detectors
report     build tables, improvement deltas and correlations from records
metrics    score one partition file against another
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import glob
import json
import logging
import os
import sys

from .bench import BenchmarkParams, generate, intra_link_fraction
from .detect import DetectorConfig, detect
from .features import SamplingConfig
from .graph import (
    load_edge_list,
    partition_to_json,
    read_partition,
    read_weighted_edge_list,
    write_edge_list,
    write_partition,
)
from .learn import LearnerConfig
from .metrics import align_common, ari, nmi, weighted_modularity
from .pipeline import (
    RunConfig,
    load_dataset,
    load_records,
    report,
    run_grid,
    run_pipeline,
    write_records,
    write_report,
)

log = logging.getLogger("simcomm")

SECTIONS = ("run", "detector_b", "detector_g", "learner", "sampling")
RUN_DEFAULTS = {
    "mode": "statistical_physics",
    "edges": "",
    "communities": "",
    "communities_format": "node-label-pairs",
    "name": "",
    "seeds": "0 1 2 3 4 5 6 7 8 9",
    "output": "results",
    "folds": "5",
    "epsilon": "1e-6",
    "add_second_order_links": "false",
    "selection_metric": "",
    "allow_large": "false",
    "workers": "1",
}


# -- settings ----------------------------------------------------------------

def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _seeds(text: str) -> list[int]:
    """``"0 1 2"``, ``"0,1,2"`` or a range ``"0-9"``."""
    text = text.strip()
    if "-" in text and " " not in text and "," not in text and not text.startswith("-"):
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.replace(",", " ").split()]


def _coerce(cls, values: dict[str, str]):
    """Build dataclass ``cls`` from strings, typed by the field defaults."""
    kwargs = {}
    fields = {f.name: f for f in dataclasses.fields(cls)}
    defaults = cls()
    for key, raw in values.items():
        if key not in fields:
            raise ValueError(f"unknown key {key!r} for {cls.__name__}")
        default = getattr(defaults, key)
        if isinstance(default, bool):
            kwargs[key] = _bool(raw)
        elif isinstance(default, int):
            kwargs[key] = int(raw)
        elif isinstance(default, float):
            kwargs[key] = float(raw)
        elif isinstance(default, tuple):
            kwargs[key] = tuple(_bool(x) for x in raw.replace(",", " ").split())
        elif default is None:
            kwargs[key] = None if raw.strip().lower() in ("", "none") else int(raw)
        else:
            kwargs[key] = raw.strip()
    return cls(**kwargs)


def read_settings(path: str | None) -> dict[str, dict[str, str]]:
    """INI file -> ``{section: {key: value}}`` with run defaults filled in."""
    settings = {s: {} for s in SECTIONS}
    settings["run"].update(RUN_DEFAULTS)
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        if not parser.read(path):
            raise FileNotFoundError(path)
        for section in parser.sections():
            if section not in settings:
                raise ValueError(f"unknown config section [{section}]")
            settings[section].update(parser[section])
    return settings


def apply_overrides(settings: dict, args: argparse.Namespace) -> dict:
    for flag, (section, key) in {
        "edges": ("run", "edges"),
        "communities": ("run", "communities"),
        "mode": ("run", "mode"),
        "seeds": ("run", "seeds"),
        "out": ("run", "output"),
        "workers": ("run", "workers"),
    }.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[section][key] = str(value)
    if getattr(args, "detector", None):
        settings["detector_b"]["detector"] = args.detector
        settings["detector_g"]["detector"] = args.detector
    if getattr(args, "learner", None):
        settings["learner"]["learner"] = args.learner
    if getattr(args, "allow_large", False):
        settings["run"]["allow_large"] = "true"
    for item in getattr(args, "set", None) or []:
        left, eq, value = item.partition("=")
        section, dot, key = left.partition(".")
        if not eq or not dot or section not in settings:
            raise ValueError(f"--set expects section.key=value, got {item!r}")
        settings[section][key] = value
    return settings


def build_run_config(settings: dict) -> RunConfig:
    run = settings["run"]
    learner = dict(settings["learner"])
    kind = None
    if learner.get("learner") == "vc":
        kind = "vc"
        learner["learner"] = "vc_soft"
    det_b = _coerce(DetectorConfig, settings["detector_b"])
    det_g = _coerce(DetectorConfig, settings["detector_g"]) if settings["detector_g"] else det_b
    return RunConfig(
        mode=run["mode"],
        detector_b=det_b,
        detector_g=det_g,
        learner=_coerce(LearnerConfig, learner),
        seeds=_seeds(run["seeds"]),
        sampling=_coerce(SamplingConfig, settings["sampling"]),
        folds=int(run["folds"]),
        epsilon=float(run["epsilon"]),
        add_second_order_links=_bool(run["add_second_order_links"]),
        selection_metric=run["selection_metric"] or None,
        learner_kind=kind,
    )


def _dataset(settings: dict, need_truth: bool = False):
    run = settings["run"]
    if not run["edges"]:
        raise ValueError("no edge list given (--edges or [run] edges)")
    if need_truth and not run["communities"]:
        raise ValueError("ground-truth mode needs a community file (--communities or [run] communities)")
    return load_dataset(
        run["edges"],
        run["communities"] or None,
        run["communities_format"],
        name=run["name"] or None,
        allow_large=_bool(run["allow_large"]),
    )


# -- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    params = BenchmarkParams(args.m, args.nodes, args.beta, args.p_intra, args.k_init, args.seed)
    graph, planted = generate(params)
    os.makedirs(os.path.dirname(os.path.abspath(args.prefix)), exist_ok=True)
    with open(f"{args.prefix}_edges.txt", "w") as fh:
        write_edge_list(graph, fh, weighted=False)
    with open(f"{args.prefix}_communities.txt", "w") as fh:
        write_partition(graph, planted, fh)
    summary = dataclasses.asdict(params) | {
        "links": graph.link_count,
        "communities": planted.community_count,
        "intra_link_fraction": intra_link_fraction(graph, planted),
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_detect(args) -> int:
    graph = read_weighted_edge_list(args.edges) if args.weighted else load_edge_list(args.edges)
    cfg = DetectorConfig(args.detector, args.resolution, args.seed)
    res = detect(graph, cfg)
    if args.out:
        with open(args.out, "w") as fh:
            write_partition(graph, res.partition, fh)
    info = {
        "detector": args.detector,
        "rng_seed": args.seed,
        "resolution": args.resolution,
        "communities": res.partition.community_count,
        "objective": res.objective,
        "q_weighted": weighted_modularity(graph, res.partition),
        "passes": res.passes_used,
    }
    if args.json:
        info["partition"] = partition_to_json(graph, res.partition)["assignment"]
    print(json.dumps(info, indent=2))
    return 0


def _print_record(rec) -> None:
    def fmt(x):
        return "-" if x is None else f"{x:.4f}"

    line = f"{rec.dataset:>12} {rec.rule:>19} {rec.name:>12}  Qw={fmt(rec.q_weighted)} NMI={fmt(rec.nmi)} ARI={fmt(rec.ari)}"
    if rec.vc_rule:
        line += f"  ({rec.vc_rule} vote)"
    if rec.failed:
        line += f"  FAILED: {rec.failed}"
    print(line)


def cmd_pipeline(args) -> int:
    settings = apply_overrides(read_settings(args.config), args)
    config = build_run_config(settings)
    dataset = _dataset(settings, need_truth=config.mode == "ground_truth")
    out = settings["run"]["output"]
    rec = run_pipeline(dataset, config, artifacts_dir=os.path.join(out, "artifacts"))
    write_records([rec], out)
    _print_record(rec)
    return 0


def cmd_grid(args) -> int:
    settings = apply_overrides(read_settings(args.config), args)
    config = build_run_config(settings)
    dataset = _dataset(settings, need_truth=config.mode == "ground_truth")
    records = run_grid(
        dataset,
        config.mode,
        config.seeds,
        learner=config.learner,
        sampling=config.sampling,
        folds=config.folds,
        epsilon=config.epsilon,
        detector_base=config.detector_b,
        workers=int(settings["run"]["workers"]),
    )
    write_records(records, settings["run"]["output"])
    for rec in records:
        _print_record(rec)
    return 1 if all(r.failed for r in records if r.rule != "original") else 0


def cmd_report(args) -> int:
    paths: list[str] = []
    for p in args.records:
        if os.path.isdir(p):
            paths.extend(sorted(x for x in glob.glob(os.path.join(p, "*.json")) if os.path.basename(x) != "report.json"))
        else:
            paths.append(p)
    records = load_records(paths)
    rep = report(records, grouping=args.grouping)
    write_report(rep, args.out)
    for rec in records:
        _print_record(rec)
    for d in rep.deltas:
        if d["delta_percent"] is not None:
            print(f"delta {d['dataset']} {d['rule']} {d['metric']}: {d['delta_percent']:+.1f}% "
                  f"({d['proposed_method']} vs {d['original_method']})")
    for c in rep.correlations:
        print(f"pearson {c['rule']} {c['metric']} [{c['group']}]: r={c['r']:.3f} p={c['p_value']:.3g} n={c['n']}")
    for note in rep.notices:
        print(f"note: {note}")
    return 0


def cmd_metrics(args) -> int:
    ids_a, a = read_partition(args.partition)
    ids_b, b = read_partition(args.truth)
    pa, pb, shared = align_common(ids_a, a, ids_b, b)
    info = {"nodes": shared, "nodes_not_shared": len(ids_a) + len(ids_b) - 2 * shared, "nmi": nmi(pa, pb), "ari": ari(pa, pb)}
    if args.edges:
        graph = read_weighted_edge_list(args.edges) if args.weighted else load_edge_list(args.edges)
        _, part = read_partition(args.partition, graph)
        info["q_weighted"] = weighted_modularity(graph, part)
    print(json.dumps(info, indent=2))
    return 0


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file with [run], [detector_b], [detector_g], [learner], [sampling]")
    p.add_argument("--edges")
    p.add_argument("--communities")
    p.add_argument("--mode", choices=("statistical_physics", "ground_truth"))
    p.add_argument("--detector", choices=("louvain", "leiden", "fast_greedy", "infomap"))
    p.add_argument("--seeds", help="'0 1 2', '0,1,2' or '0-9'")
    p.add_argument("--out", help="output directory")
    p.add_argument("--allow-large", action="store_true", help="accept graphs above 200k links")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override any config field")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simcomm", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="grow a benchmark graph")
    p.add_argument("prefix", help="writes PREFIX_edges.txt and PREFIX_communities.txt")
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--beta", type=float, default=0.15)
    p.add_argument("--p-intra", type=float, default=0.9)
    p.add_argument("--k-init", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="run one detector")
    p.add_argument("edges")
    p.add_argument("--detector", default="leiden", choices=("louvain", "leiden", "fast_greedy", "infomap"))
    p.add_argument("--weighted", action="store_true", help="read 'u v w' lines")
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="partition file to write")
    p.add_argument("--json", action="store_true", help="include the assignment in the printed JSON")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("pipeline", help="run one learner-detector configuration")
    _run_flags(p)
    p.add_argument("--learner", choices=("dt", "rf", "xgb", "vc", "vc_soft", "vc_hard"))
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("grid", help="run the 16-cell grid plus original detectors")
    _run_flags(p)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("report", help="tables, deltas and correlations from record files")
    p.add_argument("records", nargs="+", help="record JSON files or directories")
    p.add_argument("--out", default="report")
    p.add_argument("--grouping", choices=("datasets", "configurations"), default="datasets")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("metrics", help="score a partition file against another")
    p.add_argument("partition")
    p.add_argument("truth")
    p.add_argument("--edges", help="also report Q^w of PARTITION on this graph")
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, MemoryError, RuntimeError) as exc:
        print(f"simcomm {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
