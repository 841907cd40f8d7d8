"""End-to-end runs: labels -> pair dataset -> out-of-fold likelihoods ->
similarity network -> re-detection -> evaluation, plus the 16-cell grid
and its reporting."""
from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .detect import DetectorConfig, detect
from .features import SamplingConfig, build_dataset
from .graph import (
    Graph,
    Partition,
    deoverlap,
    load_communities,
    load_edge_list,
    prune_links,
    write_partition,
)
from .learn import LearnerConfig, cross_val_oof, cross_val_oof_all
from .metrics import MetricReport, evaluate, improvement_delta, pearson_with_ttest, weighted_modularity
from .weave import build_similarity_network

log = logging.getLogger(__name__)

MODES = ("statistical_physics", "ground_truth")
DETECTOR_NAMES = {"louvain": "Louvain", "leiden": "Leiden", "fast_greedy": "FG", "infomap": "Infomap"}
LEARNER_NAMES = {"dt": "DT", "rf": "RF", "xgb": "XGB", "vc": "VC"}
GRID_LEARNERS = ("dt", "rf", "xgb", "vc")
METRICS = ("q_weighted", "nmi", "ari")
LARGE_LINKS = 200_000


def format_name(learner: str, detector: str) -> str:
    """``("rf", "leiden") -> "RF-Leiden"``; ``vc_soft``/``vc_hard`` print as VC."""
    key = "vc" if learner.startswith("vc") else learner
    return f"{LEARNER_NAMES[key]}-{DETECTOR_NAMES[detector]}"


def parse_name(name: str) -> tuple[str, str]:
    left, _, right = name.partition("-")
    learners = {v: k for k, v in LEARNER_NAMES.items()}
    detectors = {v: k for k, v in DETECTOR_NAMES.items()}
    if left not in learners or right not in detectors:
        raise ValueError(f"not a learner-detector name: {name!r}")
    return learners[left], detectors[right]


@dataclass
class Dataset:
    """A graph ready for the pipeline, with aligned ground truth if known."""

    name: str
    graph: Graph
    truth: Partition | None = None


def load_dataset(
    edges_path,
    communities_path=None,
    communities_format: str = "node-label-pairs",
    name: str | None = None,
    preprocess_seed: int = 0,
    allow_large: bool = False,
) -> Dataset:
    """Read an edge list and optional ground truth.

    Ground truth is made crisp (largest community, random ties), singleton
    communities are removed and links touching dropped nodes are pruned.
    """
    graph = load_edge_list(edges_path)
    if graph.link_count > LARGE_LINKS and not allow_large:
        raise MemoryError(
            f"{graph.link_count} links: pair sampling and tree fitting at this scale need "
            "several GB of memory; pass allow_large=True (--allow-large) to proceed"
        )
    truth = None
    if communities_path is not None:
        raw = load_communities(communities_path, communities_format)
        crisp = deoverlap(raw, preprocess_seed)
        graph = prune_links(graph, crisp)
        truth = crisp.partition_for(graph)
    if name is None:
        name = os.path.splitext(os.path.basename(os.fspath(edges_path)))[0]
    return Dataset(name, graph, truth)


@dataclass
class RunConfig:
    """One learner-detector configuration.

    With ``learner_kind="vc"`` both voting rules are run and the better one
    by ``selection_metric`` is kept. In statistical-physics mode
    ``detector_g`` defaults to ``detector_b``.
    """

    mode: str = "statistical_physics"
    detector_b: DetectorConfig = field(default_factory=lambda: DetectorConfig("leiden"))
    detector_g: DetectorConfig | None = None
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    seeds: Sequence[int] = tuple(range(10))
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    folds: int = 5
    epsilon: float = 1e-6
    add_second_order_links: bool = False
    selection_metric: str | None = None
    learner_kind: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.detector_g is None:
            self.detector_g = self.detector_b
        if self.mode == "statistical_physics" and self.detector_g.detector != self.detector_b.detector:
            raise ValueError("statistical-physics mode uses the same detector in both detection steps")
        if self.selection_metric is None:
            self.selection_metric = "q_weighted" if self.mode == "statistical_physics" else "nmi"
        if self.selection_metric not in METRICS:
            raise ValueError(f"unknown selection metric {self.selection_metric!r}")
        if self.learner_kind not in (None, "vc"):
            raise ValueError("learner_kind is either None or 'vc'")
        if not list(self.seeds):
            raise ValueError("need at least one seed")

    @property
    def name(self) -> str:
        return format_name(self.learner_kind or self.learner.learner, self.detector_g.detector)


@dataclass
class SeedResult:
    seed: int
    report: MetricReport
    q_step_b: float | None
    partition: Partition
    partition_step_b: Partition | None
    similarity: object = None


@dataclass
class RunRecord:
    """Outcome of one configuration (or one original detector) over seeds."""

    name: str
    rule: str
    dataset: str
    seeds: list[int]
    per_seed: list[MetricReport]
    q_weighted: float
    nmi: float | None
    ari: float | None
    similarity_gap: float | None
    seconds: float
    learner: str | None = None
    detector: str | None = None
    vc_rule: str | None = None
    failed: str | None = None

    def metric(self, key: str) -> float | None:
        return getattr(self, key)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_seed"] = [r.to_dict() for r in self.per_seed]
        return d


def _mean(values: Iterable[float | None]) -> float | None:
    vals = list(values)
    if not vals or any(v is None for v in vals):
        return None
    return float(np.mean(vals))


def _record(name, rule, dataset, seeds, reports, seconds, **extra) -> RunRecord:
    return RunRecord(
        name=name,
        rule=rule,
        dataset=dataset,
        seeds=list(seeds),
        per_seed=reports,
        q_weighted=_mean(r.q_weighted for r in reports),
        nmi=_mean(r.nmi for r in reports),
        ari=_mean(r.ari for r in reports),
        similarity_gap=_mean(r.similarity_gap for r in reports),
        seconds=seconds,
        **extra,
    )


def _labels_for_training(dataset: Dataset, config: RunConfig, seed: int) -> tuple[Partition, Partition | None, float | None]:
    if config.mode == "ground_truth":
        if dataset.truth is None:
            raise ValueError("ground-truth mode needs a community file")
        return dataset.truth, None, None
    # ground truth is deliberately not consulted here
    det = detect(dataset.graph, replace(config.detector_b, rng_seed=seed))
    return det.partition, det.partition, weighted_modularity(dataset.graph, det.partition)


def _finish(dataset: Dataset, config: RunConfig, seed: int, ds, prob, step_b, q_b) -> SeedResult:
    sim = build_similarity_network(
        dataset.graph, ds.with_probabilities(prob), config.epsilon, config.add_second_order_links
    )
    det = detect(sim.graph, replace(config.detector_g, rng_seed=seed))
    report = evaluate(sim.graph, det.partition, dataset.truth, sim)
    return SeedResult(seed, report, q_b, det.partition, step_b, sim)


def run_seed(dataset: Dataset, config: RunConfig, seed: int) -> SeedResult:
    """One seed of one configuration (``learner`` must not be ``"vc"``)."""
    labels, step_b, q_b = _labels_for_training(dataset, config, seed)
    ds = build_dataset(dataset.graph, labels, config.sampling, rng_seed=seed)
    ds = cross_val_oof(ds, replace(config.learner, rng_seed=seed), config.folds)
    return _finish(dataset, config, seed, ds, ds.oof_probability, step_b, q_b)


def _save_seed(dataset: Dataset, res: SeedResult, out_dir: str, stem: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    g = dataset.graph
    with open(os.path.join(out_dir, f"{stem}_seed{res.seed}_similarity.txt"), "w") as fh:
        res.similarity.write(fh)
    with open(os.path.join(out_dir, f"{stem}_seed{res.seed}_partition.txt"), "w") as fh:
        write_partition(g, res.partition, fh)
    if res.partition_step_b is not None:
        with open(os.path.join(out_dir, f"{stem}_seed{res.seed}_step_b_partition.txt"), "w") as fh:
            write_partition(g, res.partition_step_b, fh)


def run_pipeline(dataset: Dataset, config: RunConfig, artifacts_dir: str | None = None) -> RunRecord:
    """Run every seed of ``config`` and aggregate.

    Any failing seed aborts the run with an error naming the seed and stage.
    With ``artifacts_dir`` the weighted similarity network and the detected
    partitions (step-b partition too, in statistical-physics mode) of every
    seed are written there.
    """
    start = time.perf_counter()
    kind = config.learner_kind or config.learner.learner
    if kind == "vc":
        candidates = {}
        for rule in ("soft", "hard"):
            sub = replace(config, learner=replace(config.learner, learner=f"vc_{rule}"), learner_kind=None)
            sub_dir = None if artifacts_dir is None else os.path.join(artifacts_dir, f"vc_{rule}")
            candidates[rule] = run_pipeline(dataset, sub, sub_dir)
        rule = _pick_vc(candidates, config.selection_metric)
        rec = candidates[rule]
        rec.seconds = time.perf_counter() - start
        return rec
    reports = []
    for seed in config.seeds:
        try:
            res = run_seed(dataset, config, seed)
        except Exception as exc:
            raise RuntimeError(f"{config.name} on {dataset.name}, seed {seed}: {exc}") from exc
        reports.append(res.report)
        if artifacts_dir is not None:
            _save_seed(dataset, res, artifacts_dir, config.name)
    vc_rule = kind[3:] if kind.startswith("vc_") else None
    return _record(
        config.name,
        config.mode,
        dataset.name,
        config.seeds,
        reports,
        time.perf_counter() - start,
        learner="vc" if vc_rule else kind,
        detector=config.detector_g.detector,
        vc_rule=vc_rule,
    )


def _pick_vc(candidates: dict[str, RunRecord], metric: str) -> str:
    soft, hard = candidates["soft"].metric(metric), candidates["hard"].metric(metric)
    if soft is None or hard is None:
        return "hard" if soft is None and hard is not None else "soft"
    return "hard" if hard > soft else "soft"


def run_baseline(dataset: Dataset, detector: str, seeds: Sequence[int], base: DetectorConfig | None = None) -> RunRecord:
    """An original detector on the unweighted graph."""
    start = time.perf_counter()
    base = base or DetectorConfig(detector)
    reports = []
    for seed in seeds:
        det = detect(dataset.graph, replace(base, detector=detector, rng_seed=seed))
        reports.append(evaluate(dataset.graph, det.partition, dataset.truth))
    return _record(
        DETECTOR_NAMES[detector], "original", dataset.name, seeds, reports, time.perf_counter() - start, detector=detector
    )


def _grid_seed(dataset: Dataset, mode: str, seed: int, learner: LearnerConfig, sampling: SamplingConfig,
               folds: int, epsilon: float, detector_base: DetectorConfig,
               detectors: Sequence[str] = tuple(DETECTOR_NAMES)) -> dict:
    """All 5 learner variants x 4 detectors for one seed.

    Training labels, pair datasets and cross-validation folds are shared
    wherever the individual runs would have produced identical ones. A
    failing cell stores its error message in place of a report.
    """
    out: dict[tuple[str, str], MetricReport | str] = {}
    shared = None
    kinds = ("dt", "rf", "xgb", "vc_soft", "vc_hard")
    for det_name in detectors:
        dcfg = replace(detector_base, detector=det_name)
        cfg = RunConfig(mode, dcfg, dcfg, learner, (seed,), sampling, folds, epsilon)
        try:
            if shared is not None:
                ds, probs, step_b, q_b = shared
            else:
                labels, step_b, q_b = _labels_for_training(dataset, cfg, seed)
                ds = build_dataset(dataset.graph, labels, sampling, rng_seed=seed)
                probs = cross_val_oof_all(ds, replace(learner, rng_seed=seed), folds)
                if mode == "ground_truth":
                    shared = (ds, probs, step_b, q_b)
        except Exception as exc:
            for kind in kinds:
                out[(kind, det_name)] = f"seed {seed}: {exc}"
            continue
        for kind in kinds:
            try:
                out[(kind, det_name)] = _finish(dataset, cfg, seed, ds, probs[kind], step_b, q_b).report
            except Exception as exc:
                out[(kind, det_name)] = f"seed {seed}: {exc}"
    return out


def run_grid(
    dataset: Dataset,
    mode: str,
    seeds: Sequence[int] = tuple(range(10)),
    learner: LearnerConfig | None = None,
    sampling: SamplingConfig | None = None,
    folds: int = 5,
    epsilon: float = 1e-6,
    detector_base: DetectorConfig | None = None,
    workers: int = 1,
    detectors: Sequence[str] | None = None,
) -> list[RunRecord]:
    """The 16 learner-detector cells plus the 4 original detectors.

    VC cells keep the better voting rule by the mode's headline metric
    (Q^w for statistical physics, NMI for ground truth). A cell with a
    failing seed is returned with ``failed`` set and no means; the other
    cells are unaffected. ``workers > 1`` spreads seeds over processes.
    ``detectors`` restricts the grid (and the baselines) to a subset.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    learner = learner or LearnerConfig()
    sampling = sampling or SamplingConfig()
    detector_base = detector_base or DetectorConfig()
    seeds = list(seeds)
    metric = "q_weighted" if mode == "statistical_physics" else "nmi"

    start = time.perf_counter()
    detectors = tuple(DETECTOR_NAMES) if detectors is None else tuple(detectors)
    unknown = set(detectors) - set(DETECTOR_NAMES)
    if unknown:
        raise ValueError(f"unknown detectors {sorted(unknown)}")
    args = [(dataset, mode, s, learner, sampling, folds, epsilon, detector_base, detectors) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(_grid_seed, *zip(*args)))
    else:
        per_seed = [_grid_seed(*a) for a in args]
    elapsed = time.perf_counter() - start

    def cell(kind: str, det_name: str, name: str, vc_rule: str | None = None) -> RunRecord:
        got = [res[(kind, det_name)] for res in per_seed]
        errors = [g for g in got if isinstance(g, str)]
        extra = dict(learner=kind[:2] if vc_rule else kind, detector=det_name, vc_rule=vc_rule)
        if errors:
            log.warning("grid cell %s failed: %s", name, errors[0])
            return _record(name, mode, dataset.name, seeds, [], elapsed, failed="; ".join(errors), **extra)
        return _record(name, mode, dataset.name, seeds, got, elapsed, **extra)

    records: list[RunRecord] = []
    for det_name in detectors:
        for kind in GRID_LEARNERS:
            name = format_name(kind, det_name)
            if kind == "vc":
                cand = {rule: cell(f"vc_{rule}", det_name, name, rule) for rule in ("soft", "hard")}
                records.append(cand[_pick_vc(cand, metric)])
            else:
                records.append(cell(kind, det_name, name))
    for det_name in detectors:
        records.append(run_baseline(dataset, det_name, seeds, detector_base))
    return records


# -- reporting ---------------------------------------------------------------

@dataclass
class Report:
    rows: list[dict]
    deltas: list[dict]
    correlations: list[dict]
    correlation_inputs: list[dict]
    notices: list[str]


def best_record(records: Sequence[RunRecord], metric: str, rule: str | None = None) -> RunRecord | None:
    pool = [r for r in records if (rule is None or r.rule == rule) and r.failed is None and r.metric(metric) is not None]
    return max(pool, key=lambda r: r.metric(metric)) if pool else None


def report(records: Sequence[RunRecord], grouping: str = "datasets") -> Report:
    """Tables, improvement deltas and similarity-gap correlations.

    ``grouping="datasets"`` correlates, across datasets, the similarity gap
    of each dataset's best proposed record with that record's NMI/ARI (needs
    at least 3 datasets). ``grouping="configurations"`` correlates across
    the proposed records of each dataset separately.
    """
    if not records:
        raise ValueError("nothing to report")
    rows = []
    for r in records:
        for m in METRICS:
            v = r.metric(m)
            if v is not None:
                rows.append({"dataset": r.dataset, "rule": r.rule, "method": r.name, "metric": m, "value": v})

    deltas = []
    datasets = sorted({r.dataset for r in records})
    for ds in datasets:
        sub = [r for r in records if r.dataset == ds]
        for rule in MODES:
            for m in METRICS:
                prop, orig = best_record(sub, m, rule), best_record(sub, m, "original")
                if prop is None or orig is None:
                    continue
                try:
                    d = improvement_delta(prop.metric(m), orig.metric(m))
                except ZeroDivisionError:
                    d = None
                deltas.append({
                    "dataset": ds, "rule": rule, "metric": m,
                    "best_proposed": prop.metric(m), "proposed_method": prop.name,
                    "best_original": orig.metric(m), "original_method": orig.name,
                    "delta_percent": d,
                })

    correlations, inputs, notices = [], [], []
    for rule in MODES:
        for m in ("nmi", "ari"):
            if grouping == "datasets":
                groups = {"all": []}
                for ds in datasets:
                    best = best_record([r for r in records if r.dataset == ds], m, rule)
                    if best is not None and best.similarity_gap is not None:
                        groups["all"].append((ds, best.name, best.similarity_gap, best.metric(m)))
            elif grouping == "configurations":
                groups = {
                    ds: [(ds, r.name, r.similarity_gap, r.metric(m)) for r in records
                         if r.dataset == ds and r.rule == rule and r.failed is None
                         and r.similarity_gap is not None and r.metric(m) is not None]
                    for ds in datasets
                }
            else:
                raise ValueError(f"unknown grouping {grouping!r}")
            for group, pts in groups.items():
                inputs.extend({"rule": rule, "metric": m, "group": group, "dataset": d, "method": n,
                               "similarity_gap": x, "value": y} for d, n, x, y in pts)
                if len(pts) < 3:
                    if pts:
                        notices.append(f"correlation skipped for {rule}/{m}/{group}: {len(pts)} points, need 3")
                    continue
                xs, ys = [p[2] for p in pts], [p[3] for p in pts]
                try:
                    c = pearson_with_ttest(xs, ys)
                except ValueError as exc:
                    notices.append(f"correlation skipped for {rule}/{m}/{group}: {exc}")
                    continue
                correlations.append({"rule": rule, "metric": m, "group": group, "r": c.r, "p_value": c.p_value, "n": c.n})
    if not correlations and not notices:
        notices.append("correlation skipped: no records with both a similarity gap and ground-truth scores")
    return Report(rows, deltas, correlations, inputs, notices)


def _write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def write_report(rep: Report, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "tables.csv"), rep.rows)
    _write_csv(os.path.join(out_dir, "deltas.csv"), rep.deltas)
    _write_csv(os.path.join(out_dir, "correlation_inputs.csv"), rep.correlation_inputs)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(asdict(rep), fh, indent=2)


def write_records(records: Sequence[RunRecord], out_dir: str, seeds_note: bool = True) -> None:
    """Per-run JSON files and an aggregate CSV (one row per record)."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for r in records:
        fname = f"{r.dataset}__{r.rule}__{r.name}.json".replace("/", "_")
        with open(os.path.join(out_dir, fname), "w") as fh:
            json.dump(r.to_dict(), fh, indent=2)
        rows.append({
            "dataset": r.dataset, "rule": r.rule, "method": r.name, "q_weighted": r.q_weighted,
            "nmi": r.nmi, "ari": r.ari, "similarity_gap": r.similarity_gap, "vc_rule": r.vc_rule,
            "seeds": " ".join(map(str, r.seeds)) if seeds_note else "", "seconds": r.seconds,
            "failed": r.failed or "",
        })
    _write_csv(os.path.join(out_dir, "records.csv"), rows)


def load_records(paths: Iterable[str]) -> list[RunRecord]:
    """Read records written by :func:`write_records` (JSON files)."""
    out = []
    for p in paths:
        with open(p) as fh:
            d = json.load(fh)
        d["per_seed"] = [_report_from_dict(x) for x in d["per_seed"]]
        out.append(RunRecord(**d))
    return out


def _report_from_dict(d: dict) -> MetricReport:
    from .metrics import CommunityStats

    d = dict(d)
    d.pop("similarity_gap", None)
    d["per_community"] = [CommunityStats(**c) for c in d.get("per_community", [])]
    return MetricReport(**d)
