from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..features import PairDataset
from .models import LearnerConfig, fit_model, predict_proba, vote


def stratified_folds(y, folds: int, rng_seed: int = 0) -> np.ndarray:
    """Fold index for every sample.

    Samples are shuffled, grouped by class and dealt round-robin, so both
    the overall fold sizes and the per-class counts differ by at most one.
    """
    y = np.asarray(y).reshape(-1)
    n = len(y)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if n < folds:
        raise ValueError(f"{n} samples cannot fill {folds} folds")
    rng = np.random.default_rng(rng_seed)
    perm = rng.permutation(n)
    perm = perm[np.argsort(y[perm], kind="stable")]
    out = np.empty(n, dtype=np.int64)
    out[perm] = np.arange(n) % folds
    return out


def _check(dataset: PairDataset, folds: int) -> None:
    # a single-class dataset is allowed: every learner then predicts that class
    if len(dataset) < folds:
        raise ValueError(f"{len(dataset)} samples cannot fill {folds} folds")


def cross_val_oof(dataset: PairDataset, config: LearnerConfig, folds: int = 5) -> PairDataset:
    """Out-of-fold class-1 probability for every sample.

    Each fold is predicted by a model trained on the remaining folds.
    """
    _check(dataset, folds)
    fold = stratified_folds(dataset.y, folds, config.rng_seed)
    prob = np.full(len(dataset), np.nan)
    for f in range(folds):
        test = fold == f
        model = fit_model(dataset.X[~test], dataset.y[~test], config)
        prob[test] = predict_proba(model, dataset.X[test])
    return dataset.with_probabilities(prob)


def cross_val_oof_all(dataset: PairDataset, config: LearnerConfig, folds: int = 5) -> dict[str, np.ndarray]:
    """Out-of-fold probabilities of all five learners on shared folds.

    DT, RF and XGB are trained once per fold; the two voting rules are
    combined from the same fold models, which is exactly what fitting a
    voting model per fold would produce.
    """
    _check(dataset, folds)
    fold = stratified_folds(dataset.y, folds, config.rng_seed)
    out = {k: np.full(len(dataset), np.nan) for k in ("dt", "rf", "xgb", "vc_soft", "vc_hard")}
    for f in range(folds):
        test = fold == f
        Xtr, ytr, Xte = dataset.X[~test], dataset.y[~test], dataset.X[test]
        members = []
        for kind in ("dt", "rf", "xgb"):
            p = predict_proba(fit_model(Xtr, ytr, replace(config, learner=kind)), Xte)
            out[kind][test] = p
            members.append(p)
        out["vc_soft"][test] = vote(members, "soft")
        out["vc_hard"][test] = vote(members, "hard")
    return out
