from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.special import expit

from .tree import Tree, bin_features, build_tree

LEARNERS = ("dt", "rf", "xgb", "vc_soft", "vc_hard")
BASE_SCORE_CLAMP = 10.0


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters for every learner family.

    Random-forest members use ``dt_max_depth`` and ``dt_min_samples_leaf``;
    with ``rf_trees=1`` and ``rf_bootstrap=False`` a forest is exactly one
    decision tree.
    """

    learner: str = "dt"
    dt_max_depth: int = 6
    dt_min_samples_leaf: int = 20
    rf_trees: int = 100
    rf_feature_subsample: float = 1.0
    rf_row_subsample: float = 1.0
    rf_bootstrap: bool = True
    xgb_rounds: int = 100
    xgb_learning_rate: float = 0.1
    xgb_max_depth: int = 3
    xgb_lambda: float = 1.0
    xgb_min_child_weight: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}; expected one of {LEARNERS}")
        for name in ("dt_max_depth", "dt_min_samples_leaf", "rf_trees", "xgb_max_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.xgb_rounds < 0:
            raise ValueError("xgb_rounds must be non-negative")
        for name in ("rf_feature_subsample", "rf_row_subsample"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")
        if not self.xgb_learning_rate > 0:
            raise ValueError("xgb_learning_rate must be positive")
        if self.xgb_lambda < 0:
            raise ValueError("xgb_lambda must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FittedModel:
    """A trained learner.

    ``trees`` hold class-1 probabilities for ``dt``/``rf`` and raw
    log-odds increments (already scaled by the learning rate) for ``xgb``.
    Voting models keep their three members in ``member_models``.
    """

    kind: str
    n_features: int
    trees: list[Tree] = field(default_factory=list)
    base_score: float = 0.0
    member_models: list["FittedModel"] = field(default_factory=list)


def _check_rows(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array")
    y = np.asarray(y).reshape(-1)
    if len(X) == 0:
        raise ValueError("cannot fit on an empty dataset")
    if X.shape[1] == 0:
        raise ValueError("need at least one feature")
    if len(y) != len(X):
        raise ValueError("features and labels differ in length")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return X, y.astype(float)


def fit_decision_tree(X, y, config: LearnerConfig | None = None) -> FittedModel:
    """CART classification tree with Gini impurity."""
    config = config or LearnerConfig("dt")
    X, y = _check_rows(X, y)
    tree = build_tree(X, y=y, max_depth=config.dt_max_depth, min_samples_leaf=config.dt_min_samples_leaf)
    return FittedModel("dt", X.shape[1], [tree])


def fit_random_forest(X, y, config: LearnerConfig | None = None) -> FittedModel:
    """Bagged Gini trees with per-split feature subsampling."""
    config = config or LearnerConfig("rf")
    X, y = _check_rows(X, y)
    n, F = X.shape
    rng = np.random.default_rng(config.rng_seed)
    k_feat = max(1, int(round(config.rf_feature_subsample * F)))
    n_rows = max(1, int(round(config.rf_row_subsample * n)))
    values, codes = bin_features(X)
    trees = []
    for _ in range(config.rf_trees):
        if config.rf_bootstrap:
            rows = rng.integers(0, n, size=n_rows)
        elif n_rows < n:
            rows = np.sort(rng.choice(n, size=n_rows, replace=False))
        else:
            rows = np.arange(n)
        trees.append(
            build_tree(
                X[rows],
                y=y[rows],
                max_depth=config.dt_max_depth,
                min_samples_leaf=config.dt_min_samples_leaf,
                max_features=k_feat if k_feat < F else None,
                rng=rng,
                binned=(values, codes[rows]),
            )
        )
    return FittedModel("rf", F, trees)


def _log_odds(p: float) -> float:
    if p <= 0.0:
        return -BASE_SCORE_CLAMP
    if p >= 1.0:
        return BASE_SCORE_CLAMP
    return float(np.clip(np.log(p / (1.0 - p)), -BASE_SCORE_CLAMP, BASE_SCORE_CLAMP))


def fit_gradient_boost(X, y, config: LearnerConfig | None = None, trace: list | None = None) -> FittedModel:
    """Binary-logistic boosting with second-order leaf values.

    The prior is the log-odds of the class-1 rate (clamped to +-10). Each
    round fits a regression tree to the gradient ``p - y`` and hessian
    ``p (1 - p)`` of the log-loss; leaf values ``-G/(H + lambda)`` are
    shrunk by the learning rate. If ``trace`` is a list, the training
    log-loss before the first and after every round is appended to it.
    """
    config = config or LearnerConfig("xgb")
    X, y = _check_rows(X, y)
    base = _log_odds(float(y.mean()))
    raw = np.full(len(y), base)
    binned = bin_features(X)
    trees = []
    if trace is not None:
        trace.append(log_loss(y, expit(raw)))
    for _ in range(config.xgb_rounds):
        p = expit(raw)
        tree = build_tree(
            X,
            grad=p - y,
            hess=p * (1.0 - p),
            max_depth=config.xgb_max_depth,
            min_samples_leaf=1,
            lam=config.xgb_lambda,
            min_child_weight=config.xgb_min_child_weight,
            binned=binned,
        )
        tree.value *= config.xgb_learning_rate
        trees.append(tree)
        raw += tree.predict(X)
        if trace is not None:
            trace.append(log_loss(y, expit(raw)))
    return FittedModel("xgb", X.shape[1], trees, base_score=base)


def fit_model(X, y, config: LearnerConfig) -> FittedModel:
    """Fit the learner named by ``config.learner``."""
    if config.learner == "dt":
        return fit_decision_tree(X, y, config)
    if config.learner == "rf":
        return fit_random_forest(X, y, config)
    if config.learner == "xgb":
        return fit_gradient_boost(X, y, config)
    members = [
        fit_decision_tree(X, y, replace(config, learner="dt")),
        fit_random_forest(X, y, replace(config, learner="rf")),
        fit_gradient_boost(X, y, replace(config, learner="xgb")),
    ]
    return FittedModel(config.learner, members[0].n_features, member_models=members)


def predict_proba(model: FittedModel, features) -> np.ndarray | float:
    """Class-1 probability for one feature vector or a ``(n, F)`` array."""
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    X = x.reshape(1, -1) if single else x
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    if model.kind == "dt":
        p = model.trees[0].predict(X)
    elif model.kind == "rf":
        p = np.mean([t.predict(X) for t in model.trees], axis=0)
    elif model.kind == "xgb":
        raw = np.full(len(X), model.base_score)
        for t in model.trees:
            raw += t.predict(X)
        p = expit(raw)
    else:
        mode = "soft" if model.kind == "vc_soft" else "hard"
        p = vote([predict_proba(m, X) for m in model.member_models], mode)
    p = np.clip(p, 0.0, 1.0)
    return float(p[0]) if single else p


def vote(member_probs, mode: str = "soft") -> np.ndarray | float:
    """Combine the DT, RF and XGB probabilities.

    ``soft`` averages them; ``hard`` returns the fraction of members whose
    probability is at least 0.5 (0, 1/3, 2/3 or 1).
    """
    probs = [np.asarray(p, dtype=float) for p in member_probs]
    if len(probs) != 3:
        raise ValueError(f"voting needs exactly 3 members, got {len(probs)}")
    stack = np.stack(probs)
    if mode == "soft":
        out = stack.sum(axis=0) / 3.0
    elif mode == "hard":
        out = (stack >= 0.5).sum(axis=0) / 3.0
    else:
        raise ValueError(f"unknown voting mode {mode!r}")
    return float(out) if out.ndim == 0 else out


def log_loss(y, p, eps: float = 1e-15) -> float:
    y = np.asarray(y, dtype=float)
    p = np.clip(np.asarray(p, dtype=float), eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def model_summary(model: FittedModel, feature_names: list[str] | None = None) -> dict:
    """Tree counts, depths and impurity-decrease importances, JSON-ready."""
    names = feature_names or [f"f{i}" for i in range(model.n_features)]
    if model.member_models:
        return {"kind": model.kind, "members": [model_summary(m, names) for m in model.member_models]}
    imp = np.zeros(model.n_features)
    for t in model.trees:
        imp += t.feature_gain(model.n_features)
    total = imp.sum()
    return {
        "kind": model.kind,
        "n_trees": len(model.trees),
        "max_depth": max((t.depth for t in model.trees), default=0),
        "mean_leaves": float(np.mean([t.leaf_count for t in model.trees])) if model.trees else 0.0,
        "base_score": model.base_score,
        "feature_importance": {n: float(v / total) if total > 0 else 0.0 for n, v in zip(names, imp)},
    }
