"""Greedy binary trees on dense numeric features.

Two split criteria share one builder:

* ``"gini"`` grows a classification tree on 0/1 labels, minimising the
  sample-weighted Gini impurity of the children; leaves store the class-1
  fraction.
* ``"newton"`` grows a regression tree on per-sample gradient/hessian
  pairs of a twice-differentiable loss, maximising the second-order gain
  ``G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - G^2/(H+lam)``; leaves store
  ``-G/(H+lam)``.

Candidate thresholds are midpoints between consecutive distinct sorted
values. A sample goes left when ``x < threshold``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Tree:
    """Array-encoded tree; ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    gain: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    @property
    def leaf_count(self) -> int:
        return int((self.feature < 0).sum())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(len(X), dtype=np.int64)
        active = np.arange(len(X))
        while active.size:
            f = self.feature[node[active]]
            inner = f >= 0
            active, f = active[inner], f[inner]
            if not active.size:
                break
            cur = node[active]
            go_left = X[active, f] < self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def feature_gain(self, n_features: int) -> np.ndarray:
        out = np.zeros(n_features)
        inner = self.feature >= 0
        np.add.at(out, self.feature[inner], self.gain[inner])
        return out

    def to_dict(self, node: int = 0) -> dict:
        if self.feature[node] < 0:
            return {"value": float(self.value[node]), "samples": int(self.n_samples[node])}
        return {
            "feature": int(self.feature[node]),
            "threshold": float(self.threshold[node]),
            "samples": int(self.n_samples[node]),
            "left": self.to_dict(int(self.left[node])),
            "right": self.to_dict(int(self.right[node])),
        }


def _gini_split(cnt, pos, min_leaf):
    """Best boundary for 0/1 labels given per-value counts.

    ``cnt``/``pos`` hold the sample count and class-1 count of each
    distinct feature value present in the node, in ascending value order.
    Returns ``(score, i)`` with ``score`` equal to ``n`` times the weighted
    child impurity for a split between values ``i`` and ``i + 1``, or
    ``(inf, -1)`` when no split is admissible.
    """
    n_left = np.cumsum(cnt[:-1], dtype=float)
    pos_left = np.cumsum(pos[:-1], dtype=float)
    n = float(cnt.sum())
    n_right = n - n_left
    pos_right = float(pos.sum()) - pos_left
    ok = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not ok.any():
        return np.inf, -1
    with np.errstate(invalid="ignore", divide="ignore"):
        score = 2.0 * pos_left * (n_left - pos_left) / n_left + 2.0 * pos_right * (n_right - pos_right) / n_right
    score = np.where(ok, score, np.inf)
    i = int(np.argmin(score))
    return float(score[i]), i


def _newton_split(cnt, gs, hs, min_leaf, lam, min_child_weight):
    """Newton-gain analogue of :func:`_gini_split` (per-value sums of
    gradients and hessians); returns ``(gain, i)`` or ``(-inf, -1)``."""
    n_left = np.cumsum(cnt[:-1])
    g_left = np.cumsum(gs[:-1])
    h_left = np.cumsum(hs[:-1])
    G, H = float(gs.sum()), float(hs.sum())
    g_right, h_right = G - g_left, H - h_left
    ok = (
        (n_left >= min_leaf)
        & (cnt.sum() - n_left >= min_leaf)
        & (h_left >= min_child_weight)
        & (h_right >= min_child_weight)
    )
    if not ok.any():
        return -np.inf, -1
    gain = g_left**2 / (h_left + lam) + g_right**2 / (h_right + lam) - G * G / (H + lam)
    gain = np.where(ok, gain, -np.inf)
    i = int(np.argmax(gain))
    return float(gain[i]), i


def bin_features(X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Distinct sorted values of every column and each entry's rank among them."""
    X = np.asarray(X, dtype=float)
    values, codes = [], np.empty(X.shape, dtype=np.int64)
    for f in range(X.shape[1]):
        u, inv = np.unique(X[:, f], return_inverse=True)
        values.append(u)
        codes[:, f] = inv.reshape(-1)
    return values, codes


def _midpoint(lo: float, hi: float) -> float:
    t = 0.5 * (lo + hi)
    return t if lo < t else hi


def build_tree(
    X: np.ndarray,
    *,
    y: np.ndarray | None = None,
    grad: np.ndarray | None = None,
    hess: np.ndarray | None = None,
    max_depth: int = 6,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    lam: float = 1.0,
    min_child_weight: float = 0.0,
    rng: np.random.Generator | None = None,
    binned: tuple[list[np.ndarray], np.ndarray] | None = None,
) -> Tree:
    """Grow one tree.

    Pass ``y`` for a Gini classification tree, or ``grad``/``hess`` for a
    Newton regression tree. ``max_features`` draws that many candidate
    features per split (random-forest style) from ``rng``. ``binned`` is
    the output of :func:`bin_features` for ``X``; callers fitting many
    trees on rows of one matrix pass it to avoid re-sorting (the value
    table may then contain values absent from ``X``, which is harmless).
    """
    X = np.asarray(X, dtype=float)
    n, F = X.shape
    if n == 0:
        raise ValueError("cannot grow a tree on zero rows")
    newton = y is None
    if newton:
        g_all = np.asarray(grad, dtype=float)
        h_all = np.asarray(hess, dtype=float)
    else:
        y_all = np.asarray(y, dtype=float)
    k_feat = F if max_features is None else max(1, min(F, int(max_features)))
    if k_feat < F and rng is None:
        raise ValueError("feature subsampling needs an rng")
    values, codes = bin_features(X) if binned is None else binned
    sizes = [len(v) for v in values]

    feature, threshold, left, right, value, count, gain = [], [], [], [], [], [], []

    def new_node(idx) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        count.append(len(idx))
        gain.append(0.0)
        if newton:
            value.append(-float(g_all[idx].sum()) / (float(h_all[idx].sum()) + lam))
        else:
            value.append(float(y_all[idx].mean()))
        return len(feature) - 1

    root_idx = np.arange(n)
    root = new_node(root_idx)
    stack = [(root, root_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        m = len(idx)
        if depth >= max_depth or m < 2 * min_samples_leaf:
            continue
        if newton:
            g_node, h_node = g_all[idx], h_all[idx]
            G, H = float(g_node.sum()), float(h_node.sum())
            parent = G * G / (H + lam)
        else:
            y_node = y_all[idx]
            pos = float(y_node.sum())
            if pos == 0.0 or pos == m:
                continue
            parent = 2.0 * pos * (m - pos) / m
        feats = range(F) if k_feat == F else np.sort(rng.choice(F, size=k_feat, replace=False))
        best_f, best_s, best_bins, best_i = -1, None, None, -1
        for f in feats:
            c = codes[idx, f]
            cnt = np.bincount(c, minlength=sizes[f])
            present = np.flatnonzero(cnt)
            if len(present) < 2:
                continue
            if newton:
                gs = np.bincount(c, weights=g_node, minlength=sizes[f])[present]
                hs = np.bincount(c, weights=h_node, minlength=sizes[f])[present]
                s, i = _newton_split(cnt[present], gs, hs, min_samples_leaf, lam, min_child_weight)
                better = i >= 0 and (best_s is None or s > best_s)
            else:
                ps = np.bincount(c, weights=y_node, minlength=sizes[f])[present]
                s, i = _gini_split(cnt[present], ps, min_samples_leaf)
                better = i >= 0 and (best_s is None or s < best_s)
            if better:
                best_f, best_s, best_bins, best_i = int(f), s, present, i
        if best_f < 0:
            continue
        improvement = best_s if newton else parent - best_s
        if improvement <= 1e-12 * max(1.0, abs(parent)):
            continue
        lo_bin, hi_bin = best_bins[best_i], best_bins[best_i + 1]
        thr = _midpoint(float(values[best_f][lo_bin]), float(values[best_f][hi_bin]))
        go = codes[idx, best_f] <= lo_bin
        feature[node] = best_f
        threshold[node] = thr
        gain[node] = improvement
        l_idx, r_idx = idx[go], idx[~go]
        l = new_node(l_idx)
        r = new_node(r_idx)
        left[node], right[node] = l, r
        stack.append((r, r_idx, depth + 1))
        stack.append((l, l_idx, depth + 1))

    return Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=float),
        np.asarray(count, dtype=np.int64),
        np.asarray(gain, dtype=float),
    )
