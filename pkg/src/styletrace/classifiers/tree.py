"""CART trees: Gini classification (grown to purity) and MSE regression.

Split predicate is `x[feature] <= threshold` with the threshold taken from
the observed values (the left group's maximum), so fitted trees commute
with any strictly increasing per-feature transform applied to both train
and test data. Split-gain ties break toward the lowest feature index,
then the lowest threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataValidationError

_MIN_SAMPLES_SPLIT = 2


@dataclass
class FlatTree:
    """Array-of-nodes tree; feature == -1 marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf values for each row of X (level-synchronous descent)."""
        feat = np.asarray(self.feature)
        thr = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        val = np.asarray(self.value)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = feat[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            cur = node[idx]
            go_left = X[idx, feat[cur]] <= thr[cur]
            node[idx] = np.where(go_left, left[cur], right[cur])
            active = feat[node] >= 0
        return val[node]

    def to_params(self) -> dict:
        return {
            "feature": list(map(int, self.feature)),
            "threshold": list(map(float, self.threshold)),
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "value": list(map(float, self.value)),
        }

    @classmethod
    def from_params(cls, params: dict) -> "FlatTree":
        return cls(
            feature=list(params["feature"]),
            threshold=list(params["threshold"]),
            left=list(params["left"]),
            right=list(params["right"]),
            value=list(params["value"]),
        )


def _gini_best_split(Xn, yn, features):
    """Best (gain, feature, threshold, left_mask) under Gini; None if unsplittable."""
    n = yn.size
    p1 = np.count_nonzero(yn) / n
    parent = 1.0 - (p1 * p1 + (1.0 - p1) * (1.0 - p1))
    best = None
    for f in features:
        v = Xn[:, f]
        order = np.argsort(v, kind="stable")
        vs, ys = v[order], yn[order]
        cut = np.nonzero(vs[:-1] < vs[1:])[0]
        if cut.size == 0:
            continue
        ones = np.cumsum(ys == 1)
        ln = (cut + 1).astype(np.float64)
        lo = ones[cut].astype(np.float64)
        rn = n - ln
        ro = ones[-1] - lo
        gl = 1.0 - ((lo / ln) ** 2 + ((ln - lo) / ln) ** 2)
        gr = 1.0 - ((ro / rn) ** 2 + ((rn - ro) / rn) ** 2)
        gain = parent - (ln * gl + rn * gr) / n
        j = int(np.argmax(gain))  # first max == lowest threshold
        if best is None or gain[j] > best[0]:
            best = (float(gain[j]), int(f), float(vs[cut[j]]))
    if best is None:
        return None
    mask = Xn[:, best[1]] <= best[2]
    return best[0], best[1], best[2], mask


def _mse_best_split(Xn, rn, features):
    """Best split by squared-error reduction on the targets rn."""
    n = rn.size
    total = rn.sum()
    best = None
    for f in features:
        v = Xn[:, f]
        order = np.argsort(v, kind="stable")
        vs, rs = v[order], rn[order]
        cut = np.nonzero(vs[:-1] < vs[1:])[0]
        if cut.size == 0:
            continue
        csum = np.cumsum(rs)
        ln = (cut + 1).astype(np.float64)
        ls = csum[cut]
        rn_ = n - ln
        rsum = total - ls
        # maximizing sum of per-side (sum^2 / n) minimizes total SSE
        score = ls * ls / ln + rsum * rsum / rn_
        j = int(np.argmax(score))
        gain = float(score[j]) - total * total / n
        if best is None or gain > best[0]:
            best = (gain, int(f), float(vs[cut[j]]))
    if best is None:
        return None
    mask = Xn[:, best[1]] <= best[2]
    return best[0], best[1], best[2], mask


def fit_classification_tree(X, y, feature_chooser=None) -> FlatTree:
    """Gini CART grown to purity (min 2 samples to split).

    feature_chooser(n_features) -> ascending candidate feature indices;
    defaults to all features. Used by the forest for per-split sampling.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.size or X.shape[0] == 0:
        raise DataValidationError("bad training matrix for tree fit")
    nf = X.shape[1]
    if feature_chooser is None:
        all_feats = np.arange(nf)
        feature_chooser = lambda _: all_feats
    tree = FlatTree()

    def majority(labels) -> float:
        return float(np.argmax(np.bincount(labels, minlength=2)))

    stack = [(tree._new_node(), np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        yn = y[idx]
        if idx.size < _MIN_SAMPLES_SPLIT or np.all(yn == yn[0]):
            tree.value[node] = majority(yn)
            continue
        split = _gini_best_split(X[idx], yn, np.sort(feature_chooser(nf)))
        if split is None or split[0] <= 0.0:
            tree.value[node] = majority(yn)
            continue
        _, f, t, mask = split
        tree.feature[node] = f
        tree.threshold[node] = t
        l_node, r_node = tree._new_node(), tree._new_node()
        tree.left[node], tree.right[node] = l_node, r_node
        # push right first so the left child is materialized (and numbered) first
        stack.append((r_node, idx[~mask]))
        stack.append((l_node, idx[mask]))
    return tree


def fit_regression_tree(X, residual, hessian, max_depth: int) -> FlatTree:
    """Depth-limited MSE tree on residuals; leaves carry Newton steps.

    Leaf value = sum(residual) / sum(hessian) over the leaf's rows, the
    standard second-order step for logistic boosting.
    """
    X = np.asarray(X, dtype=np.float64)
    residual = np.asarray(residual, dtype=np.float64)
    hessian = np.asarray(hessian, dtype=np.float64)
    nf = X.shape[1]
    all_feats = np.arange(nf)
    tree = FlatTree()

    def leaf_value(idx) -> float:
        h = hessian[idx].sum()
        return float(residual[idx].sum() / h) if h > 1e-12 else 0.0

    stack = [(tree._new_node(), np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if depth >= max_depth or idx.size < _MIN_SAMPLES_SPLIT:
            tree.value[node] = leaf_value(idx)
            continue
        split = _mse_best_split(X[idx], residual[idx], all_feats)
        if split is None or split[0] <= 0.0:
            tree.value[node] = leaf_value(idx)
            continue
        _, f, t, mask = split
        tree.feature[node] = f
        tree.threshold[node] = t
        l_node, r_node = tree._new_node(), tree._new_node()
        tree.left[node], tree.right[node] = l_node, r_node
        stack.append((r_node, idx[~mask], depth + 1))
        stack.append((l_node, idx[mask], depth + 1))
    return tree
