"""Random forest: bagged Gini CART trees with per-split feature sampling.

Randomness scheme: the forest seed feeds a numpy SeedSequence; child
substream t drives tree t's bootstrap draw and its per-split feature
subsets (consumed in depth-first build order). Same seed + data means a
bit-identical forest.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DataValidationError
from .tree import FlatTree, fit_classification_tree


@dataclass
class ForestModel:
    trees: list[FlatTree]
    n_trees: int
    max_features: int
    seed: int

    @classmethod
    def fit(cls, X, y, n_trees: int = 100, max_features: int = 8,
            seed: int = 0) -> "ForestModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n, nf = X.shape
        if max_features < 1 or max_features > nf:
            raise DataValidationError(f"max_features must be in 1..{nf}")
        streams = np.random.SeedSequence(seed).spawn(n_trees)
        trees = []
        for t in range(n_trees):
            rng = np.random.default_rng(streams[t])
            boot = rng.integers(0, n, size=n)
            chooser = lambda _nf: rng.choice(_nf, size=max_features, replace=False)
            trees.append(fit_classification_tree(X[boot], y[boot], chooser))
        return cls(trees=trees, n_trees=n_trees, max_features=max_features, seed=seed)

    def predict_index(self, Q: np.ndarray) -> np.ndarray:
        votes = np.zeros(Q.shape[0])
        for tree in self.trees:
            votes += tree.predict(Q)
        # strict majority for class 1; exact ties resolve to class 0
        return (votes > self.n_trees / 2.0).astype(np.int64)

    def to_params(self) -> dict:
        return {
            "n_trees": self.n_trees, "max_features": self.max_features,
            "seed": self.seed, "trees": [t.to_params() for t in self.trees],
        }

    @classmethod
    def from_params(cls, p: dict) -> "ForestModel":
        return cls(trees=[FlatTree.from_params(t) for t in p["trees"]],
                   n_trees=int(p["n_trees"]), max_features=int(p["max_features"]),
                   seed=int(p["seed"]))
