"""Binary logistic gradient boosting over depth-limited regression trees.

Initial score is the log-odds of the class-1 prior; each round fits an
MSE tree to the residuals y - p and takes Newton leaf steps scaled by the
learning rate.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateDataError
from .tree import FlatTree, fit_regression_tree


@dataclass
class GboostModel:
    trees: list[FlatTree]
    init_score: float
    learning_rate: float
    max_depth: int

    @classmethod
    def fit(cls, X, y, n_rounds: int = 100, max_depth: int = 3,
            learning_rate: float = 0.1) -> "GboostModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        pos = y.mean()
        if pos <= 0.0 or pos >= 1.0:
            raise DegenerateDataError("boosting needs both classes present")
        init = float(np.log(pos / (1.0 - pos)))
        score = np.full(X.shape[0], init)
        trees = []
        for _ in range(n_rounds):
            p = 1.0 / (1.0 + np.exp(-score))
            residual = y - p
            hessian = p * (1.0 - p)
            tree = fit_regression_tree(X, residual, hessian, max_depth)
            trees.append(tree)
            score = score + learning_rate * tree.predict(X)
        return cls(trees=trees, init_score=init, learning_rate=learning_rate,
                   max_depth=max_depth)

    def decision(self, Q: np.ndarray) -> np.ndarray:
        score = np.full(Q.shape[0], self.init_score)
        for tree in self.trees:
            score += self.learning_rate * tree.predict(Q)
        return score

    def predict_index(self, Q: np.ndarray) -> np.ndarray:
        return (self.decision(Q) >= 0.0).astype(np.int64)

    def to_params(self) -> dict:
        return {
            "init_score": float(self.init_score),
            "learning_rate": float(self.learning_rate),
            "max_depth": int(self.max_depth),
            "trees": [t.to_params() for t in self.trees],
        }

    @classmethod
    def from_params(cls, p: dict) -> "GboostModel":
        return cls(trees=[FlatTree.from_params(t) for t in p["trees"]],
                   init_score=float(p["init_score"]),
                   learning_rate=float(p["learning_rate"]),
                   max_depth=int(p["max_depth"]))
