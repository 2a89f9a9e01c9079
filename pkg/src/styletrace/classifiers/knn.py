"""k-nearest-neighbor classifier (Euclidean, unweighted majority vote)."""

from dataclasses import dataclass

import numpy as np

from ..errors import DataValidationError


@dataclass
class KnnModel:
    k: int
    X: np.ndarray
    y: np.ndarray

    @classmethod
    def fit(cls, X, y, k: int) -> "KnnModel":
        if k < 1:
            raise DataValidationError(f"k must be >= 1, got {k}")
        if X.shape[0] < k:
            raise DataValidationError(f"k={k} exceeds the {X.shape[0]} stored rows")
        return cls(k=int(k), X=np.array(X, dtype=np.float64), y=np.array(y, dtype=np.int64))

    def predict_index(self, Q: np.ndarray) -> np.ndarray:
        """Majority vote among the k nearest; vote ties fall back to the
        single nearest neighbor's class. Distance ties keep training order."""
        d2 = (
            (Q * Q).sum(axis=1)[:, None]
            + (self.X * self.X).sum(axis=1)[None, :]
            - 2.0 * (Q @ self.X.T)
        )
        order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        votes = self.y[order]
        ones = votes.sum(axis=1)
        zeros = self.k - ones
        out = np.where(ones > zeros, 1, 0)
        tie = ones == zeros
        out[tie] = votes[tie, 0]
        return out.astype(np.int64)

    def to_params(self) -> dict:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_params(cls, p: dict) -> "KnnModel":
        return cls(k=int(p["k"]), X=np.asarray(p["X"], dtype=np.float64),
                   y=np.asarray(p["y"], dtype=np.int64))
