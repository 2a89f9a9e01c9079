"""Linear discriminant analysis with a ridge-stabilized pooled covariance."""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateDataError

# ridge added to the pooled covariance diagonal: RIDGE_SCALE * trace / n_features
RIDGE_SCALE = 1e-6


@dataclass
class LdaModel:
    weights: np.ndarray  # (n_features,)
    bias: float

    @classmethod
    def fit(cls, X, y) -> "LdaModel":
        n, d = X.shape
        classes = np.unique(y)
        if classes.size != 2:
            raise DegenerateDataError("LDA needs exactly two classes present")
        if n < 3:
            raise DegenerateDataError("LDA needs at least 3 rows to pool covariance")
        x0, x1 = X[y == 0], X[y == 1]
        mu0, mu1 = x0.mean(axis=0), x1.mean(axis=0)
        scatter = (x0 - mu0).T @ (x0 - mu0) + (x1 - mu1).T @ (x1 - mu1)
        cov = scatter / (n - 2)
        ridge = max(RIDGE_SCALE * np.trace(cov) / d, 1e-12)
        cov = cov + ridge * np.eye(d)
        w = np.linalg.solve(cov, mu1 - mu0)
        prior0, prior1 = x0.shape[0] / n, x1.shape[0] / n
        bias = -0.5 * float((mu1 + mu0) @ w) + float(np.log(prior1 / prior0))
        return cls(weights=w, bias=bias)

    def decision(self, Q: np.ndarray) -> np.ndarray:
        return Q @ self.weights + self.bias

    def predict_index(self, Q: np.ndarray) -> np.ndarray:
        return (self.decision(Q) >= 0.0).astype(np.int64)

    def to_params(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": float(self.bias)}

    @classmethod
    def from_params(cls, p: dict) -> "LdaModel":
        return cls(weights=np.asarray(p["weights"], dtype=np.float64), bias=float(p["bias"]))
