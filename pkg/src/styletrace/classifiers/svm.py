"""Soft-margin SVM trained by sequential minimal optimization.

Dual problem (libsvm form): minimize 1/2 a'Qa - e'a subject to
0 <= a_i <= C and y'a = 0, with Q_ij = y_i y_j K(x_i, x_j). Each step
optimizes one violating pair chosen by second-order working-set
selection; the loop stops when the KKT duality gap m(a) - M(a) drops to
the tolerance. Selection ties resolve to the lowest index, so training
is deterministic for fixed data.

Kernels: linear, poly (degree 3), rbf, sigmoid. gamma defaults to
1 / (n_features * Var(X)) over the whole training matrix, the common
"scale" convention.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DataValidationError, DegenerateDataError

KERNELS = ("linear", "poly", "rbf", "sigmoid")
_TAU = 1e-12  # curvature floor for indefinite kernels


def kernel_matrix(kind: str, A: np.ndarray, B: np.ndarray, gamma: float,
                  coef0: float, degree: int) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    if kind == "rbf":
        a2 = (A * A).sum(axis=1)[:, None]
        b2 = (B * B).sum(axis=1)[None, :]
        d2 = np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)
        return np.exp(-gamma * d2)
    if kind == "sigmoid":
        return np.tanh(gamma * (A @ B.T) + coef0)
    raise DataValidationError(f"unknown kernel {kind!r}, pick from {KERNELS}")


@dataclass
class SvmModel:
    kernel: str
    gamma: float
    coef0: float
    degree: int
    c: float
    bias: float
    sv_X: np.ndarray        # (m, n_features)
    sv_alpha_y: np.ndarray  # (m,) alpha_i * y_i, y in {-1, +1}

    @classmethod
    def fit(cls, X, y, kernel: str = "rbf", c: float = 1.0, tol: float = 1e-3,
            max_passes: int = 10_000, degree: int = 3, coef0: float = 0.0) -> "SvmModel":
        X = np.asarray(X, dtype=np.float64)
        y01 = np.asarray(y, dtype=np.int64)
        if np.unique(y01).size != 2:
            raise DegenerateDataError("SVM needs exactly two classes present")
        ysign = np.where(y01 == 1, 1.0, -1.0)
        n = X.shape[0]
        var = float(X.var())
        gamma = 1.0 / (X.shape[1] * var) if var > 0.0 else 1.0

        K = kernel_matrix(kernel, X, X, gamma, coef0, degree)
        Kdiag = np.diag(K).copy()
        alpha = np.zeros(n)
        grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
        yg = ysign * grad   # y_i * g_i, kept in sync with grad

        pos = ysign > 0
        # a "pass" is n pair steps; max_passes bounds total effort, the
        # tolerance on the KKT gap is the working stopping criterion
        max_steps = max_passes * n
        steps = 0
        while steps < max_steps:
            steps += 1
            up = np.where(pos, alpha < c, alpha > 0.0)
            low = np.where(pos, alpha > 0.0, alpha < c)
            if not up.any() or not low.any():
                break
            minus_yg = -yg
            i = int(np.where(up, minus_yg, -np.inf).argmax())
            m_up = minus_yg[i]
            m_low = np.where(low, minus_yg, np.inf).min()
            if m_up - m_low <= tol:
                break
            # second-order choice of j among sufficiently violating lows;
            # pair curvature along the feasible direction is
            # K_ii + K_jj - 2 K_ij regardless of the label combination
            b_j = m_up - minus_yg
            quad = np.maximum(Kdiag[i] + Kdiag - 2.0 * K[i], _TAU)
            gain = np.where(low & (b_j > 0.0), (b_j * b_j) / quad, -np.inf)
            j = int(gain.argmax())

            yi, yj = ysign[i], ysign[j]
            ai_old, aj_old = alpha[i], alpha[j]
            quad_ij = max(Kdiag[i] + Kdiag[j] - 2.0 * K[i, j], _TAU)
            # analytic pair step, clipped to the feasible segment so the
            # equality constraint y'a = 0 is preserved exactly
            if yi != yj:
                delta = (-grad[i] - grad[j]) / quad_ij
                diff = ai_old - aj_old
                ai, aj = ai_old + delta, aj_old + delta
                if diff > 0.0:
                    if aj < 0.0:
                        ai, aj = diff, 0.0
                    if ai > c:
                        ai, aj = c, c - diff
                else:
                    if ai < 0.0:
                        ai, aj = 0.0, -diff
                    if aj > c:
                        ai, aj = c + diff, c
            else:
                delta = (grad[i] - grad[j]) / quad_ij
                total = ai_old + aj_old
                ai, aj = ai_old - delta, aj_old + delta
                if total > c:
                    if ai > c:
                        ai, aj = c, total - c
                    elif aj > c:
                        ai, aj = total - c, c
                else:
                    if aj < 0.0:
                        ai, aj = total, 0.0
                    elif ai < 0.0:
                        ai, aj = 0.0, total
            d_ai, d_aj = ai - ai_old, aj - aj_old
            if d_ai == 0.0 and d_aj == 0.0:
                break
            alpha[i], alpha[j] = ai, aj
            grad += (ysign * yi * K[i]) * d_ai + (ysign * yj * K[j]) * d_aj
            yg = ysign * grad

        bias = cls._bias_from_kkt(alpha, ysign, yg, c)
        keep = alpha > 0.0
        return cls(kernel=kernel, gamma=gamma, coef0=coef0, degree=degree, c=c,
                   bias=bias, sv_X=X[keep].copy(),
                   sv_alpha_y=(alpha[keep] * ysign[keep]))

    @staticmethod
    def _bias_from_kkt(alpha, ysign, yg, c) -> float:
        """Average -y_i g_i over free vectors, else midpoint of the bounds."""
        minus_yg = -yg
        free = (alpha > 0.0) & (alpha < c)
        if free.any():
            return float(minus_yg[free].mean())
        pos = ysign > 0
        up = np.where(pos, alpha < c, alpha > 0.0)
        low = np.where(pos, alpha > 0.0, alpha < c)
        hi = minus_yg[up].max() if up.any() else 0.0
        lo = minus_yg[low].min() if low.any() else 0.0
        return float(0.5 * (hi + lo))

    def decision(self, Q: np.ndarray) -> np.ndarray:
        if self.sv_X.size == 0:
            return np.full(Q.shape[0], self.bias)
        Kq = kernel_matrix(self.kernel, Q, self.sv_X, self.gamma, self.coef0, self.degree)
        return Kq @ self.sv_alpha_y + self.bias

    def predict_index(self, Q: np.ndarray) -> np.ndarray:
        return (self.decision(Q) >= 0.0).astype(np.int64)

    def training_kkt_residual(self, X, y) -> float:
        """Max raw KKT violation over the given training rows.

        alpha < C wants margin >= 1, alpha > 0 wants margin <= 1; the
        returned max shortfall is bounded by the solver tolerance at
        convergence. Rows are matched to stored support vectors by
        content, so this is meant for distinct-row training sets.
        """
        X = np.asarray(X, dtype=np.float64)
        ysign = np.where(np.asarray(y) == 1, 1.0, -1.0)
        margins = ysign * self.decision(X)
        sv_lookup = {row.tobytes(): abs(a) for row, a in zip(self.sv_X, self.sv_alpha_y)}
        alpha = np.array([sv_lookup.get(row.tobytes(), 0.0) for row in X])
        below = np.where(alpha < self.c, np.maximum(0.0, 1.0 - margins), 0.0)
        above = np.where(alpha > 0.0, np.maximum(0.0, margins - 1.0), 0.0)
        return float(np.maximum(below, above).max())

    def to_params(self) -> dict:
        return {
            "kernel": self.kernel, "gamma": float(self.gamma),
            "coef0": float(self.coef0), "degree": int(self.degree),
            "c": float(self.c), "bias": float(self.bias),
            "sv_X": self.sv_X.tolist(), "sv_alpha_y": self.sv_alpha_y.tolist(),
        }

    @classmethod
    def from_params(cls, p: dict) -> "SvmModel":
        return cls(kernel=p["kernel"], gamma=float(p["gamma"]), coef0=float(p["coef0"]),
                   degree=int(p["degree"]), c=float(p["c"]), bias=float(p["bias"]),
                   sv_X=np.asarray(p["sv_X"], dtype=np.float64),
                   sv_alpha_y=np.asarray(p["sv_alpha_y"], dtype=np.float64))
