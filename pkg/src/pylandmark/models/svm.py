"""RBF-kernel SVM trained by SMO

The dual is solved with maximal-violating-pair working-set selection: each
step moves the pair (i, j) that most violates the KKT conditions, and the
solver stops once the violation gap m - M drops below tol. Per-class box
constraints C * w_y implement class weighting.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from pylandmark.common import DataError, DimensionError, NumericError
from pylandmark.evaluation import confusion, f1_voiced

# Use package-level logger
logger = logging.getLogger("pylandmark")

_TAU = 1e-12


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(a, b, "sqeuclidean"))


def default_gamma(x: np.ndarray) -> float:
    """1 / (d * var(X)), falling back to 1 / d for constant input"""
    variance = float(np.var(x))
    return 1.0 / (x.shape[1] * variance) if variance > 0 else 1.0 / x.shape[1]


def to_signed(labels: np.ndarray) -> np.ndarray:
    """{0, 1} or {-1, +1} labels -> {-1, +1}"""
    labels = np.asarray(labels)
    values = set(np.unique(labels).tolist())
    if values <= {-1, 1}:
        return labels.astype(np.float64)
    if values <= {0, 1}:
        return np.where(labels == 1, 1.0, -1.0)
    raise DataError(f"SVM labels must be +1/-1 or 1/0, got {sorted(values)}")


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray  # +1 / -1
    bias: float
    gamma: float
    c: float
    iterations: int = 0

    @property
    def dim(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.dim:
            raise DimensionError(f"SVM trained on {self.dim} dims, got {x.shape[1]}")
        if not np.all(np.isfinite(x)):
            raise NumericError("non-finite SVM input")
        return rbf_kernel(x, self.support_vectors, self.gamma) @ (self.alphas * self.labels) + self.bias


def svm_train(
    x: np.ndarray,
    y: np.ndarray,
    c: float = 1.0,
    gamma: float | None = None,
    class_weights: dict[int, float] | None = None,
    tol: float = 1e-3,
    max_iter: int = 1_000_000,
) -> SvmModel:
    """Fit on standardized rows x; class_weights maps 1 (voiced, +1) / 0 (unvoiced, -1) to box scale"""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite SVM training features")
    y = to_signed(y)
    if len(np.unique(y)) < 2:
        raise DataError("SVM training needs both classes")
    if gamma is None:
        gamma = default_gamma(x)
    weights = class_weights or {1: 1.0, 0: 1.0}
    upper = np.where(y > 0, c * weights[1], c * weights[0])

    k = rbf_kernel(x, x, gamma)
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - e'a
    diag = np.diag(k)

    iteration = 0
    while iteration < max_iter:
        violation = -y * grad
        in_up = ((y > 0) & (alpha < upper)) | ((y < 0) & (alpha > 0))
        in_low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < upper))
        if not in_up.any() or not in_low.any():
            break
        i = int(np.argmax(np.where(in_up, violation, -np.inf)))
        j = int(np.argmin(np.where(in_low, violation, np.inf)))
        gap = violation[i] - violation[j]
        if gap < tol:
            break

        curvature = max(diag[i] + diag[j] - 2.0 * k[i, j], _TAU)
        step = gap / curvature
        step = min(step, upper[i] - alpha[i] if y[i] > 0 else alpha[i])
        step = min(step, alpha[j] if y[j] > 0 else upper[j] - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += step * y * (k[:, i] - k[:, j])
        iteration += 1
    else:
        logger.warning(f"SMO stopped at max_iter={max_iter} before reaching tol={tol}")

    violation = -y * grad
    free = (alpha > 0) & (alpha < upper)
    if free.any():
        rho = float(np.mean(y[free] * grad[free]))
    else:
        in_up = ((y > 0) & (alpha < upper)) | ((y < 0) & (alpha > 0))
        in_low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < upper))
        m = violation[in_up].max() if in_up.any() else 0.0
        big_m = violation[in_low].min() if in_low.any() else 0.0
        rho = -0.5 * float(m + big_m)

    support = alpha > 0
    logger.debug(f"SMO: {iteration} iterations, {int(support.sum())}/{n} support vectors, gamma={gamma:.4g}, C={c}")
    return SvmModel(x[support].copy(), alpha[support].copy(), y[support].copy(), -rho, float(gamma), float(c), iteration)


def svm_predict(model: SvmModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels 1 = voiced / 0 = unvoiced, decision values)"""
    margins = model.decision_function(x)
    return (margins > 0).astype(np.int64), margins


SVM_C_GRID = (0.1, 1.0, 10.0, 100.0)
SVM_GAMMA_GRID = (0.001, 0.01, 0.1, 1.0)


def svm_grid_search(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_dev: np.ndarray,
    y_dev: np.ndarray,
    class_weights: dict[int, float] | None = None,
    c_grid=SVM_C_GRID,
    gamma_grid=SVM_GAMMA_GRID,
) -> tuple[float, float, float]:
    """Best (C, gamma, dev F1); ties keep the first grid point"""
    best = (c_grid[0], gamma_grid[0], -1.0)
    for c in c_grid:
        for gamma in gamma_grid:
            model = svm_train(x_train, y_train, c, gamma, class_weights)
            predictions, _ = svm_predict(model, x_dev)
            f1 = f1_voiced(confusion(predictions, y_dev))
            logger.debug(f"SVM grid C={c} gamma={gamma}: dev F1 {f1:.4f}")
            if f1 > best[2]:
                best = (c, gamma, f1)
    logger.info(f"SVM grid search picked C={best[0]} gamma={best[1]} (dev F1 {best[2]:.4f})")
    return best
