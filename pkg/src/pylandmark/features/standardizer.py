from dataclasses import dataclass

import numpy as np

from pylandmark.common import DataError, DimensionError

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension (x - mean) / std, fit once on training rows and reused for every test corpus"""

    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.mean)

    @classmethod
    def fit(cls, matrix: np.ndarray, floor: float = STD_FLOOR) -> "Standardizer":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or len(matrix) < 2:
            raise DataError(f"need at least 2 training rows to fit a standardizer, got shape {matrix.shape}")
        return cls(matrix.mean(axis=0), np.maximum(matrix.std(axis=0), floor))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"standardizer expects {self.dim} dims, got {x.shape[-1]}")
        return (x - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(np.asarray(data["mean"], dtype=np.float64), np.asarray(data["std"], dtype=np.float64))


def fit_standardizer(matrix: np.ndarray) -> Standardizer:
    return Standardizer.fit(matrix)
