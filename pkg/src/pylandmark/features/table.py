import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pylandmark.common import DataError, DimensionError
from pylandmark.corpus.phones import Voicing
from pylandmark.features.variants import FeatureVariant

_HEADER = re.compile(r"^#\s*dim=(\d+)\s+variant=(\S+)\s+corpus=(\S+)\s*$")


@dataclass
class FeatureRow:
    utterance_id: str
    landmark_time: float
    landmark_type: str
    label: Voicing
    values: np.ndarray


@dataclass
class FeatureTable:
    """Feature rows of one (corpus, variant) pair"""

    variant: FeatureVariant
    corpus_id: str
    dim: int
    rows: list[FeatureRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def add(self, row: FeatureRow) -> None:
        if len(row.values) != self.dim:
            raise DimensionError(f"row {row.utterance_id}@{row.landmark_time:.4f} has {len(row.values)} values, table dim is {self.dim}")
        self.rows.append(row)

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim))
        return np.vstack([r.values for r in self.rows])

    def labels(self) -> np.ndarray:
        """1 = voiced, 0 = unvoiced"""
        return np.array([r.label.as_int for r in self.rows], dtype=np.int64)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(f"# dim={self.dim} variant={self.variant.value} corpus={self.corpus_id}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["utterance_id", "landmark_time", "landmark_type", "label"] + [f"f_{i}" for i in range(self.dim)])
            for r in self.rows:
                writer.writerow([r.utterance_id, f"{r.landmark_time:.6f}", r.landmark_type, r.label.value] + [repr(float(v)) for v in r.values])

    @classmethod
    def read_csv(cls, path: str | Path) -> "FeatureTable":
        with open(path, newline="", encoding="utf-8") as f:
            match = _HEADER.match(f.readline().strip())
            if match is None:
                raise DataError(f"{path}: missing '# dim=<d> variant=<v> corpus=<id>' header")
            dim = int(match.group(1))
            try:
                variant = FeatureVariant.from_name(match.group(2))
            except ValueError as e:
                raise DataError(f"{path}: {e}") from e
            table = cls(variant, match.group(3), dim)
            reader = csv.reader(f)
            columns = next(reader, None)
            if columns is None or len(columns) != dim + 4:
                raise DimensionError(f"{path}: column header does not match dim={dim}")
            for line_number, record in enumerate(reader, start=3):
                if len(record) != dim + 4:
                    raise DimensionError(f"{path} line {line_number}: expected {dim + 4} fields, got {len(record)}")
                try:
                    values = np.array([float(v) for v in record[4:]], dtype=np.float64)
                    row = FeatureRow(record[0], float(record[1]), record[2], Voicing(record[3]), values)
                except ValueError as e:
                    raise DataError(f"{path} line {line_number}: {e}") from e
                table.add(row)
        return table
