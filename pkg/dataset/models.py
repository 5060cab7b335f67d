from dataclasses import dataclass, field
from typing import Tuple

import numpy as np


class DatasetError(ValueError):
    """Raised when input data cannot be turned into a valid Dataset."""


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


# This model holds the n x m numeric table plus one categorical label per row.
# Arrays are copied and made read-only.
@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    labels: np.ndarray
    dim_names: Tuple[str, ...]
    classes: Tuple[str, ...]
    label_name: str = "label"
    normalized: bool = False

    def __post_init__(self):
        values = _frozen_array(self.values, float)
        labels = _frozen_array(self.labels, np.int64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dim_names", tuple(str(name) for name in self.dim_names))
        object.__setattr__(self, "classes", tuple(str(name) for name in self.classes))

        if values.ndim != 2:
            raise DatasetError(f"values must be a 2D table, got shape {values.shape}")
        n, m = values.shape
        if n < 1:
            raise DatasetError("dataset needs at least 1 row")
        if m < 2:
            raise DatasetError(f"dataset needs at least 2 numeric dimensions, found {m}")
        if len(self.dim_names) != m:
            raise DatasetError(f"{len(self.dim_names)} dimension names for {m} columns")
        if len(set(self.dim_names)) != m:
            raise DatasetError(f"duplicate dimension names in {list(self.dim_names)}")
        if labels.shape != (n,):
            raise DatasetError(f"expected {n} labels, got {labels.shape[0] if labels.ndim else 0}")
        if len(self.classes) < 1:
            raise DatasetError("dataset needs at least 1 class")
        if labels.min() < 0 or labels.max() >= len(self.classes):
            raise DatasetError("label codes fall outside the class list")
        if not np.all(np.isfinite(values)):
            raise DatasetError("dataset contains non-finite values")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def column(self, index: int) -> np.ndarray:
        return self.values[:, index]

    def dim_index(self, name: str) -> int:
        """Returns the column index of a dimension name."""
        try:
            return self.dim_names.index(name)
        except ValueError:
            raise DatasetError(f"unknown dimension '{name}' (known: {', '.join(self.dim_names)})") from None

    def __repr__(self):
        return f"<Dataset(n={self.n}, m={self.m}, classes={self.n_classes}, normalized={self.normalized})>"


# One candidate scatterplot: a pair of dimension indices and its position in
# the enumeration order.
@dataclass(frozen=True, order=True)
class ScatterplotSpec:
    id: int
    x_dim: int
    y_dim: int
    x_name: str = field(default="", compare=False)
    y_name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.x_dim == self.y_dim:
            raise DatasetError(f"scatterplot {self.id} uses dimension {self.x_dim} on both axes")

    def __repr__(self):
        return f"<ScatterplotSpec(id={self.id}, x='{self.x_name or self.x_dim}', y='{self.y_name or self.y_dim}')>"
