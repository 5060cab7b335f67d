import io
import logging
import re
from dataclasses import replace
from pathlib import Path
from typing import Iterable, List, Optional, TextIO, Union

import numpy as np
import pandas as pd

from dataset.models import Dataset, DatasetError, ScatterplotSpec

logger = logging.getLogger("scatterpick.loader")

ALL_PAIRS = "all-pairs"
BIPARTITE = "bipartite"

Source = Union[str, Path, TextIO]


def _source_name(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return str(source)
    return getattr(source, "name", "<stream>")


FIELD_COUNT_ERROR = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


def _field_count_message(error: pd.errors.ParserError) -> str:
    match = FIELD_COUNT_ERROR.search(str(error))
    if not match:
        return f"malformed delimited text: {error}"
    expected, line, seen = (int(group) for group in match.groups())
    return f"row {line - 1} has {seen} fields, header has {expected}"


def _read_table(source: Source, delimiter: str) -> pd.DataFrame:
    """
    Reads the raw table as strings so every cell can be diagnosed by position.
    The header is parsed as an ordinary line: a data row with more fields
    than the header is an error, never an implicit index column.
    """
    try:
        raw = pd.read_csv(
            source,
            sep=delimiter,
            header=None,
            index_col=False,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except FileNotFoundError:
        raise DatasetError(f"input file not found: {source}") from None
    except pd.errors.EmptyDataError:
        raise DatasetError("empty file: no header row and no data") from None
    except pd.errors.ParserError as e:
        raise DatasetError(_field_count_message(e)) from None
    except UnicodeDecodeError as e:
        raise DatasetError(f"input is not valid UTF-8: {e}") from None

    header = [str(cell) for cell in raw.iloc[0]]
    duplicates = sorted({name for name in header if header.count(name) > 1})
    if duplicates:
        raise DatasetError(f"duplicate column names in header: {', '.join(duplicates)}")

    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = header
    # short rows come back padded with NaN
    short = frame.isna().any(axis=1).to_numpy()
    if short.any():
        index = int(np.flatnonzero(short)[0])
        seen = int(frame.iloc[index].notna().sum())
        raise DatasetError(f"row {index + 1} has {seen} fields, header has {len(header)}")
    return frame


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _parse_numeric_column(cells: pd.Series, column: str) -> np.ndarray:
    cells = cells.fillna("").str.strip()
    missing = cells == ""
    if missing.any():
        row = int(np.flatnonzero(missing.to_numpy())[0]) + 1
        raise DatasetError(f"missing value at row {row}, column {column}")

    parsed = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=float)
    bad = np.isnan(parsed)
    if bad.any():
        index = int(np.flatnonzero(bad)[0])
        raise DatasetError(f"non-numeric value {cells.iloc[index]!r} at row {index + 1}, column {column}")

    infinite = ~np.isfinite(parsed)
    if infinite.any():
        index = int(np.flatnonzero(infinite)[0])
        raise DatasetError(f"non-finite value {cells.iloc[index]!r} at row {index + 1}, column {column}")
    return parsed


def load_dataset(source: Source, label_column: str, delimiter: str = ",") -> Dataset:
    """
    Parses delimited text with a header row into a Dataset.
    Every column other than the label column must be numeric. Rows are
    numbered from 1, counting data rows only.
    """
    name = _source_name(source)
    frame = _read_table(source, delimiter)
    header = [str(column) for column in frame.columns]

    if header and all(_looks_numeric(column) for column in header):
        raise DatasetError(f"missing header row: first line of {name} looks like data ({', '.join(header)})")

    if label_column not in frame.columns:
        raise DatasetError(f"label column '{label_column}' not found in header (columns: {', '.join(header)})")

    if frame.empty:
        raise DatasetError(f"no data rows after the header in {name}")

    numeric_columns = [column for column in frame.columns if column != label_column]
    if len(numeric_columns) < 2:
        raise DatasetError(f"need at least 2 numeric columns besides '{label_column}', found {len(numeric_columns)}")

    values = np.column_stack([_parse_numeric_column(frame[column], column) for column in numeric_columns])

    label_cells = frame[label_column].fillna("").str.strip()
    empty_labels = (label_cells == "").to_numpy()
    if empty_labels.any():
        row = int(np.flatnonzero(empty_labels)[0]) + 1
        raise DatasetError(f"missing label at row {row}, column {label_column}")

    # classes are the distinct label values in file order
    classes = list(pd.unique(label_cells))
    codes = {label: code for code, label in enumerate(classes)}
    labels = label_cells.map(codes).to_numpy(dtype=np.int64)

    dataset = Dataset(
        values=values,
        labels=labels,
        dim_names=tuple(numeric_columns),
        classes=tuple(classes),
        label_name=label_column,
    )
    logger.info(f"📥 Loaded {dataset.n} rows x {dataset.m} dimensions, {dataset.n_classes} classes from {name}")
    return dataset


def load_dataset_text(text: str, label_column: str, delimiter: str = ",") -> Dataset:
    """Convenience wrapper for in-memory text."""
    return load_dataset(io.StringIO(text), label_column, delimiter=delimiter)


def normalize_columns(values: np.ndarray) -> np.ndarray:
    """Min-max maps every column to [0, 1]; constant columns become 0.5."""
    values = np.asarray(values, dtype=float)
    low = values.min(axis=0)
    span = values.max(axis=0) - low
    out = np.full(values.shape, 0.5)
    varying = span > 0
    out[:, varying] = (values[:, varying] - low[varying]) / span[varying]
    return out


def normalize(d: Dataset) -> Dataset:
    if d.normalized:
        return d
    return replace(d, values=normalize_columns(d.values), normalized=True)


def _resolve_dims(d: Dataset, names: Iterable[str]) -> List[int]:
    return sorted({d.dim_index(name) for name in names})


def enumerate_scatterplots(
    d: Dataset,
    mode: str = ALL_PAIRS,
    x_dims: Optional[Iterable[str]] = None,
    y_dims: Optional[Iterable[str]] = None,
) -> List[ScatterplotSpec]:
    """
    Lists the candidate scatterplots in lexicographic index order.
    all-pairs: every unordered pair once, x < y.
    bipartite: the product of the X and Y dimension sets.
    """
    if mode == ALL_PAIRS:
        pairs = [(i, j) for i in range(d.m) for j in range(i + 1, d.m)]
    elif mode == BIPARTITE:
        x_list = list(x_dims or [])
        y_list = list(y_dims or [])
        if not x_list or not y_list:
            raise DatasetError("bipartite mode needs non-empty x_dims and y_dims")
        xs = _resolve_dims(d, x_list)
        ys = _resolve_dims(d, y_list)
        overlap = sorted(set(xs) & set(ys))
        if overlap:
            names = ", ".join(d.dim_names[i] for i in overlap)
            raise DatasetError(f"x_dims and y_dims overlap: {names}")
        pairs = [(i, j) for i in xs for j in ys]
    else:
        raise DatasetError(f"unknown mode '{mode}' (expected '{ALL_PAIRS}' or '{BIPARTITE}')")

    specs = [
        ScatterplotSpec(id=k, x_dim=i, y_dim=j, x_name=d.dim_names[i], y_name=d.dim_names[j])
        for k, (i, j) in enumerate(pairs)
    ]
    logger.info(f"🔄 Enumerated {len(specs)} scatterplots in {mode} mode")
    return specs
