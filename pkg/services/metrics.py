import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata
from tqdm import tqdm

from dataset.loader import normalize, normalize_columns
from dataset.models import Dataset, ScatterplotSpec
from services.geometry import TriMesh, build_mesh, longest_kept_edge

logger = logging.getLogger("scatterpick.metrics")

# Denominators at or below this are treated as zero.
ZERO_TOL = 1e-12

METRIC_NAMES = ("s1", "s2", "s3", "s4")


@dataclass(frozen=True)
class ScoreVector:
    """Correlation, thinness, clumpy and separateness scores of one scatterplot."""

    s1: float
    s2: float
    s3: float
    s4: float
    clamped: int = 0

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.s1, self.s2, self.s3, self.s4)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_tuple()))

    @property
    def max_component(self) -> float:
        return max(self.as_tuple())

    def __repr__(self):
        return f"<ScoreVector({self.s1:.3f}, {self.s2:.3f}, {self.s3:.3f}, {self.s4:.3f})>"


@dataclass(frozen=True)
class EntropyGrid:
    g: int
    counts: np.ndarray
    weighted_entropy: np.ndarray

    @property
    def cells(self) -> int:
        return self.g * self.g

    @property
    def total(self) -> float:
        return float(self.weighted_entropy.sum())


def clamp_score(value: float) -> Tuple[float, bool]:
    """Clamps to [0, 1]; non-finite values become 0. Reports whether it changed anything."""
    if not math.isfinite(value):
        return 0.0, True
    if value < 0.0:
        return 0.0, True
    if value > 1.0:
        return 1.0, True
    return float(value), False


def _plot_points(spec: ScatterplotSpec, d: Dataset) -> np.ndarray:
    columns = d.values[:, [spec.x_dim, spec.y_dim]]
    if not d.normalized:
        columns = normalize_columns(columns)
    return columns


# --- s1: correlation ---

def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average ranks; 0 when either column is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    # a single observation is a constant column
    if x.size < 2:
        return 0.0

    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx <= ZERO_TOL or syy <= ZERO_TOL:
        return 0.0
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, rho))


def score_correlation(spec: ScatterplotSpec, d: Dataset) -> float:
    rho = spearman(d.column(spec.x_dim), d.column(spec.y_dim))
    return rho * rho


# --- s2 / s3: mesh based ---

def thinness_from_mesh(mesh: TriMesh) -> float:
    """1 - sqrt(4 pi A) / P over the pruned mesh; 0 for an empty mesh."""
    if mesh.total_perimeter <= ZERO_TOL:
        return 0.0
    return 1.0 - math.sqrt(4.0 * math.pi * mesh.total_area) / mesh.total_perimeter


def clumpy_from_mesh(mesh: TriMesh) -> float:
    """1 - longest kept edge / omega; 0 for an empty mesh or omega = 0."""
    if mesh.is_empty or mesh.prune_threshold <= ZERO_TOL:
        return 0.0
    return 1.0 - longest_kept_edge(mesh) / mesh.prune_threshold


def plot_mesh(spec: ScatterplotSpec, d: Dataset, omega: Optional[float] = None) -> TriMesh:
    return build_mesh(_plot_points(spec, d), omega=omega)


def score_thinness(spec: ScatterplotSpec, d: Dataset, omega: Optional[float] = None) -> float:
    return clamp_score(thinness_from_mesh(plot_mesh(spec, d, omega)))[0]


def score_clumpy(spec: ScatterplotSpec, d: Dataset, omega: Optional[float] = None) -> float:
    return clamp_score(clumpy_from_mesh(plot_mesh(spec, d, omega)))[0]


# --- s4: separateness ---

def grid_cells(points: np.ndarray, g: int) -> np.ndarray:
    """Row-major cell index of each normalized point; coordinate 1 falls in the last cell."""
    bins = np.minimum(np.floor(points * g).astype(np.int64), g - 1)
    bins = np.maximum(bins, 0)
    return bins[:, 1] * g + bins[:, 0]


def entropy_grid(spec: ScatterplotSpec, d: Dataset, g: int = 5) -> EntropyGrid:
    if g < 1:
        raise ValueError(f"grid must be >= 1, got {g}")
    cells = grid_cells(_plot_points(spec, d), g)
    counts = np.zeros((g * g, d.n_classes), dtype=np.int64)
    np.add.at(counts, (cells, d.labels), 1)

    totals = counts.sum(axis=1)
    occupied = totals > 0
    p = np.zeros(counts.shape)
    p[occupied] = counts[occupied] / totals[occupied, None]
    plogp = np.zeros(counts.shape)
    positive = p > 0
    plogp[positive] = p[positive] * np.log2(p[positive])
    # + 0.0 turns the -0.0 of pure cells into 0.0
    cell_entropy = -plogp.sum(axis=1) + 0.0
    weighted = (totals / d.n) * cell_entropy
    return EntropyGrid(g=g, counts=counts, weighted_entropy=weighted)


def score_separateness(sums: Sequence[float], k: int) -> float:
    """(H_max - sum_k) / H_max where H_max is the largest sum in the run."""
    h_max = max(sums)
    if h_max <= ZERO_TOL:
        return 0.0
    return (h_max - sums[k]) / h_max


# --- Whole-run scoring ---

@dataclass(frozen=True)
class _FirstPass:
    s1: float
    s2: float
    s3: float
    entropy: float


def _first_pass(raw: Dataset, d: Dataset, spec: ScatterplotSpec, g: int, omega: Optional[float]) -> _FirstPass:
    mesh = plot_mesh(spec, d, omega)
    return _FirstPass(
        s1=score_correlation(spec, raw),
        s2=thinness_from_mesh(mesh),
        s3=clumpy_from_mesh(mesh),
        entropy=entropy_grid(spec, d, g).total,
    )


def _iterate(items: Iterable, total: int, progress: bool):
    return tqdm(items, total=total, desc="Scoring scatterplots", unit="plot", disable=not progress)


def score_all(
    d: Dataset,
    specs: List[ScatterplotSpec],
    g: int = 5,
    omega: Optional[float] = None,
    workers: int = 1,
    progress: bool = False,
) -> List[ScoreVector]:
    """
    Scores every scatterplot. Pass one computes s1..s3 and the summed grid
    entropy per plot (optionally in a thread pool); pass two derives s4 once
    every entropy sum is known.
    """
    if not specs:
        return []
    raw, d = d, normalize(d)
    logger.info(f"--- 🧠 Scoring {len(specs)} scatterplots (grid={g}, workers={workers}) ---")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mapped = pool.map(lambda spec: _first_pass(raw, d, spec, g, omega), specs)
            first = list(_iterate(mapped, len(specs), progress))
    else:
        first = [_first_pass(raw, d, spec, g, omega) for spec in _iterate(specs, len(specs), progress)]

    sums = [row.entropy for row in first]
    scores: List[ScoreVector] = []
    clamp_events = 0
    for k, row in enumerate(first):
        raw = (row.s1, row.s2, row.s3, score_separateness(sums, k))
        clamped = [clamp_score(value) for value in raw]
        events = sum(1 for _, changed in clamped if changed)
        if events:
            logger.debug(f"Scatterplot {specs[k].id}: clamped {events} component(s) from {raw}")
        clamp_events += events
        scores.append(ScoreVector(*(value for value, _ in clamped), clamped=events))

    if clamp_events:
        logger.warning(f"⚠️ Clamped {clamp_events} score component(s) into [0, 1]")
    logger.info(f"✅ Scored {len(scores)} scatterplots")
    return scores


def count_clamped(scores: Iterable[ScoreVector]) -> int:
    return sum(score.clamped for score in scores)
