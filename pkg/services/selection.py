import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.metrics import ScoreVector, ZERO_TOL

logger = logging.getLogger("scatterpick.selection")

HIGHEST_S4 = "highest-s4"
HIGHEST_NORM = "highest-norm"
START_RULES = (HIGHEST_S4, HIGHEST_NORM)

VECTOR_NORM = "vector-norm"
SCALAR_S4 = "scalar-s4"
COLOR_SUM_RULES = (VECTOR_NORM, SCALAR_S4)

Edge = Tuple[int, int]


class SelectionError(RuntimeError):
    """Raised when a coloring or selection breaks its own guarantees."""


@dataclass(frozen=True)
class SimilarityGraph:
    scores: Tuple[ScoreVector, ...]
    d_thres: float
    edges: Tuple[Edge, ...]
    similarities: Tuple[float, ...]
    colors: Optional[Tuple[int, ...]] = None
    visit_order: Tuple[int, ...] = ()
    start_rule: str = HIGHEST_S4

    @property
    def n_vertices(self) -> int:
        return len(self.scores)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_colors(self) -> int:
        return len(set(self.colors)) if self.colors else 0

    def adjacency(self) -> List[List[int]]:
        neighbors: List[List[int]] = [[] for _ in range(self.n_vertices)]
        for i, j in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        return [sorted(row) for row in neighbors]

    @property
    def max_degree(self) -> int:
        return max((len(row) for row in self.adjacency()), default=0)

    def __repr__(self):
        return f"<SimilarityGraph(N={self.n_vertices}, edges={self.n_edges}, colors={self.n_colors}, d_thres={self.d_thres})>"


@dataclass(frozen=True)
class SelectionResult:
    chosen_color: int
    members: Tuple[int, ...]
    ranking: Tuple[int, ...]
    selected: Tuple[int, ...]
    n_edges: int
    n_colors: int
    color_sums: Dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SweepRow:
    d_thres: float
    edges: int
    colors: int


# --- Similarity ---

def score_matrix(scores: Sequence[ScoreVector]) -> np.ndarray:
    """Stacks score vectors into an N x 4 array."""
    return np.array([score.as_tuple() for score in scores], dtype=float).reshape(-1, 4)


def _unit_rows(scores: Sequence[ScoreVector]) -> Tuple[np.ndarray, np.ndarray]:
    matrix = score_matrix(scores)
    norms = np.linalg.norm(matrix, axis=1)
    live = norms > ZERO_TOL
    unit = np.zeros_like(matrix)
    unit[live] = matrix[live] / norms[live, None]
    return unit, live


def similarity_matrix(scores: Sequence[ScoreVector]) -> np.ndarray:
    """N x N cosine similarities; rows and columns of zero vectors are all 0."""
    unit, _ = _unit_rows(scores)
    return np.clip(unit @ unit.T, -1.0, 1.0)


def cosine_similarity(a: ScoreVector, b: ScoreVector) -> float:
    """Cosine of the angle between two score vectors; 0 when either is a zero vector."""
    return float(similarity_matrix([a, b])[0, 1])


def pairwise_similarities(scores: Sequence[ScoreVector]) -> List[Tuple[int, int, float]]:
    """Similarity of every pair (i < j) between non-zero vectors, in lexicographic order."""
    unit, live = _unit_rows(scores)
    sims = np.clip(unit @ unit.T, -1.0, 1.0)
    rows, cols = np.triu_indices(len(scores), k=1)
    keep = live[rows] & live[cols]
    rows, cols = rows[keep], cols[keep]
    return [(int(i), int(j), float(d)) for i, j, d in zip(rows, cols, sims[rows, cols])]


def _check_threshold(d_thres: float):
    if not -1.0 <= d_thres <= 1.0:
        raise ValueError(f"d_thres out of [-1, 1]: {d_thres}")


def _graph_from_pairs(scores: Sequence[ScoreVector], pairs, d_thres: float) -> SimilarityGraph:
    kept = [(i, j, d) for i, j, d in pairs if d > d_thres]
    return SimilarityGraph(
        scores=tuple(scores),
        d_thres=d_thres,
        edges=tuple((i, j) for i, j, _ in kept),
        similarities=tuple(d for _, _, d in kept),
    )


def build_graph(scores: Sequence[ScoreVector], d_thres: float) -> SimilarityGraph:
    """Joins two scatterplots when their score vectors are more similar than d_thres."""
    if not scores:
        raise ValueError("build_graph needs at least one score vector")
    _check_threshold(d_thres)
    graph = _graph_from_pairs(scores, pairwise_similarities(scores), d_thres)
    logger.info(f"🔗 Built similarity graph: {graph.n_vertices} vertices, {graph.n_edges} edges at d_thres={d_thres}")
    return graph


# --- Coloring ---

def _start_key(rule: str):
    if rule == HIGHEST_S4:
        return lambda score: score.s4
    if rule == HIGHEST_NORM:
        return lambda score: score.norm
    raise ValueError(f"unknown start rule '{rule}' (expected one of {', '.join(START_RULES)})")


def greedy_color(g: SimilarityGraph, start_rule: str = HIGHEST_S4) -> SimilarityGraph:
    """
    Breadth-first greedy coloring. Starts at the most interesting vertex, queues
    neighbours in ascending id and gives each visited vertex the smallest color
    not used by an already colored neighbour. An exhausted BFS tree restarts at
    the most interesting uncolored vertex.
    """
    key = _start_key(start_rule)
    adjacency = g.adjacency()
    colors = [-1] * g.n_vertices
    visit_order: List[int] = []
    starts = sorted(range(g.n_vertices), key=lambda v: (-key(g.scores[v]), v))

    for start in starts:
        if colors[start] != -1:
            continue
        queue = deque([start])
        queued = {start}
        while queue:
            v = queue.popleft()
            taken = {colors[u] for u in adjacency[v] if colors[u] != -1}
            color = 0
            while color in taken:
                color += 1
            colors[v] = color
            visit_order.append(v)
            for u in adjacency[v]:
                if colors[u] == -1 and u not in queued:
                    queued.add(u)
                    queue.append(u)

    colored = replace(g, colors=tuple(colors), visit_order=tuple(visit_order), start_rule=start_rule)
    logger.info(f"🎨 Colored {colored.n_vertices} vertices with {colored.n_colors} colors")
    return colored


def coloring_conflicts(g: SimilarityGraph) -> List[Edge]:
    if g.colors is None:
        raise ValueError("graph has not been colored")
    return [(i, j) for i, j in g.edges if g.colors[i] == g.colors[j]]


def assert_proper_coloring(g: SimilarityGraph):
    conflicts = coloring_conflicts(g)
    if conflicts:
        raise SelectionError(f"coloring is not proper: {len(conflicts)} edge(s) join same-colored vertices, first {conflicts[0]}")
    if g.n_colors > g.max_degree + 1:
        raise SelectionError(f"{g.n_colors} colors exceed the greedy bound of {g.max_degree + 1}")


# --- Class choice and ranking ---

def color_sums(g: SimilarityGraph, rule: str = VECTOR_NORM) -> Dict[int, float]:
    if g.colors is None:
        raise ValueError("graph has not been colored")
    if rule == VECTOR_NORM:
        weight = lambda score: score.norm
    elif rule == SCALAR_S4:
        weight = lambda score: score.s4
    else:
        raise ValueError(f"unknown color-sum rule '{rule}' (expected one of {', '.join(COLOR_SUM_RULES)})")

    sums: Dict[int, float] = {}
    for v, color in enumerate(g.colors):
        sums[color] = sums.get(color, 0.0) + weight(g.scores[v])
    return dict(sorted(sums.items()))


def choose_color_class(g: SimilarityGraph, rule: str = VECTOR_NORM) -> int:
    """The color whose members have the largest summed weight; ties go to the lowest color."""
    sums = color_sums(g, rule)
    best = max(sums.values())
    return min(color for color, total in sums.items() if total == best)


def rank_key(score: ScoreVector, vertex: int):
    return (-score.max_component, -score.norm, vertex)


def select_top_k(g: SimilarityGraph, color: int, k: int, rule: str = VECTOR_NORM) -> SelectionResult:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if g.colors is None:
        raise ValueError("graph has not been colored")
    members = [v for v, c in enumerate(g.colors) if c == color]
    if not members:
        raise ValueError(f"color {color} is not present in the graph")

    ranking = sorted(members, key=lambda v: rank_key(g.scores[v], v))
    selected = ranking[:k]
    result = SelectionResult(
        chosen_color=color,
        members=tuple(members),
        ranking=tuple(ranking),
        selected=tuple(selected),
        n_edges=g.n_edges,
        n_colors=g.n_colors,
        color_sums=color_sums(g, rule),
    )
    logger.info(f"✅ Selected {len(selected)} of {len(members)} scatterplots in color {color}")
    return result


def select(
    scores: Sequence[ScoreVector],
    d_thres: float,
    k: int,
    start_rule: str = HIGHEST_S4,
    color_sum: str = VECTOR_NORM,
) -> Tuple[SimilarityGraph, SelectionResult]:
    """Graph, coloring, class choice and top-K in one call."""
    graph = greedy_color(build_graph(scores, d_thres), start_rule=start_rule)
    assert_proper_coloring(graph)
    color = choose_color_class(graph, color_sum)
    return graph, select_top_k(graph, color, k, color_sum)


# --- Threshold sweep ---

def threshold_sweep(
    scores: Sequence[ScoreVector],
    thresholds: Sequence[float],
    start_rule: str = HIGHEST_S4,
) -> List[SweepRow]:
    """Edge and color counts of the similarity graph at each threshold, in the given order."""
    if not scores:
        raise ValueError("threshold_sweep needs at least one score vector")
    pairs = pairwise_similarities(scores)
    rows = []
    for d_thres in thresholds:
        _check_threshold(d_thres)
        graph = greedy_color(_graph_from_pairs(scores, pairs, d_thres), start_rule=start_rule)
        assert_proper_coloring(graph)
        rows.append(SweepRow(d_thres=float(d_thres), edges=graph.n_edges, colors=graph.n_colors))
        logger.info(f"📊 d_thres={d_thres}: {graph.n_edges} edges, {graph.n_colors} colors")
    return rows
