import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError

logger = logging.getLogger("scatterpick.geometry")

# Tolerance on normalized coordinates for collinearity and cocircularity.
EPS = 1e-12

Edge = Tuple[int, int]


def _empty_index_array(width: int) -> np.ndarray:
    return np.empty((0, width), dtype=np.int64)


@dataclass(frozen=True)
class Triangulation:
    """Delaunay triangles over a set of distinct points (indices into `points`)."""

    points: np.ndarray
    triangles: np.ndarray

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    @property
    def edges(self) -> np.ndarray:
        return unique_edges(self.triangles)

    @property
    def edge_lengths(self) -> np.ndarray:
        return edge_lengths(self.points, self.edges)


@dataclass(frozen=True)
class TriMesh:
    points: np.ndarray
    triangles: np.ndarray
    kept_edges: np.ndarray
    edge_lengths: np.ndarray
    boundary_edges: np.ndarray
    total_area: float
    total_perimeter: float
    prune_threshold: float

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    def __repr__(self):
        return (
            f"<TriMesh(triangles={len(self.triangles)}, edges={len(self.kept_edges)}, "
            f"area={self.total_area:.4f}, perimeter={self.total_perimeter:.4f}, omega={self.prune_threshold:.4f})>"
        )


# --- Small vector helpers ---

def _triangle_edges(triangles: np.ndarray) -> np.ndarray:
    """All three edges of every triangle, each sorted (i < j); duplicates kept."""
    if len(triangles) == 0:
        return _empty_index_array(2)
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    edges.sort(axis=1)
    return edges


def unique_edges(triangles: np.ndarray) -> np.ndarray:
    edges = _triangle_edges(triangles)
    if len(edges) == 0:
        return edges
    return np.unique(edges, axis=0)


def edge_lengths(points: np.ndarray, edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return np.empty(0)
    return np.linalg.norm(points[edges[:, 0]] - points[edges[:, 1]], axis=1)


def triangle_areas(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    if len(triangles) == 0:
        return np.empty(0)
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]]
    c = points[triangles[:, 2]]
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return 0.5 * np.abs(cross)


def incircle(a, b, c, d) -> np.ndarray:
    """
    Classic in-circle determinant: positive when d lies inside the circumcircle
    of the counter-clockwise triangle (a, b, c). Broadcasts over leading axes.
    """
    a, b, c, d = (np.asarray(p, float) for p in (a, b, c, d))
    adx, ady = a[..., 0] - d[..., 0], a[..., 1] - d[..., 1]
    bdx, bdy = b[..., 0] - d[..., 0], b[..., 1] - d[..., 1]
    cdx, cdy = c[..., 0] - d[..., 0], c[..., 1] - d[..., 1]
    return (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )


def _incircle_scale(a, b, c, d) -> np.ndarray:
    """Fourth power of the largest coordinate offset, used to make EPS relative."""
    stacked = np.stack([np.asarray(p, float) - np.asarray(d, float) for p in (a, b, c)])
    return np.max(np.abs(stacked), axis=(0, -1)) ** 4


def is_cocircular(a, b, c, d) -> np.ndarray:
    scale = _incircle_scale(a, b, c, d)
    return np.abs(incircle(a, b, c, d)) <= EPS * np.maximum(scale, EPS)


# --- Triangulation ---

def distinct_points(points) -> np.ndarray:
    """Drops exact duplicate positions, keeping first occurrences in input order."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    _, first = np.unique(pts, axis=0, return_index=True)
    return pts[np.sort(first)]


def _is_degenerate(points: np.ndarray) -> bool:
    if len(points) < 3:
        return True
    centered = points - points.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    return singular[1] <= EPS * max(1.0, singular[0])


def _cocircular_edges(points: np.ndarray, triangles: np.ndarray) -> List[Edge]:
    """Interior edges whose two opposite vertices lie on a common circle with it."""
    edges = _triangle_edges(triangles)
    # opposite vertex for each half edge, aligned with _triangle_edges ordering
    opposite = np.concatenate([triangles[:, 2], triangles[:, 0], triangles[:, 1]])
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    edges, opposite = edges[order], opposite[order]
    shared = np.flatnonzero(np.all(edges[1:] == edges[:-1], axis=1))
    if len(shared) == 0:
        return []
    i, j = edges[shared, 0], edges[shared, 1]
    c, d = opposite[shared], opposite[shared + 1]
    flags = is_cocircular(points[i], points[j], points[c], points[d])
    return [(int(a), int(b)) for a, b in edges[shared][flags]]


def _third_vertex(triangle: Tuple[int, int, int], edge: Edge) -> int:
    for vertex in triangle:
        if vertex not in edge:
            return vertex
    raise ValueError(f"edge {edge} is not part of triangle {triangle}")


def _edges_of(triangle: Tuple[int, int, int]) -> List[Edge]:
    a, b, c = sorted(triangle)
    return [(a, b), (a, c), (b, c)]


def _settle_cocircular(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """
    Flips every cocircular diagonal to the lexicographically smaller index pair.
    Each flip strictly decreases the sorted edge list, so the loop terminates and
    the result depends only on the point set and its order.
    """
    candidates = _cocircular_edges(points, triangles)
    if not candidates:
        return triangles

    tris: Dict[int, Tuple[int, int, int]] = {t: tuple(row) for t, row in enumerate(triangles.tolist())}
    owners: Dict[Edge, Set[int]] = defaultdict(set)
    for t, triangle in tris.items():
        for edge in _edges_of(triangle):
            owners[edge].add(t)

    queue = deque(sorted(candidates))
    flips = 0
    while queue:
        edge = queue.popleft()
        sharing = owners.get(edge)
        if not sharing or len(sharing) != 2:
            continue
        t1, t2 = sorted(sharing)
        c = _third_vertex(tris[t1], edge)
        d = _third_vertex(tris[t2], edge)
        diagonal = (min(c, d), max(c, d))
        if diagonal >= edge:
            continue
        i, j = edge
        if not is_cocircular(points[i], points[j], points[c], points[d]):
            continue

        for t in (t1, t2):
            for old in _edges_of(tris[t]):
                owners[old].discard(t)
        del owners[edge]
        tris[t1] = (i, c, d)
        tris[t2] = (j, c, d)
        for t in (t1, t2):
            for new in _edges_of(tris[t]):
                owners[new].add(t)
        queue.extend(sorted([(min(i, c), max(i, c)), (min(i, d), max(i, d)), (min(j, c), max(j, c)), (min(j, d), max(j, d))]))
        flips += 1

    logger.debug(f"Settled {len(candidates)} cocircular candidates with {flips} flips")
    return np.array(sorted(tuple(sorted(t)) for t in tris.values()), dtype=np.int64)


def delaunay(points) -> Triangulation:
    """
    Delaunay triangulation of the distinct points (first occurrences kept).
    Fewer than 3 distinct points, or collinear input, give an empty triangulation.
    """
    pts = distinct_points(points)
    empty = Triangulation(points=pts, triangles=_empty_index_array(3))
    if _is_degenerate(pts):
        return empty

    try:
        simplices = Delaunay(pts).simplices.astype(np.int64)
    except QhullError as e:
        logger.debug(f"Qhull rejected {len(pts)} points: {e}")
        return empty

    # drop any zero-area simplex Qhull may emit for flat input
    simplices = simplices[triangle_areas(pts, simplices) > 0]
    if len(simplices) == 0:
        return empty

    simplices = np.sort(simplices, axis=1)
    simplices = _settle_cocircular(pts, simplices)
    order = np.lexsort((simplices[:, 2], simplices[:, 1], simplices[:, 0]))
    return Triangulation(points=pts, triangles=simplices[order])


# --- Pruning ---

def prune_threshold(lengths: Sequence[float]) -> float:
    """Upper Tukey fence q75 + 1.5 * IQR, quartiles by linear interpolation."""
    values = np.asarray(lengths, dtype=float)
    if values.size == 0:
        raise ValueError("prune_threshold needs at least one edge length")
    q25, q75 = np.quantile(values, [0.25, 0.75])
    return float(q75 + 1.5 * (q75 - q25))


def _empty_mesh(points: np.ndarray, omega: float) -> TriMesh:
    return TriMesh(
        points=points,
        triangles=_empty_index_array(3),
        kept_edges=_empty_index_array(2),
        edge_lengths=np.empty(0),
        boundary_edges=_empty_index_array(2),
        total_area=0.0,
        total_perimeter=0.0,
        prune_threshold=float(omega),
    )


def prune(tri: Triangulation, omega: float) -> TriMesh:
    """Keeps the triangles whose three edges are all no longer than omega."""
    points = tri.points
    if tri.is_empty:
        return _empty_mesh(points, omega)

    triangles = tri.triangles
    a, b, c = points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]]
    longest = np.maximum.reduce([
        np.linalg.norm(a - b, axis=1),
        np.linalg.norm(b - c, axis=1),
        np.linalg.norm(c - a, axis=1),
    ])
    kept = triangles[longest <= omega]
    if len(kept) == 0:
        return _empty_mesh(points, omega)

    half_edges = _triangle_edges(kept)
    edges, counts = np.unique(half_edges, axis=0, return_counts=True)
    lengths = edge_lengths(points, edges)
    boundary = edges[counts == 1]
    perimeter = float(lengths[counts == 1].sum())
    area = float(triangle_areas(points, kept).sum())

    return TriMesh(
        points=points,
        triangles=kept,
        kept_edges=edges,
        edge_lengths=lengths,
        boundary_edges=boundary,
        total_area=area,
        total_perimeter=perimeter,
        prune_threshold=float(omega),
    )


def longest_kept_edge(mesh: TriMesh) -> float:
    if len(mesh.edge_lengths) == 0:
        return 0.0
    return float(mesh.edge_lengths.max())


def build_mesh(points, omega: Optional[float] = None) -> TriMesh:
    """Triangulates, derives omega from the edge lengths unless given, and prunes."""
    tri = delaunay(points)
    if tri.is_empty:
        return _empty_mesh(tri.points, omega if omega is not None else 0.0)
    if omega is None:
        omega = prune_threshold(tri.edge_lengths)
    return prune(tri, omega)
