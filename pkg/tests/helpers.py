"""Independent brute-force oracles used by the tests."""
from collections import deque
from typing import Dict, List, Sequence, Tuple

import numpy as np

from dataset.models import Dataset


def make_dataset(values, labels=None, names=None) -> Dataset:
    values = np.asarray(values, dtype=float)
    n, m = values.shape
    if labels is None:
        labels = np.zeros(n, dtype=int)
    labels = np.asarray(labels)
    classes = tuple(f"c{code}" for code in range(int(labels.max()) + 1))
    names = names or tuple(f"d{j}" for j in range(m))
    return Dataset(values=values, labels=labels, dim_names=names, classes=classes)


def circumcircle_violations(points: np.ndarray, triangles: np.ndarray, tol: float = 1e-9) -> List[Tuple[int, int]]:
    """(triangle index, point index) pairs where the point sits strictly inside the circumcircle."""
    violations = []
    for t, (i, j, k) in enumerate(triangles.tolist()):
        a, b, c = points[i], points[j], points[k]
        ax, ay = a
        bx, by = b
        cx, cy = c
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
        uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
        radius = np.hypot(ax - ux, ay - uy)
        for p, point in enumerate(points):
            if p in (i, j, k):
                continue
            if np.hypot(point[0] - ux, point[1] - uy) < radius * (1.0 - tol):
                violations.append((t, p))
    return violations


def average_ranks(values: Sequence[float]) -> List[float]:
    """Fractional ranking by explicit tie-group scan."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    position = 0
    while position < len(order):
        end = position
        while end + 1 < len(order) and values[order[end + 1]] == values[order[position]]:
            end += 1
        shared = (position + end) / 2.0 + 1.0
        for index in order[position:end + 1]:
            ranks[index] = shared
        position = end + 1
    return ranks


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return 0.0
    return sxy / (sxx * syy) ** 0.5


def spearman_oracle(x: Sequence[float], y: Sequence[float]) -> float:
    return pearson(average_ranks(x), average_ranks(y))


def per_point_entropy(points: np.ndarray, labels: Sequence[int], g: int) -> float:
    """-(1/n) sum over points k and classes c of p(c | cell of k) log2 p(c | cell of k)."""
    n = len(points)
    cell_of = []
    for x, y in points.tolist():
        col = min(int(np.floor(x * g)), g - 1)
        row = min(int(np.floor(y * g)), g - 1)
        cell_of.append((row, col))
    members: Dict[Tuple[int, int], List[int]] = {}
    for k, cell in enumerate(cell_of):
        members.setdefault(cell, []).append(labels[k])

    total = 0.0
    for k in range(n):
        in_cell = members[cell_of[k]]
        for c in set(in_cell):
            p = in_cell.count(c) / len(in_cell)
            total -= p * np.log2(p)
    return total / n


def replay_coloring(n: int, edges: Sequence[Tuple[int, int]], interest: Sequence[float]):
    """Re-derives BFS greedy colors and visit order from scratch."""
    neighbours = {v: set() for v in range(n)}
    for i, j in edges:
        neighbours[i].add(j)
        neighbours[j].add(i)

    colors = {}
    order = []
    while len(colors) < n:
        uncolored = [v for v in range(n) if v not in colors]
        start = max(uncolored, key=lambda v: (interest[v], -v))
        queue = deque([start])
        seen = {start}
        while queue:
            v = queue.popleft()
            used = {colors[u] for u in neighbours[v] if u in colors}
            colors[v] = next(c for c in range(n + 1) if c not in used)
            order.append(v)
            for u in sorted(neighbours[v]):
                if u not in colors and u not in seen:
                    seen.add(u)
                    queue.append(u)
    return [colors[v] for v in range(n)], order
