import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from dataset.models import ScatterplotSpec
from services.metrics import METRIC_NAMES, ScoreVector, count_clamped
from services.selection import SelectionResult, SimilarityGraph, SweepRow

logger = logging.getLogger("scatterpick.reports")

SCORE_COLUMNS = ["id", "x", "y", "s1", "s2", "s3", "s4", "norm"]
SWEEP_COLUMNS = ["d_thres", "edges", "colors"]


def score_rows(specs: Sequence[ScatterplotSpec], scores: Sequence[ScoreVector]) -> List[Dict[str, Any]]:
    """One record per scatterplot with the stable report keys."""
    rows = []
    for spec, score in zip(specs, scores):
        rows.append({
            "id": spec.id,
            "x": spec.x_name,
            "y": spec.y_name,
            "s1": score.s1,
            "s2": score.s2,
            "s3": score.s3,
            "s4": score.s4,
            "norm": score.norm,
        })
    return rows


def write_scores_csv(path: Path, rows: List[Dict[str, Any]], delimiter: str = ",") -> Path:
    pd.DataFrame(rows, columns=SCORE_COLUMNS).to_csv(path, sep=delimiter, index=False, lineterminator="\n")
    return path


def write_json(path: Path, payload: Any) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def graph_report(
    specs: Sequence[ScatterplotSpec],
    graph: SimilarityGraph,
    result: SelectionResult,
    color_sum: str,
) -> Dict[str, Any]:
    """Everything needed to audit or replay a selection."""
    vertices = []
    for row, color in zip(score_rows(specs, graph.scores), graph.colors or ()):
        vertices.append({**row, "color": color})

    return {
        "d_thres": graph.d_thres,
        "start_rule": graph.start_rule,
        "color_sum": color_sum,
        "n_vertices": graph.n_vertices,
        "n_edges": graph.n_edges,
        "n_colors": graph.n_colors,
        "clamped_components": count_clamped(graph.scores),
        "vertices": vertices,
        "edges": [
            {"source": i, "target": j, "similarity": d}
            for (i, j), d in zip(graph.edges, graph.similarities)
        ],
        "visit_order": list(graph.visit_order),
        "color_sums": {str(color): total for color, total in result.color_sums.items()},
        "chosen_color": result.chosen_color,
        "members": list(result.members),
        "selection": list(result.selected),
    }


def write_sweep_csv(path: Path, rows: Sequence[SweepRow], delimiter: str = ",") -> Path:
    frame = pd.DataFrame([[row.d_thres, row.edges, row.colors] for row in rows], columns=SWEEP_COLUMNS)
    frame.to_csv(path, sep=delimiter, index=False, lineterminator="\n")
    return path


def read_scores(path: Path) -> pd.DataFrame:
    """Loads a scores report written by write_scores_csv or as JSON."""
    path = Path(path)
    if path.suffix == ".json":
        frame = pd.DataFrame(json.loads(path.read_text(encoding="utf-8")))
    else:
        frame = pd.read_csv(path)
    missing = [column for column in SCORE_COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"{path} is not a scores report (missing columns: {', '.join(missing)})")
    return frame[SCORE_COLUMNS]


def metric_leaders(frame: pd.DataFrame, top: int = 4) -> Dict[str, List[int]]:
    """Ids of the `top` highest-scoring scatterplots per metric, ties by id."""
    leaders = {}
    for metric in METRIC_NAMES:
        ordered = frame.sort_values([metric, "id"], ascending=[False, True], kind="mergesort")
        leaders[metric] = ordered["id"].head(top).astype(int).tolist()
    return leaders


def weakest(frame: pd.DataFrame, count: int = 4) -> List[int]:
    """Ids of the lowest-norm scatterplots."""
    ordered = frame.sort_values(["norm", "id"], ascending=[True, True], kind="mergesort")
    return ordered["id"].head(count).astype(int).tolist()
