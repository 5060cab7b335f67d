import numpy as np
import pandas as pd

from dataset.loader import load_dataset
from dataset.models import ScatterplotSpec
from scripts import check_stats, make_synthetic
from services.metrics import ScoreVector
from services.reports import score_rows, write_json, write_scores_csv


def test_variety_dataset_layout():
    frame = make_synthetic.make_variety_dataset(n=50, seed=1)
    assert list(frame.columns) == ["c1", "c2", "b1", "b2", "l1", "l2", "n1", "n2", "n3", "n4", "n5", "label"]
    assert set(frame["label"]) <= {"A", "B"}
    assert frame["l1"].min() == 0.0 and frame["l1"].max() == 1.0


def test_generators_are_seeded():
    first = make_synthetic.make_bipartite_dataset(seed=4)
    second = make_synthetic.make_bipartite_dataset(seed=4)
    pd.testing.assert_frame_equal(first, second)
    assert not first.equals(make_synthetic.make_bipartite_dataset(seed=5))


def test_scale_dataset_shape():
    frame = make_synthetic.make_scale_dataset(n=20, m=7)
    assert frame.shape == (20, 8)
    assert frame.columns[0] == "d00"


def test_make_synthetic_main_writes_loadable_csv(tmp_path, capsys):
    output = tmp_path / "sub" / "bip.csv"
    make_synthetic.main(["--kind", "bipartite", "--output", str(output), "--seed", "2"])
    d = load_dataset(output, "day_type")
    assert d.m == 12
    assert set(d.classes) <= {"holiday", "weekday"}
    assert "✅ Wrote" in capsys.readouterr().out


def sample_rows():
    specs = [
        ScatterplotSpec(id=0, x_dim=0, y_dim=1, x_name="a", y_name="b"),
        ScatterplotSpec(id=1, x_dim=0, y_dim=2, x_name="a", y_name="c"),
        ScatterplotSpec(id=2, x_dim=1, y_dim=2, x_name="b", y_name="c"),
    ]
    scores = [ScoreVector(0.9, 0.1, 0.0, 0.2), ScoreVector(0.1, 0.8, 0.3, 0.0), ScoreVector(0.0, 0.05, 0.0, 0.0)]
    return score_rows(specs, scores)


def test_check_stats_on_csv(tmp_path, capsys):
    path = write_scores_csv(tmp_path / "scores.csv", sample_rows())
    check_stats.main([str(path), "--top", "1"])
    out = capsys.readouterr().out
    assert "SCORE STATISTICS" in out
    assert "Scatterplots in report: 3" in out
    assert "s1: #0 (a x b)" in out
    assert "s2: #1 (a x c)" in out
    assert "#2 (b x c)" in out.split("Least informative")[1]


def test_check_stats_on_json(tmp_path, capsys):
    path = write_json(tmp_path / "scores.json", sample_rows())
    check_stats.show_stats(path, top=2)
    out = capsys.readouterr().out
    assert f"s1: mean {np.mean([0.9, 0.1, 0.0]):.3f}" in out
