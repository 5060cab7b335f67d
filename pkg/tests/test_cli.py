import json

import pandas as pd
import pytest

from cli.config import build_config
from cli.main import main, run

X_DIMS = "x1,x2,x3,x4,x5"
Y_DIMS = "y1,y2,y3,y4,y5,y6,y7"
ARTIFACTS = ["scores.csv", "scores.json", "graph.json", "selection.svg", "scores-chart.svg", "sweep.csv"]


def bipartite_args(csv_path, out_dir, *extra):
    return [
        "--input", str(csv_path),
        "--label", "day_type",
        "--mode", "bipartite",
        "--x-dims", X_DIMS,
        "--y-dims", Y_DIMS,
        "--out-dir", str(out_dir),
        "--no-progress",
        *extra,
    ]


@pytest.fixture
def small_file(tmp_path, small_csv):
    path = tmp_path / "small.csv"
    path.write_text(small_csv, encoding="utf-8")
    return path


def test_bipartite_run_scores_thirty_five_plots(bipartite_csv, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(bipartite_args(bipartite_csv, out)) == 0

    scores = pd.read_csv(out / "scores.csv")
    assert len(scores) == 35
    assert list(scores.columns) == ["id", "x", "y", "s1", "s2", "s3", "s4", "norm"]
    assert set(scores["x"]) == set(X_DIMS.split(","))
    assert set(scores["y"]) == set(Y_DIMS.split(","))
    assert json.loads((out / "scores.json").read_text(encoding="utf-8"))[0]["id"] == 0

    graph = json.loads((out / "graph.json").read_text(encoding="utf-8"))
    assert graph["n_vertices"] == 35
    assert len(graph["selection"]) == min(16, len(graph["members"]))
    assert "Scatterplots: N = 35" in capsys.readouterr().out


def test_two_dimension_run_selects_the_only_plot(small_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["--input", str(small_file), "--out-dir", str(out), "--no-progress"]) == 0
    graph = json.loads((out / "graph.json").read_text(encoding="utf-8"))
    assert graph["selection"] == [0]
    assert graph["n_edges"] == 0
    svg = (out / "selection.svg").read_text(encoding="utf-8")
    assert svg.count('<g id="plot-') == 1
    assert svg.count("<circle") == 3
    captured = capsys.readouterr().out
    assert "Scatterplots: N = 1" in captured
    assert "Selected ids: 0" in captured


def test_standard_sweep_table(bipartite_csv, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(bipartite_args(bipartite_csv, out, "--sweep")) == 0
    sweep = pd.read_csv(out / "sweep.csv")
    assert list(sweep.columns) == ["d_thres", "edges", "colors"]
    assert sweep["d_thres"].tolist() == [0.9995, 0.9975, 0.995, 0.9925, 0.99]
    edges = sweep["edges"].tolist()
    assert edges == sorted(edges)
    assert (sweep["colors"] >= 1).all()
    assert "d_thres  edges  colors" in capsys.readouterr().out


def test_runs_are_byte_identical(bipartite_csv, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(bipartite_args(bipartite_csv, first, "--sweep")) == 0
    assert main(bipartite_args(bipartite_csv, second, "--sweep", "--workers", "3")) == 0
    for name in ARTIFACTS:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_missing_input_fails_without_artifacts(tmp_path):
    out = tmp_path / "out"
    config = build_config({"input": str(tmp_path / "absent.csv"), "out_dir": str(out)})
    assert run(config) == 1
    assert not out.exists()


def test_failure_mid_run_rolls_back_written_artifacts(bipartite_csv, tmp_path):
    out = tmp_path / "out"
    # a directory where the grid should go makes the write fail after the reports
    (out / "selection.svg").mkdir(parents=True)
    assert main(bipartite_args(bipartite_csv, out)) == 1
    for name in ["scores.csv", "scores.json", "graph.json", "scores-chart.svg"]:
        assert not (out / name).exists()
    assert (out / "selection.svg").is_dir()


def test_bad_label_column_fails(small_file, tmp_path):
    out = tmp_path / "out"
    assert main(["--input", str(small_file), "--label", "class", "--out-dir", str(out), "--no-progress"]) == 1
    assert not out.exists()


def test_config_error_exits_with_two(small_file, tmp_path):
    assert main(["--input", str(small_file), "--d-thres", "1.5", "--out-dir", str(tmp_path / "o")]) == 2
    assert main(["--input", str(small_file), "--k", "0"]) == 2
    assert main(["--mode", "bipartite", "--input", str(small_file)]) == 2


def test_config_file_with_flag_override(bipartite_csv, tmp_path):
    out = tmp_path / "out"
    settings = tmp_path / "run.env"
    settings.write_text(
        "\n".join([
            f"INPUT={bipartite_csv}",
            "LABEL=day_type",
            "MODE=bipartite",
            f"X_DIMS={X_DIMS}",
            f"Y_DIMS={Y_DIMS}",
            "K=16",
            f"OUT_DIR={out}",
            "",
        ]),
        encoding="utf-8",
    )
    assert main(["--config", str(settings), "--k", "2", "--no-progress"]) == 0
    graph = json.loads((out / "graph.json").read_text(encoding="utf-8"))
    assert len(graph["selection"]) <= 2


def test_missing_config_file_exits_with_two(tmp_path):
    assert main(["--config", str(tmp_path / "absent.env")]) == 2


def test_dump_meshes_writes_one_svg_per_selected_plot(bipartite_csv, tmp_path):
    out = tmp_path / "out"
    assert main(bipartite_args(bipartite_csv, out, "--dump-meshes", "--k", "3")) == 0
    graph = json.loads((out / "graph.json").read_text(encoding="utf-8"))
    written = sorted(p.name for p in (out / "meshes").iterdir())
    assert written == sorted(f"mesh-{i}.svg" for i in graph["selection"])


def test_rerun_clears_artifacts_of_the_earlier_run(bipartite_csv, tmp_path):
    out = tmp_path / "out"
    assert main(bipartite_args(bipartite_csv, out, "--sweep", "--dump-meshes", "--k", "2")) == 0
    assert (out / "sweep.csv").is_file()
    assert any((out / "meshes").glob("mesh-*.svg"))
    (out / "notes.txt").write_text("keep me", encoding="utf-8")

    assert main(bipartite_args(bipartite_csv, out)) == 0
    assert not (out / "sweep.csv").exists()
    assert not (out / "meshes").exists()
    assert (out / "scores.csv").is_file()
    assert (out / "notes.txt").read_text(encoding="utf-8") == "keep me"


def test_failed_load_keeps_the_earlier_run(bipartite_csv, tmp_path):
    out = tmp_path / "out"
    assert main(bipartite_args(bipartite_csv, out)) == 0
    before = (out / "scores.csv").read_bytes()
    assert main(bipartite_args(tmp_path / "absent.csv", out)) == 1
    assert (out / "scores.csv").read_bytes() == before


def test_tab_delimited_input(tmp_path):
    path = tmp_path / "data.tsv"
    path.write_text("a\tb\tc\tlabel\n1\t2\t3\tx\n2\t1\t5\ty\n3\t4\t4\tx\n4\t3\t1\ty\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["--input", str(path), "--delimiter", "tab", "--out-dir", str(out), "--no-progress"]) == 0
    assert len(pd.read_csv(out / "scores.csv")) == 3
