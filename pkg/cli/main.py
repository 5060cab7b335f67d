import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from colorama import Fore, Style, just_fix_windows_console

from cli.config import (
    STANDARD_THRESHOLDS,
    ConfigError,
    RunConfig,
    build_config,
    load_config_file,
    merge_settings,
)
from dataset.loader import enumerate_scatterplots, load_dataset
from dataset.models import DatasetError
from services.metrics import count_clamped, plot_mesh, score_all
from services.render import PlotStyle, RenderError, render_grid, render_mesh, render_score_chart
from services.reports import graph_report, score_rows, write_json, write_scores_csv, write_sweep_csv
from services.selection import SelectionError, select, threshold_sweep

logger = logging.getLogger("scatterpick.cli")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

SCORES_CSV = "scores.csv"
SCORES_JSON = "scores.json"
GRAPH_JSON = "graph.json"
SELECTION_SVG = "selection.svg"
CHART_SVG = "scores-chart.svg"
SWEEP_CSV = "sweep.csv"
MESH_DIR = "meshes"
ARTIFACT_NAMES = (SCORES_CSV, SCORES_JSON, GRAPH_JSON, SELECTION_SVG, CHART_SVG, SWEEP_CSV)


class _ArtifactWriter:
    """Remembers what a run wrote so a failed run can take it back."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: List[Path] = []
        self.created_dirs: List[Path] = []

    def path(self, name: str) -> Path:
        target = self.out_dir / name
        for parent in reversed(target.parents):
            if not parent.exists():
                parent.mkdir()
                self.created_dirs.append(parent)
        self.written.append(target)
        return target

    def text(self, name: str, content: str) -> Path:
        target = self.path(name)
        target.write_text(content, encoding="utf-8", newline="\n")
        return target

    def clear_stale(self):
        """Deletes artifacts an earlier run left in out_dir."""
        stale = [self.out_dir / name for name in ARTIFACT_NAMES if (self.out_dir / name).is_file()]
        mesh_dir = self.out_dir / MESH_DIR
        if mesh_dir.is_dir():
            stale.extend(sorted(path for path in mesh_dir.glob("mesh-*.svg") if path.is_file()))
        for target in stale:
            target.unlink()
        if mesh_dir.is_dir() and not any(mesh_dir.iterdir()):
            mesh_dir.rmdir()
        if stale:
            logger.info(f"🧹 Cleared {len(stale)} artifact(s) of an earlier run from {self.out_dir}")

    def rollback(self):
        for target in reversed(self.written):
            if target.is_file():
                target.unlink()
        for directory in reversed(self.created_dirs):
            if directory.exists() and not any(directory.iterdir()):
                directory.rmdir()
        logger.info(f"🧹 Removed {len(self.written)} partial artifact(s)")


def run(config: RunConfig, progress: bool = False) -> int:
    """
    Load, score, color, select, render, report.
    Returns 0 on success, 1 when any stage emits a diagnostic.
    """
    writer = _ArtifactWriter(Path(config.out_dir))
    try:
        # Step 1: load and enumerate
        dataset = load_dataset(config.input, config.label, delimiter=config.delimiter)
        specs = enumerate_scatterplots(dataset, config.mode, config.x_dims, config.y_dims)

        # Step 2: score every scatterplot
        scores = score_all(dataset, specs, g=config.grid, omega=config.omega, workers=config.workers, progress=progress)

        # Step 3: graph, coloring, class choice, top-K
        graph, result = select(scores, config.d_thres, config.k, config.start_rule, config.color_sum)

        # Step 4: artifacts
        writer.clear_stale()
        rows = score_rows(specs, scores)
        write_scores_csv(writer.path(SCORES_CSV), rows)
        write_json(writer.path(SCORES_JSON), rows)
        write_json(writer.path(GRAPH_JSON), graph_report(specs, graph, result, config.color_sum))
        writer.text(SELECTION_SVG, render_grid(dataset, specs, scores, result, PlotStyle(columns=config.columns)))
        writer.text(CHART_SVG, render_score_chart(scores, result.selected))

        sweep_rows = None
        if config.sweep:
            sweep_rows = threshold_sweep(scores, config.sweep, config.start_rule)
            write_sweep_csv(writer.path(SWEEP_CSV), sweep_rows)

        if config.dump_meshes:
            for plot_id in result.selected:
                mesh = plot_mesh(specs[plot_id], dataset, config.omega)
                writer.text(f"{MESH_DIR}/mesh-{plot_id}.svg", render_mesh(mesh))

    except (DatasetError, RenderError, SelectionError, ValueError, OSError) as e:
        logger.error(f"❌ Run failed: {e}")
        writer.rollback()
        return 1

    # Step 5: summary
    print_summary(len(specs), graph.n_edges, graph.n_colors, result.chosen_color, list(result.selected), count_clamped(scores))
    if sweep_rows:
        print_sweep(sweep_rows)
    logger.info(f"✅ Wrote {len(writer.written)} artifact(s) to {config.out_dir}")
    return 0


def print_summary(n: int, edges: int, colors: int, chosen: int, selected: Sequence[int], clamped: int):
    print(f"\n{Fore.CYAN}📊 --- SELECTION SUMMARY ---{Style.RESET_ALL}")
    print(f"Scatterplots: N = {n}")
    print(f"Edges: {edges}")
    print(f"Colors: {colors}")
    print(f"Chosen color: {chosen}")
    print(f"{Fore.GREEN}Selected ids: {', '.join(str(i) for i in selected)}{Style.RESET_ALL}")
    if clamped:
        print(f"{Fore.YELLOW}⚠️ Clamped score components: {clamped}{Style.RESET_ALL}")


def print_sweep(rows):
    print(f"\n{Fore.CYAN}d_thres  edges  colors{Style.RESET_ALL}")
    for row in rows:
        print(f"{row.d_thres:<8} {row.edges:>5} {row.colors:>7}")


# --- Command line ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatterpick",
        description="Score every scatterplot of a labeled dataset and select a varied, informative subset.",
    )
    parser.add_argument("--config", type=Path, help="flat KEY=value settings file; flags take precedence")
    parser.add_argument("--input", help="delimited text file with a header row")
    parser.add_argument("--label", help="name of the label column (default: label)")
    parser.add_argument("--mode", help="all-pairs (default) or bipartite")
    parser.add_argument("--x-dims", dest="x_dims", help="comma-separated X dimensions for bipartite mode")
    parser.add_argument("--y-dims", dest="y_dims", help="comma-separated Y dimensions for bipartite mode")
    parser.add_argument("--d-thres", dest="d_thres", help="similarity threshold in [-1, 1] (default: 0.995)")
    parser.add_argument("--k", help="number of scatterplots to select (default: 16)")
    parser.add_argument("--grid", help="entropy grid cells per axis (default: 5)")
    parser.add_argument("--omega", help="fixed prune threshold instead of the Tukey fence")
    parser.add_argument("--color-sum", dest="color_sum", help="vector-norm (default) or scalar-s4")
    parser.add_argument("--start-rule", dest="start_rule", help="highest-s4 (default) or highest-norm")
    parser.add_argument(
        "--sweep",
        nargs="?",
        const=",".join(str(t) for t in STANDARD_THRESHOLDS),
        help="comma-separated thresholds for the sweep table; bare flag uses the standard five",
    )
    parser.add_argument("--out-dir", dest="out_dir", help="output directory (default: out)")
    parser.add_argument("--delimiter", help="input delimiter: ',' (default) or tab")
    parser.add_argument("--columns", help="grid columns in selection.svg (default: 4)")
    parser.add_argument("--workers", help="threads used for scoring (default: 1)")
    parser.add_argument("--dump-meshes", dest="dump_meshes", action="store_const", const=True, help="write pruned meshes of selected plots")
    parser.add_argument("--no-progress", dest="no_progress", action="store_true", help="hide the scoring progress bar")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


SETTING_FLAGS = (
    "input", "label", "mode", "x_dims", "y_dims", "d_thres", "k", "grid", "omega", "color_sum",
    "start_rule", "sweep", "out_dir", "delimiter", "columns", "workers", "dump_meshes",
)


def settings_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    file_settings = load_config_file(args.config) if args.config else {}
    flag_settings = {name: getattr(args, name) for name in SETTING_FLAGS}
    return merge_settings(file_settings, flag_settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    just_fix_windows_console()

    try:
        config = build_config(settings_from_args(args))
    except ConfigError as e:
        for diagnostic in e.diagnostics:
            logger.error(f"❌ {diagnostic}")
        return 2

    progress = not args.no_progress and sys.stderr.isatty()
    return run(config, progress=progress)


if __name__ == "__main__":
    sys.exit(main())
