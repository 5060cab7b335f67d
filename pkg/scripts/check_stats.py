import argparse
from pathlib import Path

from services.metrics import METRIC_NAMES
from services.reports import metric_leaders, read_scores, weakest


def show_stats(scores_path: Path, top: int = 4):
    frame = read_scores(scores_path)
    print("\n📊 --- SCORE STATISTICS ---")
    print(f"Scatterplots in report: {len(frame)}")

    print("\nBy Metric:")
    for metric in METRIC_NAMES:
        column = frame[metric]
        print(f"  • {metric}: mean {column.mean():.3f}, min {column.min():.3f}, max {column.max():.3f}")

    names = {int(row.id): f"{row.x} x {row.y}" for row in frame.itertuples()}

    print(f"\nTop {top} per metric:")
    for metric, ids in metric_leaders(frame, top).items():
        listed = ", ".join(f"#{i} ({names[i]})" for i in ids)
        print(f"  • {metric}: {listed}")

    print("\nLeast informative (lowest norm):")
    for i in weakest(frame, top):
        print(f"  • #{i} ({names[i]})")


def main(argv=None):
    parser = argparse.ArgumentParser(description="Summarize a scores report.")
    parser.add_argument("scores", type=Path, help="scores.csv or scores.json")
    parser.add_argument("--top", type=int, default=4)
    args = parser.parse_args(argv)
    show_stats(args.scores, args.top)


if __name__ == "__main__":
    main()
