import argparse
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

# Column roles of the variety dataset.
CORRELATED_PAIR = ("c1", "c2")
BLOB_PAIR = ("b1", "b2")
LABEL_PAIR = ("l1", "l2")


def make_variety_dataset(n: int = 400, seed: int = 7, n_noise: int = 5, jitter: float = 0.005) -> pd.DataFrame:
    """
    Seeded dataset with three structured dimension pairs and pure-noise dimensions.

    - c1/c2: near-perfect monotone relation.
    - b1/b2: two thin parallel bars far apart (two clusters), uniform marginals.
    - l1/l2: uniform points whose labels form a checkerboard aligned with the
      5x5 entropy grid, so the label classes separate perfectly.
    - n1..nK: independent uniform noise.
    """
    rng = np.random.default_rng(seed)
    columns = {}

    c1 = rng.uniform(0.0, 1.0, n)
    columns["c1"] = c1
    columns["c2"] = c1 + rng.normal(0.0, 0.01, n)

    # bar A along x + y = 0.5, bar B along x + y = 1.5
    t = rng.uniform(0.0, 0.5, n)
    upper = rng.integers(0, 2, n)
    offset = rng.normal(0.0, jitter, n)
    columns["b1"] = t + 0.5 * upper + offset
    columns["b2"] = 0.5 - t + 0.5 * upper + offset

    l1 = rng.uniform(0.0, 1.0, n)
    l2 = rng.uniform(0.0, 1.0, n)
    # pin the ranges so normalization leaves l1/l2 unchanged
    l1[:2] = [0.0, 1.0]
    l2[:2] = [0.0, 1.0]
    columns["l1"] = l1
    columns["l2"] = l2

    for index in range(1, n_noise + 1):
        columns[f"n{index}"] = rng.uniform(0.0, 1.0, n)

    frame = pd.DataFrame(columns)
    frame["label"] = np.where((l1 < 0.4) ^ (l2 < 0.4), "A", "B")
    return frame


def make_bipartite_dataset(n: int = 457, seed: int = 11, n_x: int = 5, n_y: int = 7) -> pd.DataFrame:
    """
    Seeded dataset with n_x explanatory and n_y objective dimensions and a
    binary label (weekday / holiday), sized like a year and a quarter of days.
    """
    rng = np.random.default_rng(seed)
    holiday = rng.uniform(0.0, 1.0, n) < 0.3
    xs = {f"x{i}": rng.normal(0.0, 1.0, n) for i in range(1, n_x + 1)}
    xs["x1"] = xs["x1"] + 1.5 * holiday

    ys = {}
    for j in range(1, n_y + 1):
        source = xs[f"x{(j - 1) % n_x + 1}"]
        if j % 3 == 1:
            ys[f"y{j}"] = source + rng.normal(0.0, 0.3, n)
        elif j % 3 == 2:
            ys[f"y{j}"] = np.where(holiday, 2.0, -2.0) + rng.normal(0.0, 0.5, n)
        else:
            ys[f"y{j}"] = rng.exponential(1.0, n)

    frame = pd.DataFrame({**xs, **ys})
    frame["day_type"] = np.where(holiday, "holiday", "weekday")
    return frame


def make_scale_dataset(n: int = 1000, m: int = 30, seed: int = 3, n_classes: int = 3) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    base = rng.normal(0.0, 1.0, (n, m))
    base[:, 1::3] += 0.8 * base[:, 0::3][:, : base[:, 1::3].shape[1]]
    frame = pd.DataFrame(base, columns=[f"d{j:02d}" for j in range(m)])
    frame["label"] = [f"class{c}" for c in rng.integers(0, n_classes, n)]
    return frame


KINDS = {
    "variety": make_variety_dataset,
    "bipartite": make_bipartite_dataset,
    "scale": make_scale_dataset,
}


def write_dataset(kind: str, output: Path, seed: Optional[int] = None) -> Path:
    factory = KINDS[kind]
    frame = factory() if seed is None else factory(seed=seed)
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, lineterminator="\n")
    print(f"✅ Wrote {len(frame)} rows x {frame.shape[1]} columns ({kind}) to {output}")
    return output


def main(argv=None):
    parser = argparse.ArgumentParser(description="Write a seeded synthetic dataset as CSV.")
    parser.add_argument("--kind", choices=sorted(KINDS), default="variety")
    parser.add_argument("--output", type=Path, required=True)
    parser.add_argument("--seed", type=int)
    args = parser.parse_args(argv)
    write_dataset(args.kind, args.output, args.seed)


if __name__ == "__main__":
    main()
