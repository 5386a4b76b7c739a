"""Scaling measurements written as CSV plus a matplotlib figure."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

from .oracle import gen_series_parallel
from .tuples import k_modality

DEFAULT_SIZES = (10_000, 20_000, 40_000, 80_000)


@dataclass
class ScalingRow:
    n: int
    m: int
    seconds: float
    accepted: bool
    ratio: float | None


def measure_scaling(sizes=DEFAULT_SIZES, k: int = 4, seed: int = 0, max_degree: int = 6, repeats: int = 1) -> list:
    """Time ``k_modality`` on random series-parallel digraphs of each size."""
    rows: list = []
    for n in sizes:
        g = gen_series_parallel(n, seed=seed, max_degree=max_degree)
        best = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            ok = k_modality(g, k)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        ratio = best / rows[-1].seconds if rows else None
        rows.append(ScalingRow(n, g.m, best, ok, ratio))
    return rows


def write_csv(rows, path: Path, delimiter: str = ",") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow(["n", "m", "seconds", "accepted", "ratio"])
        for r in rows:
            w.writerow([r.n, r.m, f"{r.seconds:.4f}", int(r.accepted), "" if r.ratio is None else f"{r.ratio:.3f}"])


def plot_scaling(rows, path: Path, title: str = "k-modality on series-parallel digraphs") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r.n for r in rows]
    ts = [r.seconds for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ns, ts, "o-", label="measured")
    if rows:
        ax.loglog(ns, [ts[0] * n / ns[0] for n in ns], "--", color="grey", label="linear reference")
    ax.set_xlabel("vertices")
    ax.set_ylabel("seconds")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(out_dir, sizes=DEFAULT_SIZES, k: int = 4, seed: int = 0, max_degree: int = 6) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = measure_scaling(sizes, k, seed, max_degree)
    write_csv(rows, out / "scaling.csv")
    plot_scaling(rows, out / "scaling.png")
    return rows
