"""Scaling benchmark: time event ranking over synthetic corpora.

Ranking cost should grow about linearly with the corpus, so the headline
figure is the ratio of wall times between consecutive (doubled) sizes.
Synthesized data is seeded; timings are reported as min and median over
the repeats, with the ratio taken on the min.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import kernels
from .config import RetrievalConfig
from .retrieval import rank_event
from .synth import bench_setup


@dataclass(frozen=True)
class BenchRow:
    backend: str
    n_videos: int
    min_seconds: float
    median_seconds: float
    ratio_vs_previous: float | None


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def run_bench(
    sizes: list[int],
    n_concepts: int = 600,
    dim: int = 300,
    repeat: int = 3,
    seed: int = 7,
    backends: list[str] | None = None,
    config: RetrievalConfig = RetrievalConfig(),
) -> list[BenchRow]:
    """Time rank_event at each corpus size for each kernel backend."""
    if not sizes:
        raise ValueError("need at least one corpus size")
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    if backends is None:
        backends = [kernels.active_backend()]

    setups = [(n, bench_setup(seed, n, n_concepts, dim)) for n in sizes]

    previous_backend = kernels.active_backend()
    rows: list[BenchRow] = []
    try:
        for backend in backends:
            kernels.set_backend(backend)
            kernels.warmup()
            space, repo, small_corpus, query = setups[0][1]
            rank_event(query, space, repo, small_corpus[: min(64, len(small_corpus))], config)

            prev_min: float | None = None
            for n, (space, repo, corpus, query) in setups:
                times = []
                for _ in range(repeat):
                    start = time.perf_counter()
                    rank_event(query, space, repo, corpus, config)
                    times.append(time.perf_counter() - start)
                lo = min(times)
                ratio = None if prev_min is None else lo / prev_min
                rows.append(
                    BenchRow(
                        backend=backend,
                        n_videos=n,
                        min_seconds=lo,
                        median_seconds=_median(times),
                        ratio_vs_previous=ratio,
                    )
                )
                prev_min = lo
    finally:
        kernels.set_backend(previous_backend)
    return rows


def format_bench_table(rows: list[BenchRow], seed: int) -> str:
    lines = [
        f"# synthetic corpora seeded with {seed}",
        f"{'backend':<8} {'videos':>8} {'min_s':>10} {'median_s':>10} {'t(2n)/t(n)':>11}",
    ]
    for row in rows:
        ratio = "-" if row.ratio_vs_previous is None else f"{row.ratio_vs_previous:.3f}"
        lines.append(
            f"{row.backend:<8} {row.n_videos:>8} {row.min_seconds:>10.4f} "
            f"{row.median_seconds:>10.4f} {ratio:>11}"
        )
    return "\n".join(lines) + "\n"
