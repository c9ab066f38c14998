"""Macro-F1 scoring and the two benchmark protocols.

Scoring averages per-class F1 over all dataset categories (train and test
combined), not just those present in the test slice; a class with no true
or no predicted positives contributes 0. The random baseline sweeps shot
counts with freshly sampled demonstrations per repeat; the spectral run
fixes the graph, spectrum, and clustering once per split and redraws only
the per-cluster representatives across repeats. Both protocols share the
same split object, so comparisons are paired on identical test rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import Split, Table
from .llmclient import UNPARSED, LlmConfig, classify_prompts
from .pipeline import estimate_clusters, select_representatives
from .seeds import substream, substream_seed
from .template import PromptSpec, build_prompt, categories_in_order, render_demo, render_query
from .tokens import TokenizerHandle

DEFAULT_SHOTS = (0, 2, 4, 6, 8, 10)
DEFAULT_REPEATS = 5


@dataclass
class PredictionRecord:
    row_index: int
    truth: str
    raw: str
    label: str

    def as_dict(self) -> dict:
        return {
            "row_index": self.row_index,
            "truth": self.truth,
            "raw": self.raw,
            "label": self.label,
        }


@dataclass
class RunRecord:
    repeat: int
    seed: int
    n_demos: int
    demo_rows: tuple[int, ...]
    macro_f1: float
    predictions: list[PredictionRecord]


@dataclass
class EvalReport:
    macro_f1_mean: float
    macro_f1_std: float
    per_class_f1: dict[str, float]  # from the last repeat
    n_unparsed: int
    runs: list[RunRecord] = field(default_factory=list)
    d: int | None = None  # set for spectral-mode reports

    def as_dict(self) -> dict:
        out: dict = {}
        if self.d is not None:
            out["d"] = self.d
        out.update(
            {
                "macro_f1_mean": self.macro_f1_mean,
                "macro_f1_std": self.macro_f1_std,
                "per_class_f1": self.per_class_f1,
                "n_unparsed": self.n_unparsed,
                "runs": [
                    {
                        "repeat": r.repeat,
                        "seed": r.seed,
                        "n_demos": r.n_demos,
                        "demo_rows": list(r.demo_rows),
                        "macro_f1": r.macro_f1,
                    }
                    for r in self.runs
                ],
            }
        )
        return out


def per_class_f1(
    truth: Sequence[str], pred: Sequence[str], categories: Sequence[str]
) -> dict[str, float]:
    """F1 per category; 0/0 precision, recall, or F1 counts as 0."""
    if len(truth) != len(pred):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(pred)} predictions")
    if not truth:
        raise ValueError("need at least one prediction to score")
    scores: dict[str, float] = {}
    for cat in categories:
        tp = sum(1 for t, p in zip(truth, pred) if t == cat and p == cat)
        fp = sum(1 for t, p in zip(truth, pred) if t != cat and p == cat)
        fn = sum(1 for t, p in zip(truth, pred) if t == cat and p != cat)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        scores[cat] = (
            2 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
    return scores


def macro_f1(truth: Sequence[str], pred: Sequence[str], categories: Sequence[str]) -> float:
    """Unweighted mean of per-class F1 over all N categories."""
    if not categories:
        raise ValueError("categories must be nonempty")
    scores = per_class_f1(truth, pred, categories)
    return sum(scores.values()) / len(categories)


def _scoring_categories(table: Table, split: Split) -> list[str]:
    """All dataset categories: train first-appearance order, then test-only ones."""
    cats = categories_in_order(table, split.train)
    for extra in categories_in_order(table, split.test):
        if extra not in cats:
            cats.append(extra)
    return cats


def _classify_test_rows(
    table: Table,
    split: Split,
    prompt_categories: list[str],
    demos: Sequence,
    cfg: LlmConfig,
    concurrency: int,
    backoff: float,
) -> list[PredictionRecord]:
    prompts = [
        build_prompt(
            PromptSpec(
                categories=list(prompt_categories),
                demos=list(demos),
                query_text=render_query(table, row),
            )
        )
        for row in split.test
    ]
    predictions = classify_prompts(
        cfg, prompts, prompt_categories, concurrency=concurrency, backoff=backoff
    )
    return [
        PredictionRecord(row_index=row, truth=table.label_of(row), raw=p.raw, label=p.label)
        for row, p in zip(split.test, predictions)
    ]


def _aggregate(runs: list[RunRecord], categories: list[str], d: int | None = None) -> EvalReport:
    scores = np.array([r.macro_f1 for r in runs], dtype=np.float64)
    last = runs[-1]
    return EvalReport(
        macro_f1_mean=float(scores.mean()),
        macro_f1_std=float(scores.std()),
        per_class_f1=per_class_f1(
            [p.truth for p in last.predictions], [p.label for p in last.predictions], categories
        ),
        n_unparsed=sum(
            1 for r in runs for p in r.predictions if p.label == UNPARSED
        ),
        runs=runs,
        d=d,
    )


def run_random_baseline(
    table: Table,
    split: Split,
    cfg: LlmConfig,
    shots: Sequence[int] = DEFAULT_SHOTS,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
    concurrency: int = 4,
    backoff: float = 1.0,
) -> dict[int, EvalReport]:
    """Shot-count sweep with uniformly sampled demonstrations per repeat."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if max(shots) > len(split.train):
        raise ValueError(
            f"largest shot count {max(shots)} exceeds training size {len(split.train)}"
        )
    prompt_categories = categories_in_order(table, split.train)
    scoring = _scoring_categories(table, split)

    reports: dict[int, EvalReport] = {}
    for shot in shots:
        runs = []
        for repeat in range(repeats):
            run_seed = substream_seed(seed, "random-baseline", shot, repeat)
            picks = substream(seed, "random-baseline", shot, repeat).choice(
                len(split.train), size=shot, replace=False
            )
            demo_rows = tuple(split.train[int(i)] for i in picks)
            demos = [render_demo(table, r) for r in demo_rows]
            records = _classify_test_rows(
                table, split, prompt_categories, demos, cfg, concurrency, backoff
            )
            runs.append(
                RunRecord(
                    repeat=repeat,
                    seed=run_seed,
                    n_demos=shot,
                    demo_rows=demo_rows,
                    macro_f1=macro_f1(
                        [p.truth for p in records], [p.label for p in records], scoring
                    ),
                    predictions=records,
                )
            )
        reports[shot] = _aggregate(runs, scoring)
    return reports


def run_spectral_eval(
    table: Table,
    split: Split,
    handle: TokenizerHandle,
    cfg: LlmConfig,
    knn_k: int = 10,
    horizon: int = 50,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
    concurrency: int = 4,
    backoff: float = 1.0,
) -> EvalReport:
    """Benchmark the spectral selection: d fixed per split, reps redrawn per repeat."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    estimate = estimate_clusters(
        table, split.train, handle, knn_k=knn_k, horizon=horizon, seed=seed
    )
    prompt_categories = categories_in_order(table, split.train)
    scoring = _scoring_categories(table, split)

    runs = []
    for repeat in range(repeats):
        rep_seed = substream_seed(seed, "spectral-repeat", repeat)
        demo_rows = select_representatives(estimate, rep_seed)
        demos = [render_demo(table, r) for r in demo_rows]
        records = _classify_test_rows(
            table, split, prompt_categories, demos, cfg, concurrency, backoff
        )
        runs.append(
            RunRecord(
                repeat=repeat,
                seed=rep_seed,
                n_demos=estimate.d,
                demo_rows=demo_rows,
                macro_f1=macro_f1([p.truth for p in records], [p.label for p in records], scoring),
                predictions=records,
            )
        )
    return _aggregate(runs, scoring, d=estimate.d)
