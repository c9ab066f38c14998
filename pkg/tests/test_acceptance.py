"""Acceptance suite: eight criteria, one test and one printed line each.

Run `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL line per
criterion. Criterion 5 needs the real model tokenizer files (see
tests/fixtures/tokenizers/README.md) and skips when they are absent; the
optional live smoke in criterion 8 needs DEMOSELECT_LIVE_URL/MODEL.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from demoselect.cli import main
from demoselect.dataset import load_csv, shuffle_split
from demoselect.errors import GraphError
from demoselect.evaluate import macro_f1
from demoselect.llmclient import UNPARSED, LlmConfig, classify_prompts
from demoselect.mockllm import MockLlmServer, nearest_demo_responder
from demoselect.pipeline import estimate_clusters
from demoselect.simgraph import DenseSimilarity, build_dense, sparsify_knn
from demoselect.spectral import (
    SpectrumResult,
    eigen_ascending,
    normalized_laplacian,
    spectral_embed_cluster,
    spectral_gap,
)
from demoselect.template import PromptSpec, build_prompt, render_demo, render_query
from demoselect.tokens import TokenSet, encode, load_tokenizer

from .conftest import FIXTURES, golden, planted_strings
from .test_evaluate import brute_force_macro_f1
from .test_spectral import component_count

TOKENIZER_DIR = Path(os.environ.get("DEMOSELECT_TOKENIZER_DIR", FIXTURES / "tokenizers"))

TABLE1_MODELS = {
    "llama-3.2-3b": "llama-3.2-3b.json",
    "mistral-7b-v0.3": "mistral-7b-v0.3.json",
    "qwen3-8b": "qwen3-8b.json",
}
TABLE1_EXPECTED = {"iris": 3, "penguins": 5}


def report(num: int, name: str, ok: bool | None, detail: str = ""):
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    print(f"[criterion {num}] {name}: {status}" + (f" ({detail})" if detail else ""))


def random_tokensets(rng, count, max_id=500):
    sets = []
    for _ in range(count):
        size = int(rng.integers(3, 41))
        ids = rng.choice(max_id, size=size, replace=False)
        sets.append(TokenSet(ids=tuple(sorted(ids.tolist())), raw_len=size))
    return sets


class TestCriterion1DenseSimilarityOracle:
    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(1001)
        start = time.perf_counter()
        sets = random_tokensets(rng, 200)
        dense = build_dense(sets)

        n = len(sets)
        expected = np.zeros((n, n))
        py_sets = [set(ts.ids) for ts in sets]
        for i in range(n):
            for j in range(n):
                if i != j:
                    inter = len(py_sets[i] & py_sets[j])
                    expected[i, j] = inter / len(py_sets[i] | py_sets[j])
        elapsed = time.perf_counter() - start

        exact = np.array_equal(dense.w, expected)
        symmetric = np.array_equal(dense.w, dense.w.T)
        zero_diag = bool(np.all(np.diag(dense.w) == 0.0))
        in_range = bool(np.all((dense.w >= 0.0) & (dense.w <= 1.0)))
        ok = exact and symmetric and zero_diag and in_range and elapsed < 1.0
        report(1, "dense similarity matches set oracle", ok, f"{elapsed:.2f}s")
        assert exact and symmetric and zero_diag and in_range
        assert elapsed < 1.0


class TestCriterion2LaplacianSpectrumBounds:
    def test_bounds_and_component_multiplicity(self):
        rng = np.random.default_rng(2002)
        start = time.perf_counter()
        tol = 1e-8
        for trial in range(100):
            n = int(rng.integers(4, 65))
            if trial % 2 == 0:
                w = np.triu(rng.uniform(size=(n, n)), 1)
            else:
                # block structure so multiplicity > 1 is exercised
                n_cuts = min(int(rng.integers(0, 4)), max(0, n - 3))
                cut_pool = np.arange(2, n - 1)
                cuts = np.sort(rng.choice(cut_pool, size=n_cuts, replace=False))
                bounds = [0, *cuts.tolist(), n]
                w = np.zeros((n, n))
                for lo, hi in zip(bounds, bounds[1:]):
                    if hi - lo < 2:
                        continue
                    block = np.triu(rng.uniform(0.05, 1.0, size=(hi - lo, hi - lo)), 1)
                    w[lo:hi, lo:hi] = block
            w = w + w.T
            k = int(rng.integers(1, n))
            graph = sparsify_knn(DenseSimilarity(n=n, w=w), k)
            lap = normalized_laplacian(graph)
            values, _ = eigen_ascending(lap, n)

            assert values[0] <= tol, f"trial {trial}: lambda_0 = {values[0]}"
            assert np.all(values >= -tol) and np.all(values <= 2.0 + tol), f"trial {trial}"
            n_zero = int(np.sum(values < tol))
            assert n_zero == component_count(graph.adjacency), f"trial {trial}"
        elapsed = time.perf_counter() - start
        report(2, "Laplacian spectrum bounds + component multiplicity", elapsed < 10.0,
               f"100 graphs, {elapsed:.2f}s")
        assert elapsed < 10.0


class TestCriterion3EigensolverOracle:
    def test_dense_vs_iterative(self):
        rng = np.random.default_rng(3003)
        start = time.perf_counter()
        worst = 0.0
        for n in (8, 32, 128):
            count = min(n - 2, 51)
            for _ in range(3):
                m = rng.standard_normal((n, n))
                m = (m + m.T) / 2
                dense_vals, _ = eigen_ascending(m, count, method="dense")
                iter_vals, _ = eigen_ascending(m, count, method="iterative")
                worst = max(worst, float(np.max(np.abs(dense_vals - iter_vals))))
        elapsed = time.perf_counter() - start
        ok = worst < 1e-6 and elapsed < 30.0
        report(3, "dense and iterative eigensolvers agree", ok,
               f"max |diff| = {worst:.2e}, {elapsed:.2f}s")
        assert worst < 1e-6
        assert elapsed < 30.0


class TestCriterion4EigengapRecovery:
    def test_planted_partition_ensembles(self):
        rng = np.random.default_rng(4004)
        handle = load_tokenizer("byte-level")
        start = time.perf_counter()
        successes = 0
        per_c = {2: [0, 0], 3: [0, 0], 4: [0, 0]}
        for trial in range(100):
            c = (2, 3, 4)[trial % 3]
            texts, groups = planted_strings(c, per_group=20, rng=rng)
            sets = [encode(handle, t, source=i) for i, t in enumerate(texts)]
            graph = sparsify_knn(build_dense(sets), 5)
            lap = normalized_laplacian(graph)
            values, vectors = eigen_ascending(lap, min(len(sets), 51))
            m = min(len(sets), 50)
            d, gap_index = spectral_gap(values, m)
            per_c[c][1] += 1
            if d != c:
                continue
            spectrum = SpectrumResult(values, vectors, d, gap_index, m)
            clustering = spectral_embed_cluster(spectrum, seed=trial)
            mapping: dict[int, int] = {}
            exact = True
            for lab, grp in zip(clustering.assignments.tolist(), groups):
                if mapping.setdefault(grp, lab) != lab:
                    exact = False
                    break
            if exact and len(set(mapping.values())) == c:
                successes += 1
                per_c[c][0] += 1
        elapsed = time.perf_counter() - start
        detail = ", ".join(f"c={c}: {hit}/{tot}" for c, (hit, tot) in per_c.items())
        ok = successes >= 95 and elapsed < 60.0
        report(4, "eigengap + exact partition recovery", ok,
               f"{successes}/100 ({detail}), {elapsed:.2f}s")
        assert successes >= 95, f"only {successes}/100 instances recovered exactly"
        assert elapsed < 60.0


def _tokenizer_file(model: str) -> Path:
    return TOKENIZER_DIR / TABLE1_MODELS[model]


def _dataset_file(name: str) -> Path:
    return FIXTURES / "data" / f"{name}.csv"


class TestCriterion5Table1Reproduction:
    @pytest.mark.parametrize("model", sorted(TABLE1_MODELS))
    @pytest.mark.parametrize("dataset", sorted(TABLE1_EXPECTED))
    def test_estimated_d(self, model, dataset):
        tok_path = _tokenizer_file(model)
        if not tok_path.exists():
            report(5, f"d({dataset}, {model})", None,
                   f"tokenizer file {tok_path} not present")
            pytest.skip(
                f"tokenizer file for {model} not found at {tok_path}; place the "
                "model release's tokenizer JSON there or set DEMOSELECT_TOKENIZER_DIR"
            )
        data_path = _dataset_file(dataset)
        if not data_path.exists():
            report(5, f"d({dataset}, {model})", None,
                   f"dataset fixture {data_path} not present")
            pytest.skip(f"dataset fixture {data_path} missing; see scripts/fetch_assets.py")

        expected = TABLE1_EXPECTED[dataset]
        handle = load_tokenizer(str(tok_path))
        table = load_csv(data_path)
        split = shuffle_split(table, seed=0)
        start = time.perf_counter()
        est = estimate_clusters(table, split.train, handle, knn_k=10, horizon=50, seed=0)
        elapsed = time.perf_counter() - start
        ok = abs(est.d - expected) <= 1
        if ok:
            report(5, f"d({dataset}, {model})", True,
                   f"d = {est.d}, expected {expected} +/- 1, {elapsed:.1f}s")
            assert elapsed < 120.0
            return
        # out of tolerance: try the mutual-AND graph before failing, and
        # surface both readings in the failure message
        try:
            alt = estimate_clusters(
                table, split.train, handle, knn_k=10, horizon=50, seed=0,
                symmetrization="mutual",
            )
            alt_d = str(alt.d)
        except GraphError as exc:
            alt_d = f"infeasible ({exc})"
        report(5, f"d({dataset}, {model})", False,
               f"union d = {est.d}, mutual d = {alt_d}, expected {expected} +/- 1")
        pytest.fail(
            f"{dataset}/{model}: estimated d = {est.d} (union), {alt_d} (mutual); "
            f"expected {expected} +/- 1"
        )


class TestCriterion6MacroF1Oracle:
    def test_thousand_random_cases(self):
        rng = np.random.default_rng(6006)
        start = time.perf_counter()
        for case in range(1000):
            n_cats = int(rng.integers(1, 7))
            categories = [f"class-{i}" for i in range(n_cats)]
            length = int(rng.integers(1, 30))
            # bias truths toward a subset so some classes are absent
            active = max(1, int(rng.integers(1, n_cats + 1)))
            truth = [categories[i] for i in rng.integers(0, active, size=length)]
            pool = categories + [UNPARSED]
            pred = [pool[i] for i in rng.integers(0, len(pool), size=length)]
            ours = macro_f1(truth, pred, categories)
            oracle = brute_force_macro_f1(truth, pred, categories)
            assert ours == oracle, f"case {case}: {ours} != {oracle}"
        elapsed = time.perf_counter() - start
        report(6, "macro-F1 matches confusion-matrix oracle", elapsed < 5.0,
               f"1000 cases exact, {elapsed:.2f}s")
        assert elapsed < 5.0


def _bench_dataset_csv(rng) -> str:
    from .test_evaluate import planted_eval_csv

    return planted_eval_csv(3, 14, rng)  # 42 rows: 34 train / 8 test


class TestCriterion7BenchDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        csv_text = _bench_dataset_csv(np.random.default_rng(7007))
        data = tmp_path / "bench42.csv"
        data.write_text(csv_text, encoding="utf-8")
        start = time.perf_counter()
        outputs = []
        for run in ("one", "two"):
            out = tmp_path / run / "report.json"
            out.parent.mkdir()
            with MockLlmServer(nearest_demo_responder()) as srv:
                code = main([
                    "bench", "--data", str(data), "--label", "1",
                    "--tokenizer", "byte-level", "--knn", "5", "--horizon", "20",
                    "--llm-url", srv.base_url, "--model", "scripted-mock",
                    "--seed", "11", "--retry-backoff", "0",
                    "--out", str(out),
                ])
            assert code == 0
            outputs.append(out)
        elapsed = time.perf_counter() - start

        identical = outputs[0].read_bytes() == outputs[1].read_bytes()
        preds_identical = (
            (outputs[0].parent / "report.predictions.json").read_bytes()
            == (outputs[1].parent / "report.predictions.json").read_bytes()
        )
        body = json.loads(outputs[0].read_text())
        has_both = [r["mode"] for r in body["reports"]] == ["random", "spectral"]
        ok = identical and preds_identical and has_both and elapsed < 30.0
        report(7, "bench (random + spectral) byte-identical reruns", ok, f"{elapsed:.1f}s")
        assert identical and preds_identical and has_both
        assert elapsed < 30.0


class TestCriterion8SubstitutePolicy:
    def test_prompt_golden_files(self, iris_table):
        spec = PromptSpec(
            categories=["Iris-setosa", "Iris-versicolor", "Iris-virginica"],
            demos=[render_demo(iris_table, 0), render_demo(iris_table, 112)],
            query_text=render_query(iris_table, 50),
        )
        few_shot_ok = build_prompt(spec) == golden("three_categories_two_demos.txt")
        spec.demos = []
        zero_shot_ok = build_prompt(spec) == golden("zero_shot.txt")
        ok = few_shot_ok and zero_shot_ok
        report(8, "headline-score substitute: golden prompts + paired protocol", ok,
               "score reproduction out of scope; live smoke optional")
        assert ok

    @pytest.mark.skipif(
        not os.environ.get("DEMOSELECT_LIVE_URL"),
        reason="live smoke needs DEMOSELECT_LIVE_URL and DEMOSELECT_LIVE_MODEL",
    )
    def test_live_endpoint_smoke(self, iris_table):
        cfg = LlmConfig(
            base_url=os.environ["DEMOSELECT_LIVE_URL"],
            model=os.environ.get("DEMOSELECT_LIVE_MODEL", "gpt-4o-mini"),
        )
        split = shuffle_split(iris_table, seed=0)
        categories = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
        demos = [render_demo(iris_table, r) for r in split.train[:3]]
        prompts = [
            build_prompt(PromptSpec(categories=list(categories), demos=list(demos),
                                    query_text=render_query(iris_table, row)))
            for row in split.test[:10]
        ]
        predictions = classify_prompts(cfg, prompts, categories, concurrency=2)
        parsed = sum(1 for p in predictions if p.label != UNPARSED)
        ok = parsed >= 8
        report(8, "live endpoint smoke", ok, f"{parsed}/10 parsed")
        assert ok, f"only {parsed}/10 responses parsed to a category"
