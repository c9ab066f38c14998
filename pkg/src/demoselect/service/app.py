"""FastAPI application wrapping the core package.

The service is stateless apart from a tokenizer cache: loading a model
tokenizer file is the one expensive setup step, so handles are cached per
(spec, keep_special) and shared across requests. Endpoints are sync defs;
FastAPI runs them on its threadpool, which suits the blocking numerics
and outbound LLM calls.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..dataset import parse_csv, shuffle_split
from ..errors import DemoselectError, LlmError
from ..evaluate import EvalReport, run_random_baseline, run_spectral_eval
from ..llmclient import LlmConfig
from ..pipeline import estimate_clusters, select_representatives
from ..template import render_demo
from ..tokens import TokenizerHandle, load_tokenizer
from . import schemas


def _llm_config(settings: schemas.LlmSettings) -> LlmConfig:
    return LlmConfig(
        base_url=settings.base_url,
        model=settings.model,
        temperature=settings.temperature,
        max_tokens=settings.max_tokens,
        timeout=settings.timeout,
        api_key=settings.api_key,
    )


def _eval_out(report: EvalReport) -> schemas.EvalOut:
    return schemas.EvalOut(
        d=report.d,
        macro_f1_mean=report.macro_f1_mean,
        macro_f1_std=report.macro_f1_std,
        per_class_f1=report.per_class_f1,
        n_unparsed=report.n_unparsed,
        runs=[
            schemas.RunOut(
                repeat=r.repeat,
                seed=r.seed,
                n_demos=r.n_demos,
                demo_rows=list(r.demo_rows),
                macro_f1=r.macro_f1,
                predictions=[schemas.PredictionOut(**p.as_dict()) for p in r.predictions],
            )
            for r in report.runs
        ],
    )


def create_app() -> FastAPI:
    app = FastAPI(title="demoselect", version=__version__)
    tokenizer_cache: dict[tuple[str, bool], TokenizerHandle] = {}
    cache_lock = threading.Lock()

    def get_tokenizer(spec: str, keep_special: bool) -> TokenizerHandle:
        key = (spec, keep_special)
        with cache_lock:
            if key not in tokenizer_cache:
                tokenizer_cache[key] = load_tokenizer(spec, keep_special=keep_special)
            return tokenizer_cache[key]

    def prepare(req: schemas.DataOptions):
        """Parse the CSV, split it, and pick the candidate rows."""
        table = parse_csv(req.csv_text, label=req.label)
        split = shuffle_split(table, req.seed, train_frac=req.train_frac)
        rows = tuple(range(table.n_rows)) if req.use_all_rows else split.train
        handle = get_tokenizer(req.tokenizer, req.keep_special)
        return table, split, rows, handle

    def run_estimate(req: schemas.DataOptions):
        table, split, rows, handle = prepare(req)
        est = estimate_clusters(
            table,
            rows,
            handle,
            knn_k=req.knn_k,
            horizon=req.horizon,
            seed=req.seed,
            symmetrization=req.symmetrization,
        )
        return table, split, est

    @app.exception_handler(DemoselectError)
    def domain_error(request: Request, exc: DemoselectError):
        status = 502 if isinstance(exc, LlmError) else 400
        return JSONResponse(
            status_code=status,
            content={"detail": {"error": type(exc).__name__, "message": str(exc)}},
        )

    @app.exception_handler(ValueError)
    def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"error": "ValueError", "message": str(exc)}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(req: schemas.EstimateRequest):
        table, split, est = run_estimate(req)
        chosen = select_representatives(est, req.seed)
        sizes = [len(est.cluster_members(c)) for c in range(est.d)]
        graph = None
        if req.include_graph:
            import numpy as np

            src, dst = np.nonzero(np.triu(est.knn.adjacency, k=1))
            graph = schemas.GraphDump(
                edges=list(zip(src.tolist(), dst.tolist())),
                dense=est.dense.w.tolist(),
            )
        m = est.spectrum.inspected
        return schemas.EstimateResponse(
            d=est.d,
            chosen_row_indices=list(chosen),
            eigenvalues=[float(v) for v in est.spectrum.eigenvalues[:m]],
            cluster_sizes=sizes,
            candidate_rows=list(est.rows),
            graph=graph,
        )

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(req: schemas.DataOptions):
        table, split, est = run_estimate(req)
        chosen = select_representatives(est, req.seed)
        demos = [render_demo(table, r) for r in chosen]
        return schemas.SelectResponse(
            d=est.d,
            demos=[
                schemas.DemoOut(row_index=d.row_index, label=d.label, text=d.text)
                for d in demos
            ],
        )

    @app.post("/eigens", response_model=schemas.EigensResponse)
    def eigens(req: schemas.DataOptions):
        table, split, est = run_estimate(req)
        m = est.spectrum.inspected
        return schemas.EigensResponse(
            eigenvalues=[float(v) for v in est.spectrum.eigenvalues[:m]]
        )

    def reject_all_rows(req: schemas.DataOptions):
        if req.use_all_rows:
            raise ValueError(
                "use_all_rows applies to estimation endpoints only; "
                "evaluation needs a held-out test split"
            )

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify(req: schemas.ClassifyRequest):
        reject_all_rows(req)
        table, split, rows, handle = prepare(req)
        report = run_spectral_eval(
            table,
            split,
            handle,
            _llm_config(req.llm),
            knn_k=req.knn_k,
            horizon=req.horizon,
            repeats=1,
            seed=req.seed,
            concurrency=req.concurrency,
            backoff=req.retry_backoff,
        )
        run = report.runs[0]
        return schemas.ClassifyResponse(
            d=report.d,
            chosen_row_indices=list(run.demo_rows),
            macro_f1=run.macro_f1,
            predictions=[schemas.PredictionOut(**p.as_dict()) for p in run.predictions],
        )

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest):
        reject_all_rows(req)
        table, split, rows, handle = prepare(req)
        cfg = _llm_config(req.llm)
        reports: list[schemas.BenchReportOut] = []
        if req.mode in ("random", "both"):
            by_shot = run_random_baseline(
                table,
                split,
                cfg,
                shots=req.shots,
                repeats=req.repeats,
                seed=req.seed,
                concurrency=req.concurrency,
                backoff=req.retry_backoff,
            )
            reports.append(
                schemas.BenchReportOut(
                    mode="random",
                    per_shot={str(shot): _eval_out(rep) for shot, rep in by_shot.items()},
                )
            )
        if req.mode in ("spectral", "both"):
            rep = run_spectral_eval(
                table,
                split,
                handle,
                cfg,
                knn_k=req.knn_k,
                horizon=req.horizon,
                repeats=req.repeats,
                seed=req.seed,
                concurrency=req.concurrency,
                backoff=req.retry_backoff,
            )
            reports.append(schemas.BenchReportOut(mode="spectral", result=_eval_out(rep)))
        return schemas.BenchResponse(model=req.llm.model, seed=req.seed, reports=reports)

    return app


app = create_app()
