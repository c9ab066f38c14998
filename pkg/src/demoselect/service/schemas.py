"""Pydantic request/response models for the demoselect service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class DataOptions(BaseModel):
    """Dataset + estimation knobs shared by several endpoints.

    csv_text carries the raw file content so the service never reads the
    client's filesystem; the tokenizer is a builtin name or a path that
    must be visible to the service process.
    """

    csv_text: str
    label: Optional[Union[int, str]] = None  # default: last column
    tokenizer: str = "whitespace-hash"
    keep_special: bool = False
    knn_k: int = Field(default=10, ge=1)
    horizon: int = Field(default=50, ge=2)
    seed: int = Field(default=0, ge=0)
    train_frac: float = Field(default=0.8, gt=0.0, lt=1.0)
    use_all_rows: bool = False
    symmetrization: Literal["union", "mutual"] = "union"


class LlmSettings(BaseModel):
    base_url: str
    model: str
    temperature: float = Field(default=0.1, ge=0.0)
    max_tokens: int = Field(default=16, ge=1)
    timeout: float = Field(default=30.0, gt=0.0)
    api_key: Optional[str] = None  # falls back to DEMOSELECT_API_KEY on the service


class EstimateRequest(DataOptions):
    include_graph: bool = False


class GraphDump(BaseModel):
    edges: list[tuple[int, int]]
    dense: list[list[float]]


class EstimateResponse(BaseModel):
    d: int
    chosen_row_indices: list[int]
    eigenvalues: list[float]
    cluster_sizes: list[int]
    candidate_rows: list[int]
    graph: Optional[GraphDump] = None


class DemoOut(BaseModel):
    row_index: int
    label: str
    text: str


class SelectResponse(BaseModel):
    d: int
    demos: list[DemoOut]


class EigensResponse(BaseModel):
    eigenvalues: list[float]


class ClassifyRequest(DataOptions):
    llm: LlmSettings
    concurrency: int = Field(default=4, ge=1)
    retry_backoff: float = Field(default=1.0, ge=0.0)


class PredictionOut(BaseModel):
    row_index: int
    truth: str
    raw: str
    label: str


class ClassifyResponse(BaseModel):
    d: int
    chosen_row_indices: list[int]
    macro_f1: float
    predictions: list[PredictionOut]


class BenchRequest(DataOptions):
    llm: LlmSettings
    mode: Literal["random", "spectral", "both"] = "both"
    shots: list[int] = Field(default=[0, 2, 4, 6, 8, 10])
    repeats: int = Field(default=5, ge=1)
    concurrency: int = Field(default=4, ge=1)
    retry_backoff: float = Field(default=1.0, ge=0.0)


class RunOut(BaseModel):
    repeat: int
    seed: int
    n_demos: int
    demo_rows: list[int]
    macro_f1: float
    predictions: list[PredictionOut]


class EvalOut(BaseModel):
    d: Optional[int] = None
    macro_f1_mean: float
    macro_f1_std: float
    per_class_f1: dict[str, float]
    n_unparsed: int
    runs: list[RunOut]


class BenchReportOut(BaseModel):
    mode: Literal["random", "spectral"]
    per_shot: Optional[dict[str, EvalOut]] = None  # random mode
    result: Optional[EvalOut] = None  # spectral mode


class BenchResponse(BaseModel):
    model: str
    seed: int
    reports: list[BenchReportOut]


class HealthResponse(BaseModel):
    status: str
    version: str
