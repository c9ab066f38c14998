"""demoselect: spectral-gap estimation of how many in-context demonstrations
a tabular classification prompt needs, plus selection, inference, and
benchmarking against random shot counts."""

__version__ = "0.1.0"

from .dataset import Row, Split, Table, load_csv, parse_csv, shuffle_split
from .errors import (
    CsvError,
    DemoselectError,
    EigenError,
    EncodeError,
    GraphError,
    LabelColumnError,
    LlmError,
    TokenizerError,
)
from .evaluate import EvalReport, macro_f1, run_random_baseline, run_spectral_eval
from .llmclient import UNPARSED, LlmConfig, Prediction, complete, parse_label
from .pipeline import SelectionResult, estimate_and_select, estimate_clusters, select_representatives
from .simgraph import DenseSimilarity, KnnGraph, build_dense, jaccard, sparsify_knn
from .spectral import (
    Clustering,
    SpectrumResult,
    eigen_ascending,
    normalized_laplacian,
    spectral_embed_cluster,
    spectral_gap,
)
from .template import Demonstration, PromptSpec, build_prompt, render_demo, render_query
from .tokens import TokenizerHandle, TokenSet, encode, load_tokenizer

__all__ = [
    "__version__",
    "Table", "Row", "Split", "load_csv", "parse_csv", "shuffle_split",
    "Demonstration", "PromptSpec", "render_demo", "render_query", "build_prompt",
    "TokenSet", "TokenizerHandle", "load_tokenizer", "encode",
    "DenseSimilarity", "KnnGraph", "jaccard", "build_dense", "sparsify_knn",
    "SpectrumResult", "Clustering", "normalized_laplacian", "eigen_ascending",
    "spectral_gap", "spectral_embed_cluster",
    "SelectionResult", "estimate_clusters", "select_representatives", "estimate_and_select",
    "LlmConfig", "Prediction", "UNPARSED", "complete", "parse_label",
    "EvalReport", "macro_f1", "run_random_baseline", "run_spectral_eval",
    "DemoselectError", "CsvError", "LabelColumnError", "TokenizerError", "EncodeError",
    "GraphError", "EigenError", "LlmError",
]
