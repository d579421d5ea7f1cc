"""hyperrag: a label-cube retrieval engine.

Documents are indexed into per-dimension inverted indexes over
fine-grained, normalized labels (location, date, event, organization,
person, theme, plus user extensions). Queries are decomposed into
dimension-tagged components, matched exact-first with a thresholded
semantic fallback, and documents are ranked by how many components they
cover. Retrieval cost tracks the label vocabulary and the matched
posting lists, not the corpus size, and every result carries
per-component evidence explaining why it was returned.
"""

from .bm25 import Bm25Index, bm25_build, bm25_retrieve, bm25_score
from .corpus import Corpus, Document, QueryRecord, load_corpus, load_queries
from .embedding import (
    DEFAULT_EMBED_DIM,
    DEFAULT_TAU,
    Encoder,
    LabelVectors,
    PrecomputedVectorEncoder,
    TrigramEncoder,
    build_label_vectors,
    cosine,
    load_precomputed_vectors,
    semantic_neighbors,
)
from .errors import (
    ChecksumMismatch,
    DimMismatch,
    DuplicateId,
    EmptyText,
    FormatVersionMismatch,
    HyperRagError,
    IoFailure,
    MalformedRecord,
    MissingField,
    MissingGold,
    MissingKey,
    NonPositiveCount,
    UnencodableText,
    UnknownDimension,
    UnknownDocId,
)
from .evaluation import (
    BenchRow,
    EvalReport,
    bench_latency,
    eval_recall,
    inject_noise,
    write_bench_csv,
)
from .hypercube import (
    CellAddress,
    HypercubeIndex,
    Posting,
    build_index,
    cell_documents,
    load_index,
    lookup,
    save_index,
    verify_symmetry,
)
from .labeling import (
    CANONICAL_DIMENSIONS,
    DocLabels,
    Gazetteer,
    Label,
    extract_all,
    gazetteer_extract,
    load_gazetteer,
    load_precomputed_labels,
    normalize_label,
    tokenize,
    write_labels,
)
from .retrieval import (
    DEFAULT_K,
    EXACT,
    SEMANTIC,
    UNMATCHED,
    ExternalDecompositions,
    MatchEvidence,
    QueryComponent,
    QueryDecomposition,
    RetrievalResult,
    ScoredDoc,
    decompose_query,
    format_result,
    match_component,
    rank,
    result_to_dict,
    retrieve,
    score_documents,
)

__version__ = "0.1.0"

__all__ = [
    "Bm25Index",
    "bm25_build",
    "bm25_retrieve",
    "bm25_score",
    "Corpus",
    "Document",
    "QueryRecord",
    "load_corpus",
    "load_queries",
    "DEFAULT_EMBED_DIM",
    "DEFAULT_TAU",
    "DEFAULT_K",
    "Encoder",
    "LabelVectors",
    "PrecomputedVectorEncoder",
    "TrigramEncoder",
    "build_label_vectors",
    "cosine",
    "load_precomputed_vectors",
    "semantic_neighbors",
    "HyperRagError",
    "IoFailure",
    "MalformedRecord",
    "MissingField",
    "DuplicateId",
    "EmptyText",
    "UnknownDocId",
    "UnknownDimension",
    "NonPositiveCount",
    "FormatVersionMismatch",
    "ChecksumMismatch",
    "UnencodableText",
    "DimMismatch",
    "MissingKey",
    "MissingGold",
    "BenchRow",
    "EvalReport",
    "bench_latency",
    "eval_recall",
    "inject_noise",
    "write_bench_csv",
    "CellAddress",
    "HypercubeIndex",
    "Posting",
    "build_index",
    "cell_documents",
    "load_index",
    "lookup",
    "save_index",
    "verify_symmetry",
    "CANONICAL_DIMENSIONS",
    "DocLabels",
    "Gazetteer",
    "Label",
    "extract_all",
    "gazetteer_extract",
    "load_gazetteer",
    "load_precomputed_labels",
    "normalize_label",
    "tokenize",
    "write_labels",
    "EXACT",
    "SEMANTIC",
    "UNMATCHED",
    "ExternalDecompositions",
    "MatchEvidence",
    "QueryComponent",
    "QueryDecomposition",
    "RetrievalResult",
    "ScoredDoc",
    "decompose_query",
    "format_result",
    "match_component",
    "rank",
    "result_to_dict",
    "retrieve",
    "score_documents",
]
