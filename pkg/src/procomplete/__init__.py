"""Semantic autocompletion for business-process models.

Parse BPMN workflows into graphs, cut them into fixed-length slices,
embed the slices as text, and recommend likely next elements for a
partially modelled workflow by similarity search over a corpus index.
"""

from .embedding import (
    DimensionMismatchError,
    EmbedderDescriptor,
    EmbeddingError,
    HashEmbedder,
    ProviderUnavailableError,
    RemoteEmbedder,
    cosine,
    provider_from_spec,
    similarity_matrix,
)
from .evaluation import (
    EvalConfig,
    EvalReport,
    EvaluationError,
    EmptyPoolError,
    InsufficientCorpusError,
    ReportRow,
    element_pool,
    emit_report,
    evaluate_corpus,
    generate_query_states,
    leave_one_out_cv,
    random_baseline,
    slice_length_study,
    study_to_csv,
)
from .loadtest import (
    LoadTestError,
    LoadTestResult,
    TargetUnreachableError,
    Workload,
    branching_workflow,
    default_workloads,
    linear_workflow,
    load_test,
    percentile_nearest_rank,
    workload_corpus,
)
from .metrics import (
    GroundTruth,
    MetricSample,
    bleu,
    cosine_score,
    meteor_lite,
    precision_at_k,
    recall_at_k,
    score_sample,
    stem,
)
from .model import (
    END_EVENT,
    EXCLUSIVE_GATEWAY,
    INCLUSIVE_GATEWAY,
    INTERMEDIATE_EVENT,
    PARALLEL_GATEWAY,
    START_EVENT,
    TASK,
    DanglingFlowError,
    ElementKind,
    ElementType,
    Flow,
    MalformedXmlError,
    ModelError,
    Node,
    NoProcessFoundError,
    ProcessGraph,
    UnknownNodeError,
    contract_gateways,
    load_corpus,
    parse_bpmn,
    to_bpmn_xml,
)
from .recommender import (
    ChecksumMismatchError,
    EmbedderMismatchError,
    EmptyIndexError,
    Explanation,
    FormatVersionMismatchError,
    IndexIoError,
    IndexMeta,
    MODE_TASKS_ONLY,
    MODE_WITH_GATEWAYS,
    MODES,
    ModeMismatchError,
    NoSliceEndsAtTargetError,
    Recommendation,
    RecommendationQuery,
    RecommenderError,
    SliceIndex,
    SliceRecord,
    build_index,
    load_index,
    recommend,
    save_index,
)
from .slicing import (
    NextElement,
    Slice,
    SliceWithNext,
    element_sentence,
    enumerate_slices,
    extract_slices_ending_at,
    next_elements_of,
    textualize,
)

__version__ = "0.1.0"

__all__ = [
    "ChecksumMismatchError",
    "DanglingFlowError",
    "DimensionMismatchError",
    "ElementKind",
    "ElementType",
    "EmbedderDescriptor",
    "EmbedderMismatchError",
    "EmbeddingError",
    "EmptyIndexError",
    "EmptyPoolError",
    "EvalConfig",
    "EvalReport",
    "EvaluationError",
    "Explanation",
    "Flow",
    "FormatVersionMismatchError",
    "GroundTruth",
    "HashEmbedder",
    "IndexIoError",
    "IndexMeta",
    "InsufficientCorpusError",
    "LoadTestError",
    "LoadTestResult",
    "MODES",
    "MODE_TASKS_ONLY",
    "MODE_WITH_GATEWAYS",
    "MalformedXmlError",
    "MetricSample",
    "ModeMismatchError",
    "ModelError",
    "NextElement",
    "NoProcessFoundError",
    "NoSliceEndsAtTargetError",
    "Node",
    "ProcessGraph",
    "ProviderUnavailableError",
    "Recommendation",
    "RecommendationQuery",
    "RecommenderError",
    "RemoteEmbedder",
    "ReportRow",
    "Slice",
    "SliceIndex",
    "SliceRecord",
    "SliceWithNext",
    "TargetUnreachableError",
    "UnknownNodeError",
    "Workload",
    "bleu",
    "branching_workflow",
    "build_index",
    "contract_gateways",
    "cosine",
    "cosine_score",
    "default_workloads",
    "element_pool",
    "element_sentence",
    "emit_report",
    "enumerate_slices",
    "evaluate_corpus",
    "extract_slices_ending_at",
    "generate_query_states",
    "leave_one_out_cv",
    "linear_workflow",
    "load_corpus",
    "load_index",
    "load_test",
    "meteor_lite",
    "next_elements_of",
    "parse_bpmn",
    "percentile_nearest_rank",
    "precision_at_k",
    "provider_from_spec",
    "random_baseline",
    "recall_at_k",
    "recommend",
    "save_index",
    "score_sample",
    "similarity_matrix",
    "slice_length_study",
    "stem",
    "study_to_csv",
    "textualize",
    "to_bpmn_xml",
    "workload_corpus",
    # constants
    "START_EVENT",
    "END_EVENT",
    "INTERMEDIATE_EVENT",
    "TASK",
    "EXCLUSIVE_GATEWAY",
    "PARALLEL_GATEWAY",
    "INCLUSIVE_GATEWAY",
]
