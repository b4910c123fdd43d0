"""Persuasion tactic classification from constituency parse structure.

Arguments are reduced to lexicon-free parse strings (bracketed structure
with the words removed and unary chains collapsed), one prototype parse
string is chosen or synthesized per tactic, and new arguments are
assigned the tactic of the nearest prototype under length-normalized
token edit distance.  An optional similarity threshold rejects inputs
that resemble no prototype at all.
"""

from .classifier import (
    Classification,
    DEFAULT_REJECTION_THRESHOLD,
    InvalidThresholdError,
    classify,
    classify_batch,
    classify_with_rejection,
)
from .editdist import (
    EditCosts,
    UNIT_COSTS,
    distance_matrix,
    edit_distance,
    normalized_distance,
    normalized_matrix,
    pair_distances,
    similarity,
)
from .evaluation import (
    ClassMetrics,
    ConfusionTally,
    EmptyEvaluationError,
    InvalidSampleSizeError,
    LabeledArgument,
    MetricsReport,
    SensitivityRow,
    SweepCell,
    ThresholdRow,
    build_tally,
    evaluate,
    format_report,
    parameter_sweep,
    per_category_accuracy,
    report_to_dict,
    sensitivity_run,
    tactic_distribution,
    tactic_metrics,
    threshold_sweep,
)
from .prototype import (
    DEFAULT_SEGMENT_COUNT,
    DEFAULT_SET_FRACTION,
    EmptyCategoryError,
    InvalidSegmentCountError,
    MEDIAN,
    MissingTacticError,
    NON_ARGUMENT_NAME,
    PrototypeSet,
    SYNTHETIC,
    TacticId,
    UnknownTacticError,
    build_prototypes,
    derive_seed,
    sample_category,
    segment,
    set_median,
    synthesize_prototype,
    tactic_from_name,
)
from .treebank import (
    CLOSE,
    EmptyInputError,
    MalformedTreeError,
    NotStrippedError,
    ParseString,
    RawTree,
    UnbalancedError,
    argument_parse_string,
    collapse_unary_chains,
    is_balanced,
    linearize,
    open_token,
    parse_bracketed,
    render,
    strip_terminals,
    text_to_tokens,
    to_parse_string,
    tokens_to_text,
    tree_to_text,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ClassMetrics",
    "ConfusionTally",
    "EditCosts",
    "LabeledArgument",
    "MetricsReport",
    "ParseString",
    "PrototypeSet",
    "RawTree",
    "SensitivityRow",
    "SweepCell",
    "TacticId",
    "ThresholdRow",
    "argument_parse_string",
    "build_prototypes",
    "build_tally",
    "classify",
    "classify_batch",
    "classify_with_rejection",
    "collapse_unary_chains",
    "derive_seed",
    "distance_matrix",
    "edit_distance",
    "evaluate",
    "format_report",
    "is_balanced",
    "linearize",
    "normalized_distance",
    "normalized_matrix",
    "pair_distances",
    "parameter_sweep",
    "parse_bracketed",
    "per_category_accuracy",
    "render",
    "report_to_dict",
    "sample_category",
    "segment",
    "sensitivity_run",
    "set_median",
    "similarity",
    "strip_terminals",
    "synthesize_prototype",
    "tactic_distribution",
    "tactic_from_name",
    "tactic_metrics",
    "text_to_tokens",
    "threshold_sweep",
    "to_parse_string",
    "tokens_to_text",
    "tree_to_text",
]
