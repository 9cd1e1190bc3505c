"""Multi-label CTC with a shared blank for speech-attribute recognition,
plus the mispronunciation detection and diagnosis scoring pipeline."""

from .alignment import Alignment, AlignOp, align
from .ctc import (
    CtcResult,
    brute_force_ctc,
    collapse,
    ctc_loss,
    ctc_loss_value,
    finite_difference_gradient,
    max_relative_error,
)
from .decoding import decode_all, greedy_decode_category, greedy_decode_phoneme
from .errors import (
    AlphabetMismatch,
    AttrMddError,
    BadConfig,
    BadDimension,
    DimensionMismatch,
    DivergedLoss,
    DuplicateAttribute,
    DuplicateSignature,
    EmptyCanonical,
    EmptyReference,
    InfeasibleTarget,
    LayoutMismatch,
    MissingPhoneme,
    NonFiniteLogit,
    TooLarge,
    UnknownAttribute,
    UnknownPhoneme,
)
from .estimator import AttributeRecognizer
from .inventory import (
    ATTRIBUTE_NAMES,
    PHONEMES,
    Attribute,
    AttributeTable,
    TokenSequence,
    attribute,
    builtin_table,
    load_attribute_table,
    load_attribute_table_path,
    phoneme_sequence,
    phonemes_to_attribute_sequence,
    signature_diff,
)
from .mdd import (
    AnnotatedUtterance,
    DiagnosisReport,
    MddCounts,
    MddRates,
    attribute_accuracy,
    attribute_error_rate,
    attribute_level_mdd,
    attribute_prf,
    classify_positions,
    compute_rates,
    diagnosis_report,
)
from .sctc import (
    CategoryLayout,
    MultiLabelTarget,
    SctcResult,
    grouped_softmax,
    make_layout,
    sctc_sb_loss,
    targets_from_phonemes,
    targets_from_sequences,
)
from .trainer import (
    LinearModel,
    SyntheticCorpus,
    TrainConfig,
    Utterance,
    evaluate,
    generate_corpus,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ATTRIBUTE_NAMES",
    "PHONEMES",
    "AlignOp",
    "Alignment",
    "AlphabetMismatch",
    "AnnotatedUtterance",
    "AttrMddError",
    "Attribute",
    "AttributeRecognizer",
    "AttributeTable",
    "BadConfig",
    "BadDimension",
    "CategoryLayout",
    "CtcResult",
    "DiagnosisReport",
    "DimensionMismatch",
    "DivergedLoss",
    "DuplicateAttribute",
    "DuplicateSignature",
    "EmptyCanonical",
    "EmptyReference",
    "InfeasibleTarget",
    "LayoutMismatch",
    "LinearModel",
    "MddCounts",
    "MddRates",
    "MissingPhoneme",
    "MultiLabelTarget",
    "NonFiniteLogit",
    "SctcResult",
    "SyntheticCorpus",
    "TokenSequence",
    "TooLarge",
    "TrainConfig",
    "UnknownAttribute",
    "UnknownPhoneme",
    "Utterance",
    "align",
    "attribute",
    "attribute_accuracy",
    "attribute_error_rate",
    "attribute_level_mdd",
    "attribute_prf",
    "brute_force_ctc",
    "builtin_table",
    "classify_positions",
    "collapse",
    "compute_rates",
    "ctc_loss",
    "ctc_loss_value",
    "decode_all",
    "diagnosis_report",
    "evaluate",
    "finite_difference_gradient",
    "generate_corpus",
    "greedy_decode_category",
    "greedy_decode_phoneme",
    "grouped_softmax",
    "load_attribute_table",
    "load_attribute_table_path",
    "make_layout",
    "max_relative_error",
    "phoneme_sequence",
    "phonemes_to_attribute_sequence",
    "sctc_sb_loss",
    "signature_diff",
    "targets_from_phonemes",
    "targets_from_sequences",
    "train",
]
