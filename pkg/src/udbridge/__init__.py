"""Bootstrapping annotation tools for a low-resource language.

The package covers the full chain: tokenization, word-for-word pivot
translation, word alignment, three annotation-projection procedures,
perceptron tagging, suffix-rule lemmatization, transition-based parsing,
evaluation with cross-validation and significance tests, corpus
statistics, a command-line tool, and an HTTP service.
"""

from .aligner import (
    AlignerConfig,
    AlignmentLink,
    SentencePair,
    TranslationTable,
    count_crossings,
    format_links,
    parse_links,
    read_bitext,
    train_aligner,
    viterbi_align,
)
from .conllu import (
    Document,
    MultiwordRange,
    Sentence,
    Token,
    parse_conllu,
    read_conllu_file,
    serialize_conllu,
    serialize_tsv,
    write_conllu_file,
)
from .depparser import (
    ParserModel,
    is_projective,
    projectivize,
    train_parser,
    validate_tree,
)
from .errors import (
    ConlluParseError,
    DataError,
    UdbridgeError,
    UsageError,
    ValidationError,
)
from .evaluation import (
    BootstrapResult,
    ContingencyTable2x2,
    CrossValidationPlan,
    EvalReport,
    FoldSummary,
    bootstrap_median_compare,
    build_cv_plan,
    cross_validate,
    cv_summary_tsv,
    evaluate,
    fisher_exact,
)
from .lemmatizer import EditScript, LemmaRules, derive_script, train_lemmatizer
from .pipeline import (
    EvalSetting,
    PipelineModel,
    SplitSpec,
    annotate,
    split_corpus,
    train_pipeline,
)
from .projection import (
    Procedure,
    ProcedureComparison,
    ProjectedDocument,
    TokenProvenance,
    compare_procedures,
    project_direct,
    project_via_alignment,
    project_via_pivot,
    score_procedure,
    serialize_projected,
)
from .service import ServiceConfig, build_config, make_server
from .stats import (
    CoocEdge,
    GenreRow,
    GenreTable,
    cooccurrence,
    genre_distribution,
    genre_table_from_counts,
    split_by_genre,
    top_tokens_per_upos,
    upos_frequencies,
)
from .tagger import TaggerModel, token_features, train_tagger
from .tokenizer import TokenizerConfig, load_abbreviations, tokenize
from .translate import (
    IdentityBackend,
    LexiconCache,
    PivotSentence,
    Quoting,
    RemoteServiceBackend,
    StaticLexiconBackend,
    TranslatorClient,
    load_lexicon,
)

__version__ = "0.1.0"

__all__ = [
    "AlignerConfig",
    "AlignmentLink",
    "BootstrapResult",
    "ConlluParseError",
    "ContingencyTable2x2",
    "CoocEdge",
    "CrossValidationPlan",
    "DataError",
    "Document",
    "EditScript",
    "EvalReport",
    "EvalSetting",
    "FoldSummary",
    "GenreRow",
    "GenreTable",
    "IdentityBackend",
    "LemmaRules",
    "LexiconCache",
    "MultiwordRange",
    "ParserModel",
    "PipelineModel",
    "PivotSentence",
    "Procedure",
    "ProcedureComparison",
    "ProjectedDocument",
    "Quoting",
    "RemoteServiceBackend",
    "Sentence",
    "SentencePair",
    "ServiceConfig",
    "SplitSpec",
    "StaticLexiconBackend",
    "TaggerModel",
    "Token",
    "TokenProvenance",
    "TokenizerConfig",
    "TranslationTable",
    "TranslatorClient",
    "UdbridgeError",
    "UsageError",
    "ValidationError",
    "annotate",
    "bootstrap_median_compare",
    "build_config",
    "build_cv_plan",
    "compare_procedures",
    "cooccurrence",
    "count_crossings",
    "cross_validate",
    "cv_summary_tsv",
    "derive_script",
    "evaluate",
    "fisher_exact",
    "format_links",
    "genre_distribution",
    "genre_table_from_counts",
    "is_projective",
    "load_abbreviations",
    "load_lexicon",
    "make_server",
    "parse_conllu",
    "parse_links",
    "project_direct",
    "project_via_alignment",
    "project_via_pivot",
    "projectivize",
    "read_bitext",
    "read_conllu_file",
    "score_procedure",
    "serialize_conllu",
    "serialize_projected",
    "serialize_tsv",
    "split_by_genre",
    "split_corpus",
    "token_features",
    "tokenize",
    "top_tokens_per_upos",
    "train_aligner",
    "train_lemmatizer",
    "train_parser",
    "train_pipeline",
    "train_tagger",
    "upos_frequencies",
    "validate_tree",
    "viterbi_align",
    "write_conllu_file",
]
