"""Anonymize system-log corpora and measure what the result is still good for.

Two-step anonymization: rule-based de-identification of variable terms,
then irreversible fixed-width hash encoding of the rewritten messages.
Companion analytics quantify the privacy/usefulness trade-off (dominance-
weighted usefulness metric, top-K pattern coverage, storage savings) and
build per-node occurrence grids for failure analysis.
"""

from .model import (
    DeidentifiedEntry,
    EncodedEntry,
    MalformedLine,
    RawLogEntry,
    SignificantValue,
    Term,
    TermClass,
    parse_line,
    render_entry,
)
from .rules import (
    ConfigError,
    GroupMapIncomplete,
    Mode,
    RuleSet,
    SymbolRegistry,
    TermRule,
    default_ruleset,
    deidentify,
    dumps_rules,
    event_pattern,
    load_rules,
    loads_rules,
    process_entry,
    sanitize_message,
    tokenize,
)
from .encoder import (
    CollisionDetected,
    EncoderConfig,
    EncodingDictionaries,
    PatternDictionary,
    StorageReport,
    StorageTally,
    encode_entry,
    hash_text,
    storage_stats,
)
from .usefulness import (
    CoverageError,
    CoverageTable,
    DomainError,
    PatternStats,
    TermCardinality,
    UsefulnessAccumulator,
    UsefulnessReport,
    dominance,
    pattern_ratio,
    render_decimal,
    top_k_coverage,
    usefulness,
    usefulness_from_summary,
)
from .grids import (
    DimensionMismatch,
    OccurrenceGrid,
    build_grid,
    difference_grid,
    emit_grid,
    merge_grids,
    similarity_grid,
)
from .synth import CorpusSpec, generate_lines, zipf_weights

__version__ = "0.1.0"

__all__ = [
    "CollisionDetected",
    "ConfigError",
    "CorpusSpec",
    "CoverageError",
    "CoverageTable",
    "DeidentifiedEntry",
    "DimensionMismatch",
    "DomainError",
    "EncodedEntry",
    "EncoderConfig",
    "EncodingDictionaries",
    "GroupMapIncomplete",
    "MalformedLine",
    "Mode",
    "OccurrenceGrid",
    "PatternDictionary",
    "PatternStats",
    "RawLogEntry",
    "RuleSet",
    "SignificantValue",
    "StorageReport",
    "StorageTally",
    "SymbolRegistry",
    "Term",
    "TermCardinality",
    "TermClass",
    "TermRule",
    "UsefulnessAccumulator",
    "UsefulnessReport",
    "build_grid",
    "default_ruleset",
    "deidentify",
    "difference_grid",
    "dominance",
    "dumps_rules",
    "emit_grid",
    "encode_entry",
    "event_pattern",
    "generate_lines",
    "hash_text",
    "load_rules",
    "loads_rules",
    "merge_grids",
    "parse_line",
    "pattern_ratio",
    "process_entry",
    "render_decimal",
    "render_entry",
    "sanitize_message",
    "similarity_grid",
    "storage_stats",
    "tokenize",
    "top_k_coverage",
    "usefulness",
    "usefulness_from_summary",
    "zipf_weights",
]
