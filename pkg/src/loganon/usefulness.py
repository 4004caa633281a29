"""Dominance-weighted data-usefulness metric and pattern-coverage tables.

For each event pattern p with frequency f_p among N_e entries, the dominance
is f_p/N_e. Each significant term slot of the pattern has a practical value
domain (distinct values observed in the corpus for that slot) of size N_val
and a set of emitted symbols of size N_s. The usefulness of a de-identified
corpus is

    U = sum over patterns of  dominance * (product of N_s / product of N_val)

so U = 1 means no generalization loss for the intended analysis and values
near 0 mean the significant distinctions were generalized away. All
arithmetic is exact rational; rendering rounds to 4 decimal places.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .encoder import EncoderConfig, hash_text
from .model import DeidentifiedEntry

Rational = Union[int, float, str, Fraction]


class DomainError(ValueError):
    """Inputs outside the metric's domain (empty window, dominances over 1, ...)."""


class CoverageError(ValueError):
    """Per-pattern frequencies do not add up to the declared entry count."""


def _as_fraction(x: Rational) -> Fraction:
    # Floats go through their shortest decimal repr, so 0.43 means 43/100.
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class TermCardinality:
    """Distinct-value and distinct-symbol counts for one significant term slot."""

    rule_name: str
    n_values: int
    n_symbols: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_symbols <= self.n_values:
            raise DomainError(
                f"term {self.rule_name}: need 1 <= n_symbols <= n_values, "
                f"got {self.n_symbols}/{self.n_values}"
            )


@dataclass(frozen=True)
class PatternStats:
    """Frequency and per-slot cardinalities of one event pattern."""

    category_key: str
    pattern_text: str
    f_p: int
    per_term: tuple[TermCardinality, ...] = ()

    def __post_init__(self) -> None:
        if self.f_p < 1:
            raise DomainError(f"pattern {self.category_key}: frequency must be >= 1")

    @property
    def ratio(self) -> Fraction:
        return pattern_ratio((t.n_symbols, t.n_values) for t in self.per_term)


def dominance(f_p: int, n_entries: int) -> Fraction:
    """Share of the analysis window held by one pattern, exact."""
    if n_entries == 0:
        raise DomainError("dominance undefined for an empty window")
    if not 1 <= f_p <= n_entries:
        raise DomainError(f"need 1 <= f_p <= N_e, got f_p={f_p}, N_e={n_entries}")
    return Fraction(f_p, n_entries)


def pattern_ratio(per_term: Iterable[tuple[int, int]]) -> Fraction:
    """Symbol-to-value cardinality ratio of one pattern: prod N_s / prod N_val.

    ``per_term`` yields (n_symbols, n_values) pairs; no significant terms
    means no generalization loss, so the empty product is 1.
    """
    num = 1
    den = 1
    for n_symbols, n_values in per_term:
        if not 1 <= n_symbols <= n_values:
            raise DomainError(f"need 1 <= N_s <= N_val, got {n_symbols}/{n_values}")
        num *= n_symbols
        den *= n_values
    return Fraction(num, den)


@dataclass(frozen=True)
class PatternRow:
    category_key: str
    pattern_text: str
    f_p: int
    dominance: Fraction
    ratio: Fraction

    @property
    def contribution(self) -> Fraction:
        return self.dominance * self.ratio


@dataclass(frozen=True)
class UsefulnessReport:
    """Per-pattern breakdown plus the aggregate usefulness U."""

    n_entries: int
    mode_label: str
    rows: tuple[PatternRow, ...]
    value: Fraction

    def csv_lines(self) -> list[str]:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["category", "pattern", "f_p", "D_p", "ratio", "contribution"])
        for row in self.rows:
            writer.writerow(
                [
                    row.category_key,
                    row.pattern_text,
                    row.f_p,
                    render_decimal(row.dominance),
                    render_decimal(row.ratio),
                    render_decimal(row.contribution),
                ]
            )
        writer.writerow(["TOTAL", "", self.n_entries, render_decimal(Fraction(1)), "", render_decimal(self.value)])
        return buf.getvalue().splitlines()

    def table_lines(self) -> list[str]:
        lines = [f"{'category':<12} {'f_p':>8} {'D_p':>8} {'ratio':>8} {'contrib':>8}  pattern"]
        for row in self.rows:
            lines.append(
                f"{row.category_key:<12} {row.f_p:>8} {render_decimal(row.dominance):>8} "
                f"{render_decimal(row.ratio):>8} {render_decimal(row.contribution):>8}  {row.pattern_text}"
            )
        lines.append(
            f"usefulness ({self.mode_label}): {render_decimal(self.value)} "
            f"(exact {self.value.numerator}/{self.value.denominator}) over {self.n_entries} entries"
        )
        return lines


def usefulness(
    stats: Sequence[PatternStats], n_entries: int, mode_label: str = ""
) -> UsefulnessReport:
    """Aggregate usefulness over pattern statistics covering the whole window."""
    total = sum(s.f_p for s in stats)
    if total != n_entries:
        raise CoverageError(f"pattern frequencies cover {total} of {n_entries} entries")
    if n_entries == 0:
        raise DomainError("empty analysis window")
    rows = tuple(
        PatternRow(
            category_key=s.category_key,
            pattern_text=s.pattern_text,
            f_p=s.f_p,
            dominance=dominance(s.f_p, n_entries),
            ratio=s.ratio,
        )
        for s in sorted(stats, key=lambda s: (-s.f_p, s.category_key))
    )
    value = sum((row.contribution for row in rows), Fraction(0))
    return UsefulnessReport(n_entries=n_entries, mode_label=mode_label, rows=rows, value=value)


def usefulness_from_summary(
    rows: Iterable[tuple[Rational, Rational]],
    residual: Optional[tuple[Rational, Rational]] = None,
) -> Fraction:
    """Evaluate the metric from externally supplied (dominance, ratio) pairs.

    Useful when per-entry data is unavailable and only aggregate shares are
    known, e.g. the head of a frequency table plus an explicit residual term
    for everything outside it. Ratios may be 0 to assign no utility to a
    share. Raises DomainError when the dominances exceed 1 in total.
    """
    terms = [( _as_fraction(d), _as_fraction(r)) for d, r in rows]
    if residual is not None:
        terms.append((_as_fraction(residual[0]), _as_fraction(residual[1])))
    total_dominance = sum((d for d, _ in terms), Fraction(0))
    if total_dominance > 1:
        raise DomainError(f"dominances sum to {total_dominance} > 1")
    for d, r in terms:
        if d < 0:
            raise DomainError(f"negative dominance {d}")
        if not 0 <= r <= 1:
            raise DomainError(f"ratio {r} outside [0, 1]")
    return sum((d * r for d, r in terms), Fraction(0))


@dataclass(frozen=True)
class CoverageTable:
    """Cumulative share of entries produced by the K most frequent patterns."""

    n_entries: int
    n_patterns: int
    rows: tuple[tuple[int, Fraction], ...]

    def csv_lines(self) -> list[str]:
        lines = [
            f"#Raw log entries,{self.n_entries}",
            f"#Event patterns,{self.n_patterns}",
            "K,coverage_percent",
        ]
        for k, coverage in self.rows:
            lines.append(f"{k},{float(coverage) * 100:.2f}")
        return lines


def top_k_coverage(stats: Sequence[PatternStats], ks: Union[int, Iterable[int]]) -> CoverageTable:
    """Coverage of the top-K patterns for each requested K.

    Patterns are ranked by frequency, ties broken by category key; a K beyond
    the pattern count yields the full-coverage row.
    """
    k_list = [ks] if isinstance(ks, int) else list(ks)
    if not k_list or any(k < 1 for k in k_list):
        raise DomainError(f"K values must be >= 1, got {k_list}")
    ordered = sorted(stats, key=lambda s: (-s.f_p, s.category_key))
    n_entries = sum(s.f_p for s in ordered)
    cumulative = []
    running = 0
    for s in ordered:
        running += s.f_p
        cumulative.append(running)
    rows = []
    for k in k_list:
        covered = cumulative[min(k, len(cumulative)) - 1] if cumulative else 0
        share = Fraction(covered, n_entries) if n_entries else Fraction(0)
        rows.append((k, share))
    return CoverageTable(n_entries=n_entries, n_patterns=len(ordered), rows=tuple(rows))


class UsefulnessAccumulator:
    """Streaming collection of pattern statistics from de-identified entries.

    Tracks, per pattern, the frequency and per significant-slot sets of
    observed values and emitted symbols. Merging per-shard accumulators is a
    commutative union/sum, so the final report does not depend on sharding.
    """

    def __init__(self) -> None:
        self.n_entries = 0
        # pattern text -> [f_p, list per slot of (rule tag, value set, symbol set)]
        self._patterns: dict[str, list] = {}

    def add(self, deid: DeidentifiedEntry, pattern: str) -> None:
        self.n_entries += 1
        state = self._patterns.get(pattern)
        if state is None:
            state = [0, []]
            self._patterns[pattern] = state
        state[0] += 1
        slots = state[1]
        for i, sig in enumerate(deid.significant_values):
            if i == len(slots):
                slots.append((set(), set()))
            values, symbols = slots[i]
            values.add(sig.original_value)
            symbols.add(sig.symbol)

    def merge(self, other: "UsefulnessAccumulator") -> None:
        self.n_entries += other.n_entries
        for pattern, (f_p, slots) in other._patterns.items():
            state = self._patterns.get(pattern)
            if state is None:
                self._patterns[pattern] = [f_p, [(set(v), set(s)) for v, s in slots]]
                continue
            state[0] += f_p
            mine = state[1]
            for i, (values, symbols) in enumerate(slots):
                if i == len(mine):
                    mine.append((set(), set()))
                mine[i][0].update(values)
                mine[i][1].update(symbols)

    def stats(self, cfg: EncoderConfig = EncoderConfig()) -> list[PatternStats]:
        out = []
        for pattern, (f_p, slots) in self._patterns.items():
            names = _slot_names(pattern, len(slots))
            per_term = tuple(
                TermCardinality(
                    rule_name=names[i],
                    n_values=len(values),
                    n_symbols=len(symbols),
                )
                for i, (values, symbols) in enumerate(slots)
            )
            out.append(
                PatternStats(
                    category_key=hash_text(pattern, cfg),
                    pattern_text=pattern,
                    f_p=f_p,
                    per_term=per_term,
                )
            )
        return out

    def report(self, mode_label: str = "", cfg: EncoderConfig = EncoderConfig()) -> UsefulnessReport:
        return usefulness(self.stats(cfg), self.n_entries, mode_label)


_SIGNIFICANT_SYMBOL_RE = re.compile(r"#([A-Z][A-Za-z0-9]{0,7})_#")


def _slot_names(pattern: str, n_slots: int) -> list[str]:
    # Significant slots appear in the pattern as #NAME_#; rule names are
    # alphanumeric, so the trailing underscore delimits them exactly.
    names = [m.group(1) for m in _SIGNIFICANT_SYMBOL_RE.finditer(pattern)]
    if len(names) < n_slots:
        names += [f"slot{i}" for i in range(len(names), n_slots)]
    return names[:n_slots]


def render_decimal(value: Rational, places: int = 4) -> str:
    """Round an exact rational to fixed decimal places, half away from even ties handled exactly."""
    frac = _as_fraction(value)
    scale = 10**places
    scaled = frac * scale
    rounded = round(scaled)  # exact rational rounding, banker's at .5 ties
    sign = "-" if rounded < 0 else ""
    rounded = abs(rounded)
    whole, fracpart = divmod(rounded, scale)
    return f"{sign}{whole}.{fracpart:0{places}d}"
