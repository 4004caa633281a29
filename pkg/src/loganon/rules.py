"""Substitution rules: message tokenization and de-identification.

A RuleSet turns a message into constant and variable terms. Insignificant
variable terms are always collapsed to one shared symbol ``#NAME#``;
significant ones are rewritten according to the active granularity:

* global      -- one shared symbol ``#NAME_#`` (strongest generalization)
* group       -- one symbol per configured group, ``#NAME<label>#``
* individual  -- one symbol per distinct value, ``#NAMEk#`` with k assigned
                 in first-occurrence order over the corpus stream

The fully generalized rewrite of a message (every variable term replaced by
its global symbol) is its *event pattern*; entries sharing an event pattern
form one event category.
"""

from __future__ import annotations

import configparser
import re
import threading
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping, NamedTuple, Optional, Sequence, Union

from .model import (
    DeidentifiedEntry,
    RawLogEntry,
    SignificantValue,
    Term,
    TermClass,
)

_NAME_RE = re.compile(r"[A-Z][A-Za-z0-9]{0,7}")
# Shape of every symbol this module can emit: #NAME#, #NAME_#, #NAMEk#, #NAME<label>#.
_SYMBOL_RE = re.compile(r"#[A-Z][A-Za-z0-9]{0,7}[A-Za-z0-9_]*#")

GROUP_DEFAULT_KEY = "*"


class ConfigError(ValueError):
    """Invalid rule definition or rule file."""


class GroupMapIncomplete(KeyError):
    """Group mode met a value that has no group label and no default."""


class Mode(str, Enum):
    INDIVIDUAL = "individual"
    GROUP = "group"
    GLOBAL = "global"


@dataclass(frozen=True)
class TermRule:
    """One substitution rule.

    ``pattern`` may be a regex string or a precompiled pattern; it must never
    match the empty string. ``mode`` overrides the RuleSet mode for this rule
    only. ``group_map`` maps matched values to group labels; a missing value
    falls back to ``group_default`` when set.
    """

    name: str
    pattern: Union[str, re.Pattern]
    significant: bool = False
    mode: Optional[Mode] = None
    group_map: Optional[Mapping[str, str]] = None
    group_default: Optional[str] = None

    def __post_init__(self) -> None:
        if not _NAME_RE.fullmatch(self.name):
            raise ConfigError(
                f"rule name {self.name!r} must be 1-8 ASCII alphanumerics starting uppercase"
            )
        pat = self.pattern
        if isinstance(pat, str):
            try:
                pat = re.compile(pat)
            except re.error as exc:
                raise ConfigError(f"rule {self.name}: bad pattern: {exc}") from exc
            object.__setattr__(self, "pattern", pat)
        if pat.search("") is not None:
            raise ConfigError(f"rule {self.name}: pattern must not match the empty string")
        if self.group_map is not None:
            labels = list(self.group_map.values())
            if self.group_default is not None:
                labels.append(self.group_default)
            for label in labels:
                if "#" in label or not label:
                    raise ConfigError(f"rule {self.name}: bad group label {label!r}")

    def group_label(self, value: str) -> str:
        if self.group_map is not None and value in self.group_map:
            return self.group_map[value]
        if self.group_default is not None:
            return self.group_default
        raise GroupMapIncomplete(f"rule {self.name}: no group for value {value!r}")


@dataclass(frozen=True)
class RuleSet:
    """An ordered collection of rules plus the default granularity mode."""

    rules: tuple[TermRule, ...]
    mode: Mode = Mode.GLOBAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate rule names: {names}")

    def with_mode(self, mode: Mode) -> "RuleSet":
        return replace(self, mode=mode)

    def effective_mode(self, rule: TermRule) -> Mode:
        return rule.mode if rule.mode is not None else self.mode


class RuleMatch(NamedTuple):
    """One variable-term match, in character offsets."""

    start: int
    end: int
    rule_index: int


class SymbolRegistry:
    """Corpus-scoped value->index assignment for individual de-identification.

    Indices are dense, 1-based, and assigned in first-occurrence order, so a
    sequential pass over the same entry order always reproduces the same
    symbols. Assignment is atomic; merging per-shard registries must preserve
    first-occurrence order, which the streaming pipeline guarantees by
    assigning indices in the single ordered reduce step.
    """

    def __init__(self) -> None:
        self._by_rule: dict[str, dict[str, int]] = {}
        self._lock = threading.Lock()

    def index(self, rule_name: str, value: str) -> int:
        with self._lock:
            values = self._by_rule.setdefault(rule_name, {})
            idx = values.get(value)
            if idx is None:
                idx = len(values) + 1
                values[value] = idx
            return idx

    def rows(self) -> Iterator[tuple[str, str]]:
        """Yield (symbol, original value) pairs in assignment order."""
        for rule_name, values in self._by_rule.items():
            for value, idx in values.items():
                yield f"#{rule_name}{idx}#", value


def sanitize_message(message: str) -> str:
    """Replace literal '#' by '?' except inside already well-formed symbols.

    Keeps emitted symbols unambiguous (any ``#...#`` run in a de-identified
    message is a symbol) while leaving a previously de-identified message
    unchanged, so de-identification is idempotent on its own output.
    """
    if "#" not in message:
        return message
    parts: list[str] = []
    last = 0
    for m in _SYMBOL_RE.finditer(message):
        parts.append(message[last : m.start()].replace("#", "?"))
        parts.append(m.group())
        last = m.end()
    parts.append(message[last:].replace("#", "?"))
    return "".join(parts)


def scan_message(message: str, ruleset: RuleSet) -> list[RuleMatch]:
    """Find all variable-term matches, leftmost-longest, ties by rule order.

    Matches never overlap: after a match is taken, scanning resumes at its
    end. Character offsets refer to ``message`` as given.
    """
    rules = ruleset.rules
    if not rules or not message:
        return []
    matches: list[RuleMatch] = []
    # Per-rule cache of the next candidate match at or after the cursor.
    candidates: list[Optional[re.Match]] = [r.pattern.search(message) for r in rules]
    pos = 0
    n = len(message)
    while pos < n:
        best: Optional[tuple[int, int, int]] = None  # (start, -length, rule_index)
        for i, rule in enumerate(rules):
            m = candidates[i]
            while m is not None and (m.start() < pos or m.end() <= m.start()):
                # Re-seek past the cursor; skip degenerate empty matches.
                next_from = max(pos, m.start() + 1) if m.end() <= m.start() else pos
                m = rule.pattern.search(message, next_from)
            candidates[i] = m
            if m is None:
                continue
            key = (m.start(), -(m.end() - m.start()), i)
            if best is None or key < best:
                best = key
        if best is None:
            break
        start, neg_len, rule_index = best
        end = start - neg_len
        matches.append(RuleMatch(start, end, rule_index))
        pos = end
    return matches


def _byte_offsets(message: str) -> Optional[list[int]]:
    """Cumulative UTF-8 byte offset per character index; None when ASCII."""
    if message.isascii():
        return None
    offsets = [0]
    total = 0
    for ch in message:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def tokenize(message: str, ruleset: RuleSet) -> list[Term]:
    """Split a message into constant and variable terms.

    The terms cover the message completely, in order; gaps between rule
    matches become constant terms. An empty message yields no terms.
    """
    matches = scan_message(message, ruleset)
    offsets = _byte_offsets(message)

    def span(a: int, b: int) -> tuple[int, int]:
        if offsets is None:
            return (a, b)
        return (offsets[a], offsets[b])

    terms: list[Term] = []
    cursor = 0
    for m in matches:
        if m.start > cursor:
            terms.append(Term(message[cursor : m.start], span(cursor, m.start), TermClass.CONSTANT))
        rule = ruleset.rules[m.rule_index]
        klass = TermClass.VARIABLE_SIGNIFICANT if rule.significant else TermClass.VARIABLE_INSIGNIFICANT
        terms.append(Term(message[m.start : m.end], span(m.start, m.end), klass))
        cursor = m.end
    if cursor < len(message):
        terms.append(Term(message[cursor:], span(cursor, len(message)), TermClass.CONSTANT))
    return terms


def global_symbol(rule: TermRule) -> str:
    """The fully generalized symbol for a rule: #NAME_# if significant, else #NAME#."""
    return f"#{rule.name}_#" if rule.significant else f"#{rule.name}#"


def _mode_symbol(
    rule: TermRule, value: str, mode: Mode, registry: Optional[SymbolRegistry]
) -> str:
    if not rule.significant:
        return f"#{rule.name}#"
    if mode is Mode.GROUP and rule.group_map is None and rule.group_default is None:
        mode = Mode.GLOBAL  # no grouping declared: strongest generalization applies
    if mode is Mode.GLOBAL:
        return f"#{rule.name}_#"
    if mode is Mode.GROUP:
        return f"#{rule.name}{rule.group_label(value)}#"
    reg = registry if registry is not None else SymbolRegistry()
    return f"#{rule.name}{reg.index(rule.name, value)}#"


def rewrite_matches(
    sanitized: str,
    matches: Sequence[RuleMatch],
    ruleset: RuleSet,
    registry: Optional[SymbolRegistry] = None,
) -> tuple[str, tuple[SignificantValue, ...], str]:
    """Build (deid_message, significant_values, event_pattern) from one scan.

    ``sanitized`` must be the sanitize_message() form the matches were
    computed on. The event pattern is derived from the same matches with
    every rule forced to its global symbol, so it never depends on the
    configured mode or per-rule overrides.
    """
    deid_parts: list[str] = []
    pattern_parts: list[str] = []
    significant: list[SignificantValue] = []
    cursor = 0
    term_position = 0
    for m in matches:
        if m.start > cursor:
            constant = sanitized[cursor : m.start]
            deid_parts.append(constant)
            pattern_parts.append(constant)
            term_position += 1
        rule = ruleset.rules[m.rule_index]
        value = sanitized[m.start : m.end]
        symbol = _mode_symbol(rule, value, ruleset.effective_mode(rule), registry)
        deid_parts.append(symbol)
        pattern_parts.append(global_symbol(rule))
        if rule.significant:
            significant.append(SignificantValue(term_position, value, symbol))
        term_position += 1
        cursor = m.end
    if cursor < len(sanitized):
        tail = sanitized[cursor:]
        deid_parts.append(tail)
        pattern_parts.append(tail)
    return "".join(deid_parts), tuple(significant), "".join(pattern_parts)


def process_entry(
    entry: RawLogEntry,
    ruleset: RuleSet,
    registry: Optional[SymbolRegistry] = None,
) -> tuple[DeidentifiedEntry, str]:
    """De-identify one entry and return it with its event pattern.

    Scans the message once and derives both rewrites from the same matches,
    which guarantees the pattern is exactly the fully-global rewrite of the
    entry the de-identification was computed from.
    """
    sanitized = sanitize_message(entry.message)
    matches = scan_message(sanitized, ruleset)
    deid_message, significant, pattern = rewrite_matches(sanitized, matches, ruleset, registry)
    deid = DeidentifiedEntry(entry.timestamp, entry.source, deid_message, significant)
    return deid, pattern


def deidentify(
    entry: RawLogEntry,
    ruleset: RuleSet,
    registry: Optional[SymbolRegistry] = None,
) -> DeidentifiedEntry:
    """Rewrite the message part of an entry under the configured granularity.

    Individual mode needs a shared SymbolRegistry to keep indices
    corpus-scoped; without one, indices are scoped to this single call.
    """
    return process_entry(entry, ruleset, registry)[0]


def event_pattern(entry: RawLogEntry, ruleset: RuleSet) -> str:
    """The fully generalized message: every variable term gets its global symbol."""
    return process_entry(entry, ruleset, None)[1]


# --- rule files -------------------------------------------------------------

_RULE_SECTION_RE = re.compile(r"rule\s+(\S+)")
_GROUPS_SECTION_RE = re.compile(r"groups\s+(\S+)")


def loads_rules(text: str) -> RuleSet:
    """Parse a rule file (INI syntax). See load_rules for the layout."""
    parser = configparser.RawConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str  # group-map keys are case-sensitive values
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad rule file: {exc}") from exc

    mode = Mode.GLOBAL
    if parser.has_section("ruleset"):
        raw_mode = parser.get("ruleset", "mode", fallback="global")
        try:
            mode = Mode(raw_mode.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown mode {raw_mode!r}") from None

    groups: dict[str, tuple[dict[str, str], Optional[str]]] = {}
    for section in parser.sections():
        g = _GROUPS_SECTION_RE.fullmatch(section)
        if not g:
            continue
        table = dict(parser.items(section))
        default = table.pop(GROUP_DEFAULT_KEY, None)
        groups[g.group(1)] = (table, default)

    rules: list[TermRule] = []
    for section in parser.sections():
        r = _RULE_SECTION_RE.fullmatch(section)
        if not r:
            if section != "ruleset" and not _GROUPS_SECTION_RE.fullmatch(section):
                raise ConfigError(f"unknown section [{section}]")
            continue
        name = r.group(1)
        if not parser.has_option(section, "pattern"):
            raise ConfigError(f"rule {name}: missing pattern")
        override = parser.get(section, "mode", fallback=None)
        group_map, group_default = groups.pop(name, (None, None))
        rules.append(
            TermRule(
                name=name,
                pattern=parser.get(section, "pattern"),
                significant=parser.getboolean(section, "significant", fallback=False),
                mode=Mode(override.strip().lower()) if override else None,
                group_map=group_map if group_map else None,
                group_default=group_default,
            )
        )
    if groups:
        raise ConfigError(f"group tables without a matching rule: {sorted(groups)}")
    return RuleSet(tuple(rules), mode)


def load_rules(path: Union[str, Path]) -> RuleSet:
    """Load a RuleSet from an INI rule file.

    Layout::

        [ruleset]
        mode = global            ; individual | group | global

        [rule USER]
        pattern = (?<=\\()[a-z]+(?=\\) CMD \\()
        significant = yes
        mode = individual        ; optional per-rule override

        [groups USER]            ; optional, enables group mode for USER
        siavash = n
        root = p
        * = n                    ; optional default label
    """
    return loads_rules(Path(path).read_text(encoding="utf-8"))


def dumps_rules(ruleset: RuleSet) -> str:
    """Serialize a RuleSet back to the INI rule-file syntax."""
    lines = ["[ruleset]", f"mode = {ruleset.mode.value}", ""]
    for rule in ruleset.rules:
        lines.append(f"[rule {rule.name}]")
        lines.append(f"pattern = {rule.pattern.pattern}")
        lines.append(f"significant = {'yes' if rule.significant else 'no'}")
        if rule.mode is not None:
            lines.append(f"mode = {rule.mode.value}")
        lines.append("")
        if rule.group_map or rule.group_default is not None:
            lines.append(f"[groups {rule.name}]")
            for value, label in (rule.group_map or {}).items():
                lines.append(f"{value} = {label}")
            if rule.group_default is not None:
                lines.append(f"{GROUP_DEFAULT_KEY} = {rule.group_default}")
            lines.append("")
    return "\n".join(lines)


# 14 daemon names; site-specific configuration, override per corpus as needed.
DAEMON_NAMES: tuple[str, ...] = (
    "anacron",
    "0anacron",
    "crond",
    "sshd",
    "systemd",
    "sudo",
    "rsyslogd",
    "ntpd",
    "postfix",
    "dbus",
    "polkitd",
    "audispd",
    "munged",
    "slurmd",
)


def default_ruleset(mode: Mode = Mode.GLOBAL) -> RuleSet:
    """The built-in ruleset used when no rule file is given.

    Covers the usual suspects in system logs: usernames in command/session
    lines, absolute paths, IPv4 addresses, ISO dates, bare integers, and a
    configurable daemon-name list.
    """
    daemon_alt = "|".join(re.escape(n) for n in sorted(DAEMON_NAMES, key=len, reverse=True))
    return RuleSet(
        (
            TermRule("DAEM", rf"\b(?:{daemon_alt})\b", significant=True),
            TermRule("IPv4", r"\b(?:\d{1,3}\.){3}\d{1,3}\b", significant=False),
            TermRule(
                "TIME",
                r"\b\d{4}-\d{2}-\d{2}(?:[ T]\d{2}:\d{2}(?::\d{2})?)?\b",
                significant=False,
            ),
            TermRule(
                "USER",
                r"(?<=\()[A-Za-z][\w.-]*(?=\) (?:CMD|cmd) \()|(?<=\bfor )[A-Za-z][\w.-]*$",
                significant=True,
            ),
            TermRule("PATH", r"/[^\s()]+", significant=False),
            TermRule("NUM", r"\b\d+\b", significant=True),
        ),
        mode,
    )
