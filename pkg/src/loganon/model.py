"""Core domain types and line-level parsing for three-field syslog entries.

Every entry has the layout ``<timestamp> <source> <message>``: an integer
UNIX timestamp, a whitespace-free node identifier, and the free-text message
(everything after the second space, verbatim).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

_TIMESTAMP_RE = re.compile(r"[0-9]+")


class MalformedLine(ValueError):
    """A line that does not follow the `<timestamp> <source> <message>` layout."""


class TermClass(Enum):
    CONSTANT = "constant"
    VARIABLE_SIGNIFICANT = "variable_significant"
    VARIABLE_INSIGNIFICANT = "variable_insignificant"


@dataclass(frozen=True)
class RawLogEntry:
    """One raw syslog entry. Immutable and safe to share between workers."""

    timestamp: int
    source: str
    message: str

    def __post_init__(self) -> None:
        if self.timestamp < 0:
            raise ValueError("timestamp must be >= 0")
        if not self.source or any(c.isspace() for c in self.source):
            raise ValueError("source must be non-empty and whitespace-free")
        if "\n" in self.message or "\r" in self.message:
            raise ValueError("message must not contain line terminators")


@dataclass(frozen=True)
class Term:
    """A slice of a message: constant text or one variable-term match.

    ``span`` holds byte offsets into the UTF-8 encoding of the message, so
    concatenating the ``text`` of all terms of a message reproduces it
    byte-for-byte.
    """

    text: str
    span: tuple[int, int]
    klass: TermClass


class SignificantValue(NamedTuple):
    """One significant-term replacement: where it sat, what it was, what symbol it got."""

    term_position: int
    original_value: str
    symbol: str


@dataclass(frozen=True)
class DeidentifiedEntry:
    """Entry after rule substitution; timestamp and source are untouched."""

    timestamp: int
    source: str
    deid_message: str
    significant_values: tuple[SignificantValue, ...] = ()


@dataclass(frozen=True)
class EncodedEntry:
    """Entry after irreversible encoding: message replaced by two hex keys.

    ``hash_key`` identifies the de-identified message, ``category_key`` the
    fully generalized event pattern; both have the same fixed width.
    """

    timestamp: int
    source: str
    hash_key: str
    category_key: str

    def __post_init__(self) -> None:
        for key in (self.hash_key, self.category_key):
            if not key or len(key) % 2 or not all(c in "0123456789abcdef" for c in key):
                raise ValueError(f"key {key!r} is not lowercase hex of even length")


def parse_line(line: str) -> RawLogEntry:
    """Parse one flat-file line into a RawLogEntry.

    The first two fields are split on single spaces; the message is the rest
    of the line verbatim (possibly empty). Raises MalformedLine for missing
    fields, a non-integer timestamp, or embedded line terminators, leaving
    the skip-vs-abort policy to the caller.
    """
    if "\n" in line or "\r" in line:
        raise MalformedLine("line contains embedded line terminator")
    ts_text, sep, rest = line.partition(" ")
    if not sep:
        raise MalformedLine(f"fewer than 2 fields: {line!r}")
    if not _TIMESTAMP_RE.fullmatch(ts_text):
        raise MalformedLine(f"non-integer timestamp: {ts_text!r}")
    source, _, message = rest.partition(" ")
    if not source or any(c.isspace() for c in source):
        raise MalformedLine(f"bad source field: {source!r}")
    return RawLogEntry(int(ts_text), source, message)


def render_entry(entry: Union[RawLogEntry, EncodedEntry]) -> str:
    """Render an entry back to its single-line flat-file form.

    For raw entries this is the inverse of parse_line:
    ``parse_line(render_entry(e)) == e``.
    """
    if isinstance(entry, EncodedEntry):
        return f"{entry.timestamp} {entry.source} {entry.hash_key} {entry.category_key}"
    return f"{entry.timestamp} {entry.source} {entry.message}"
