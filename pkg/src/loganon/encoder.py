"""Irreversible fixed-width encoding of de-identified messages.

Messages are hashed with the SHAKE-128 extendable-output function and
truncated to a configurable byte width; the same function applied to the
event pattern yields the category key. Hash-to-text dictionaries detect
truncation collisions instead of silently merging distinct messages, and a
storage report quantifies how much smaller the encoded corpus is.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .model import DeidentifiedEntry, EncodedEntry, RawLogEntry


class CollisionDetected(RuntimeError):
    """Two distinct texts truncated to the same key; raise the digest width and re-run."""


@dataclass(frozen=True)
class EncoderConfig:
    """Digest width and output options.

    The operational minimum width is 4 bytes (8 hex chars); 1-3 bytes are
    accepted here so collision handling can be exercised deliberately, and
    the command-line front end refuses them.
    """

    digest_length_bytes: int = 4
    emit_meanings: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.digest_length_bytes <= 32:
            raise ValueError("digest_length_bytes must be in [1, 32]")


def hash_text(text: str, cfg: EncoderConfig = EncoderConfig()) -> str:
    """SHAKE-128 over the exact UTF-8 bytes of ``text``, truncated, lowercase hex.

    No normalization and no trailing newline: equal strings give equal keys
    on every platform, and nothing else enters the digest.
    """
    return hashlib.shake_128(text.encode("utf-8")).hexdigest(cfg.digest_length_bytes)


class PatternDictionary:
    """One-to-one map from hash key to the text it encodes, with counts.

    register() is atomic check-and-insert: a key seen again with the same
    text increments its count, a key seen with different text raises
    CollisionDetected. Counts therefore always sum to the number of
    registrations.
    """

    def __init__(self) -> None:
        self._entries: dict[str, tuple[str, int]] = {}
        self._lock = threading.Lock()

    def register(self, key: str, text: str) -> int:
        with self._lock:
            known = self._entries.get(key)
            if known is None:
                self._entries[key] = (text, 1)
                return 1
            known_text, count = known
            if known_text != text:
                raise CollisionDetected(
                    f"key {key} maps to both {known_text!r} and {text!r}; "
                    "increase the digest width and re-run"
                )
            self._entries[key] = (known_text, count + 1)
            return count + 1

    def lookup(self, key: str) -> Optional[str]:
        entry = self._entries.get(key)
        return entry[0] if entry else None

    def count(self, key: str) -> int:
        entry = self._entries.get(key)
        return entry[1] if entry else 0

    def items(self) -> Iterator[tuple[str, str, int]]:
        """(key, text, count) triples in first-registration order."""
        for key, (text, count) in self._entries.items():
            yield key, text, count

    def total_count(self) -> int:
        return sum(count for _, count in self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries


@dataclass
class EncodingDictionaries:
    """The two key dictionaries one encoding run maintains."""

    messages: PatternDictionary = field(default_factory=PatternDictionary)
    patterns: PatternDictionary = field(default_factory=PatternDictionary)


def encode_entry(
    deid: DeidentifiedEntry,
    pattern: str,
    dicts: EncodingDictionaries,
    cfg: EncoderConfig = EncoderConfig(),
) -> EncodedEntry:
    """Encode one de-identified entry; timestamp and source pass through unchanged.

    ``pattern`` must be the event pattern of the entry the de-identification
    came from. Both keys are registered so collisions surface immediately.
    """
    hash_key = hash_text(deid.deid_message, cfg)
    category_key = hash_text(pattern, cfg)
    dicts.messages.register(hash_key, deid.deid_message)
    dicts.patterns.register(category_key, pattern)
    return EncodedEntry(deid.timestamp, deid.source, hash_key, category_key)


def _utf8_len(text: str) -> int:
    return len(text.encode("utf-8"))


def dictionary_bytes(dicts: EncodingDictionaries) -> int:
    """Size of the meanings files for both dictionaries (`key<TAB>text<LF>` lines)."""
    total = 0
    for dictionary in (dicts.messages, dicts.patterns):
        for key, text, _ in dictionary.items():
            total += len(key) + 1 + _utf8_len(text) + 1
    return total


@dataclass(frozen=True)
class StorageReport:
    """Byte accounting for one run; savings are exact fractions in [0, 1]."""

    entries: int
    raw_message_bytes: int
    encoded_message_bytes: int
    dictionary_bytes: int

    @property
    def saving_excluding_dictionary(self) -> Fraction:
        if self.raw_message_bytes == 0:
            return Fraction(0)
        return 1 - Fraction(self.encoded_message_bytes, self.raw_message_bytes)

    @property
    def saving_including_dictionary(self) -> Fraction:
        if self.raw_message_bytes == 0:
            return Fraction(0)
        used = self.encoded_message_bytes + self.dictionary_bytes
        return 1 - Fraction(used, self.raw_message_bytes)

    def lines(self) -> list[str]:
        def pct(x: Fraction) -> str:
            return f"{float(x) * 100:.2f}%"

        return [
            f"entries: {self.entries}",
            f"raw message bytes: {self.raw_message_bytes}",
            f"encoded message bytes: {self.encoded_message_bytes}",
            f"dictionary bytes: {self.dictionary_bytes}",
            f"saving excluding dictionary: {pct(self.saving_excluding_dictionary)}",
            f"saving including dictionary: {pct(self.saving_including_dictionary)}",
        ]


class StorageTally:
    """Streaming accumulator behind storage_stats; add entries as they pass."""

    def __init__(self) -> None:
        self.entries = 0
        self.raw_message_bytes = 0
        self.encoded_message_bytes = 0

    def add(self, raw_message: str, encoded: EncodedEntry) -> None:
        self.entries += 1
        self.raw_message_bytes += _utf8_len(raw_message)
        # The two key columns plus the single space separating them.
        self.encoded_message_bytes += len(encoded.hash_key) + 1 + len(encoded.category_key)

    def report(self, dicts: Optional[EncodingDictionaries] = None) -> StorageReport:
        return StorageReport(
            entries=self.entries,
            raw_message_bytes=self.raw_message_bytes,
            encoded_message_bytes=self.encoded_message_bytes,
            dictionary_bytes=dictionary_bytes(dicts) if dicts is not None else 0,
        )


def storage_stats(
    raw_entries: Iterable[RawLogEntry],
    encoded_entries: Iterable[EncodedEntry],
    dicts: Optional[EncodingDictionaries] = None,
) -> StorageReport:
    """Byte accounting for a finished run (raw and encoded corpora must align)."""
    tally = StorageTally()
    raw_list = list(raw_entries)
    encoded_list = list(encoded_entries)
    if len(raw_list) != len(encoded_list):
        raise ValueError("raw and encoded corpora differ in length")
    for raw, encoded in zip(raw_list, encoded_list):
        tally.add(raw.message, encoded)
    return tally.report(dicts)
