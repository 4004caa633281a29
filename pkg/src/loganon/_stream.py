"""Line ingestion and the parallel scan stage shared by the CLI commands.

The expensive per-line work (UTF-8 validation, field parsing, rule
scanning) is pure and runs in worker processes over ordered batches; all
order-sensitive state (individual-mode symbol numbering, dictionaries,
output writing) stays in the single reduce loop that consumes the batches
in input order. Results are therefore byte-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
import sys
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

from .model import MalformedLine, parse_line
from .rules import RuleMatch, RuleSet, sanitize_message, scan_message

BATCH_LINES = 4096


class ScannedLine(NamedTuple):
    lineno: int
    timestamp: int
    source: str
    message: str
    sanitized: str
    matches: tuple[RuleMatch, ...]


class LineIssue(NamedTuple):
    lineno: int
    reason: str


def iter_raw_lines(paths: Sequence[Union[str, Path]]) -> Iterator[tuple[int, bytes]]:
    """Yield (lineno, line bytes) across all inputs; '-' reads standard input.

    Line numbers are global and 1-based; LF (and a preceding CR) are
    stripped, nothing else is touched.
    """
    lineno = 0
    for path in paths:
        if str(path) == "-":
            stream = sys.stdin.buffer
            for raw in stream:
                lineno += 1
                yield lineno, raw.rstrip(b"\r\n") if raw.endswith(b"\n") else raw
        else:
            with open(path, "rb") as stream:
                for raw in stream:
                    lineno += 1
                    yield lineno, raw.rstrip(b"\r\n") if raw.endswith(b"\n") else raw


def _scan_one(lineno: int, raw: bytes, ruleset: RuleSet) -> Union[ScannedLine, LineIssue]:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        return LineIssue(lineno, "not valid UTF-8")
    try:
        entry = parse_line(text)
    except MalformedLine as exc:
        return LineIssue(lineno, str(exc))
    sanitized = sanitize_message(entry.message)
    matches = tuple(scan_message(sanitized, ruleset))
    return ScannedLine(lineno, entry.timestamp, entry.source, entry.message, sanitized, matches)


_worker_ruleset: Optional[RuleSet] = None


def _init_worker(ruleset: RuleSet) -> None:
    global _worker_ruleset
    _worker_ruleset = ruleset


def _scan_batch(batch: list[tuple[int, bytes]]) -> list[Union[ScannedLine, LineIssue]]:
    assert _worker_ruleset is not None
    return [_scan_one(lineno, raw, _worker_ruleset) for lineno, raw in batch]


def _batches(lines: Iterable[tuple[int, bytes]]) -> Iterator[list[tuple[int, bytes]]]:
    batch: list[tuple[int, bytes]] = []
    for item in lines:
        batch.append(item)
        if len(batch) >= BATCH_LINES:
            yield batch
            batch = []
    if batch:
        yield batch


def scanned_stream(
    lines: Iterable[tuple[int, bytes]],
    ruleset: RuleSet,
    workers: int = 1,
) -> Iterator[Union[ScannedLine, LineIssue]]:
    """Scan lines against the ruleset, preserving input order.

    ``workers > 1`` fans batches out to a process pool; the ordered imap
    merge keeps the stream identical to the sequential one.
    """
    if workers <= 1:
        for lineno, raw in lines:
            yield _scan_one(lineno, raw, ruleset)
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(workers, initializer=_init_worker, initargs=(ruleset,)) as pool:
        for batch_result in pool.imap(_scan_batch, _batches(lines)):
            yield from batch_result
