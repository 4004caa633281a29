from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from loganon import (
    Mode,
    RawLogEntry,
    RuleSet,
    SymbolRegistry,
    load_rules,
    parse_line,
    process_entry,
)

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def load_fixture_entries(name: str) -> list[RawLogEntry]:
    lines = (FIXTURES / name).read_text(encoding="utf-8").splitlines()
    return [parse_line(line) for line in lines]


@pytest.fixture(scope="session")
def cron_ruleset() -> RuleSet:
    return load_rules(FIXTURES / "cron_sample.rules")


@pytest.fixture(scope="session")
def cron_entries() -> list[RawLogEntry]:
    return load_fixture_entries("cron_sample.log")


@pytest.fixture(scope="session")
def mixed_ruleset() -> RuleSet:
    return load_rules(FIXTURES / "mixed_sample.rules")


@pytest.fixture(scope="session")
def mixed_entries() -> list[RawLogEntry]:
    return load_fixture_entries("mixed_sample.log")


def brute_force_usefulness(entries: list[RawLogEntry], ruleset: RuleSet) -> Fraction:
    """Reference usefulness: group by pattern, rescan the recorded replacements.

    Deliberately simple and non-streaming: materialize every de-identified
    entry, bucket them by event pattern, and count distinct values/symbols
    per significant slot with plain set comprehensions.
    """
    registry = SymbolRegistry()
    processed = [process_entry(e, ruleset, registry) for e in entries]
    by_pattern: dict[str, list] = {}
    for deid, pattern in processed:
        by_pattern.setdefault(pattern, []).append(deid)
    total = Fraction(0)
    for deids in by_pattern.values():
        ratio = Fraction(1)
        n_slots = len(deids[0].significant_values)
        for i in range(n_slots):
            values = {d.significant_values[i].original_value for d in deids}
            symbols = {d.significant_values[i].symbol for d in deids}
            ratio *= Fraction(len(symbols), len(values))
        total += Fraction(len(deids), len(processed)) * ratio
    return total


def shell_cmd_rulesets() -> dict[str, RuleSet]:
    """Five de-identification degrees for the two shell-command sample messages."""
    from loganon import TermRule

    user = dict(name="USR", pattern=r"(?<=\()[a-z]+(?=\) cmd \()")
    path = r"/[^\s()]+"
    return {
        "raw": RuleSet(()),
        "global": RuleSet((TermRule(**user, significant=True), TermRule("PATH", path))),
        "type1": RuleSet(
            (
                TermRule(**user, significant=True, mode=Mode.GLOBAL),
                TermRule("PATH", path, significant=True, mode=Mode.INDIVIDUAL),
            )
        ),
        "type2": RuleSet(
            (TermRule(**user, significant=True), TermRule("PATH", path, significant=True)),
            Mode.INDIVIDUAL,
        ),
        "type3": RuleSet(
            (TermRule(**user, significant=True, mode=Mode.INDIVIDUAL), TermRule("PATH", path))
        ),
    }


SHELL_CMD_A = "(siavash) cmd (/home/siavash/config.sh > /dev/null)"
SHELL_CMD_B = "(florina) cmd (/home/florina/setup.sh > /dev/null)"
