from __future__ import annotations

from pathlib import Path

import pytest

from dyckcst.grammar import parse_grammar

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

SUITE = ["paper", "anbn", "wwr", "example2", "gruska1", "gruska2", "gruska3"]
LINEAR = ["anbn", "even_a", "palindromes_even", "palindromes_odd", "pair_chain"]


def fixture_path(name: str) -> Path:
    suffix = "" if "." in name else ".cfg"
    return FIXTURES / f"{name}{suffix}"


def load(name: str):
    return parse_grammar(fixture_path(name).read_text())


@pytest.fixture(params=SUITE)
def suite_grammar(request):
    return request.param, load(request.param)


_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
