from __future__ import annotations

from pathlib import Path

import pytest

from demoselect.dataset import load_csv, parse_csv

FIXTURES = Path(__file__).parent / "fixtures"

TINY_CSV = (
    "a,b,class\n"
    "1,2,x\n"
    "3,4,y\n"
    "5,6,x\n"
    "7,8,y\n"
    "9,10,x\n"
    "11,12,y\n"
)


@pytest.fixture
def tiny_table():
    return parse_csv(TINY_CSV, label="class")


@pytest.fixture(scope="session")
def iris_path() -> Path:
    return FIXTURES / "data" / "iris.csv"


@pytest.fixture(scope="session")
def iris_table(iris_path):
    return load_csv(iris_path, label="class")


def golden(name: str) -> str:
    """Golden prompt fixture content, without the trailing newline."""
    text = (FIXTURES / "prompts" / name).read_text(encoding="utf-8")
    assert text.endswith("\n"), f"golden file {name} must end with a newline"
    return text[:-1]


def planted_strings(c: int, per_group: int, rng) -> tuple[list[str], list[int]]:
    """Demonstration-like strings over c disjoint 8-letter alphabets.

    Every string uses at least 5 distinct letters of its group's alphabet,
    so any two same-group strings share at least 2 letters (pigeonhole)
    while cross-group strings share none under a byte-level tokenizer.
    """
    import string

    assert 8 * c <= len(string.ascii_lowercase + string.ascii_uppercase)
    letters = string.ascii_lowercase + string.ascii_uppercase
    texts, groups = [], []
    for g in range(c):
        alphabet = letters[8 * g : 8 * (g + 1)]
        for _ in range(per_group):
            size = int(rng.integers(5, 9))
            picks = rng.choice(8, size=size, replace=False)
            texts.append("".join(alphabet[i] for i in sorted(picks.tolist())))
            groups.append(g)
    return texts, groups
