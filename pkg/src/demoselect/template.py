"""Demonstration sentences and the final inference prompt.

A row becomes one sentence of the form

    input: given {c1} is {v1}, ..., and {ck} is {vk}, class: {label}.

with "and" joining only the last feature pair (dropped when there is a
single feature). Column names and cell values are rendered byte-for-byte;
nothing is reformatted. The inference prompt is a task line enumerating
the categories, a numbered example list (omitted entirely for zero-shot),
and the query row rendered without its label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .dataset import Table


@dataclass(frozen=True)
class Demonstration:
    text: str
    row_index: int
    label: str


@dataclass
class PromptSpec:
    categories: list[str]  # distinct, first-appearance order
    demos: list[Demonstration]
    query_text: str  # rendered query clause, ends with "class:"

    def __post_init__(self):
        if not self.categories:
            raise ValueError("categories must be nonempty")
        if len(set(self.categories)) != len(self.categories):
            raise ValueError("categories must be distinct")


def _feature_clause(table: Table, row_index: int) -> str:
    pairs = [f"{name} is {value}" for name, value in table.feature_items(row_index)]
    if len(pairs) == 1:
        return pairs[0]
    return ", ".join(pairs[:-1]) + ", and " + pairs[-1]


def render_demo(table: Table, row_index: int) -> Demonstration:
    clause = _feature_clause(table, row_index)
    label = table.label_of(row_index)
    return Demonstration(
        text=f"input: given {clause}, class: {label}.",
        row_index=row_index,
        label=label,
    )


def render_query(table: Table, row_index: int) -> str:
    """Same feature clause as render_demo, terminated by 'class:' with no label."""
    return f"input: given {_feature_clause(table, row_index)}, class:"


def categories_in_order(table: Table, row_indices: Iterable[int]) -> list[str]:
    """Distinct label values in order of first appearance over `row_indices`."""
    seen: list[str] = []
    for i in row_indices:
        label = table.label_of(i)
        if label not in seen:
            seen.append(label)
    return seen


def _task_line(categories: Sequence[str]) -> str:
    if len(categories) == 1:
        listing = categories[0]
    else:
        listing = ", ".join(categories[:-1]) + ", or " + categories[-1]
    return f"Task: Classify the input as {listing}."


def build_prompt(spec: PromptSpec) -> str:
    """Assemble the full inference prompt for one query row."""
    lines = [_task_line(spec.categories)]
    if spec.demos:
        lines.append("Examples:")
        for i, demo in enumerate(spec.demos, start=1):
            lines.append(f"{i}. {demo.text}")
    lines.append("Now, classify the following input:")
    lines.append(spec.query_text)
    return "\n".join(lines)
