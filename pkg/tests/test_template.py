import pytest
from hypothesis import given
from hypothesis import strategies as st

from demoselect.dataset import Table, Row, parse_csv
from demoselect.template import (
    PromptSpec,
    build_prompt,
    categories_in_order,
    render_demo,
    render_query,
)

from .conftest import golden

IRIS_SENTENCE = (
    "input: given sepallength is 6.8, sepalwidth is 3.0, petallength is 5.5, "
    "and petalwidth is 2.1, class: Iris-virginica."
)


class TestRenderDemo:
    def test_iris_example_sentence(self, iris_table):
        # row 112 is the (6.8, 3.0, 5.5, 2.1, Iris-virginica) sample
        demo = render_demo(iris_table, 112)
        assert demo.text == IRIS_SENTENCE
        assert demo.label == "Iris-virginica"
        assert demo.row_index == 112

    def test_single_feature_drops_and(self):
        t = parse_csv("x,label\n1,A\n")
        assert render_demo(t, 0).text == "input: given x is 1, class: A."

    def test_two_features_keep_one_and(self):
        t = parse_csv("x,y,label\n1,2,A\n")
        assert render_demo(t, 0).text == "input: given x is 1, and y is 2, class: A."

    def test_label_column_excluded_from_features(self):
        t = parse_csv("x,label,y\n1,A,2\n", label="label")
        assert render_demo(t, 0).text == "input: given x is 1, and y is 2, class: A."

    def test_injective_over_distinct_rows(self, iris_table):
        texts = {render_demo(iris_table, i).text for i in range(iris_table.n_rows)}
        distinct_rows = {tuple(r.cells) for r in iris_table.rows}
        assert len(texts) == len(distinct_rows)

    @given(
        cells=st.lists(
            st.text(alphabet=st.characters(exclude_categories=["Cs"]), min_size=1, max_size=12),
            min_size=2,
            max_size=5,
        )
    )
    def test_all_cells_rendered_verbatim(self, cells):
        cols = [f"c{i}" for i in range(len(cells))]
        t = Table(columns=cols, rows=[Row(tuple(cells), 0)], label_col=len(cells) - 1)
        text = render_demo(t, 0).text
        for cell in cells:
            assert cell in text


class TestRenderQuery:
    def test_matches_demo_clause(self, iris_table):
        q = render_query(iris_table, 112)
        assert q == IRIS_SENTENCE.replace(" Iris-virginica.", "")
        assert q.endswith("class:")

    def test_single_feature(self):
        t = parse_csv("x,label\n1,A\n")
        assert render_query(t, 0) == "input: given x is 1, class:"

    def test_deterministic(self, iris_table):
        assert render_query(iris_table, 3) == render_query(iris_table, 3)


class TestBuildPrompt:
    def _spec(self, iris_table, demo_rows, query_row):
        return PromptSpec(
            categories=["Iris-setosa", "Iris-versicolor", "Iris-virginica"],
            demos=[render_demo(iris_table, i) for i in demo_rows],
            query_text=render_query(iris_table, query_row),
        )

    def test_golden_three_categories_two_demos(self, iris_table):
        prompt = build_prompt(self._spec(iris_table, [0, 112], 50))
        assert prompt == golden("three_categories_two_demos.txt")

    def test_golden_zero_shot(self, iris_table):
        prompt = build_prompt(self._spec(iris_table, [], 50))
        assert prompt == golden("zero_shot.txt")
        assert "Examples:" not in prompt

    def test_golden_one_category_one_feature(self):
        t = parse_csv("x,label\n1,on\n2,on\n")
        spec = PromptSpec(
            categories=["on"],
            demos=[render_demo(t, 0)],
            query_text=render_query(t, 1),
        )
        assert build_prompt(spec) == golden("one_category_one_feature.txt")
        assert " or " not in build_prompt(spec).splitlines()[0]

    def test_two_categories_task_line(self, iris_table):
        spec = PromptSpec(
            categories=["A", "B"], demos=[], query_text=render_query(iris_table, 0)
        )
        assert build_prompt(spec).splitlines()[0] == "Task: Classify the input as A, or B."

    def test_each_demo_once_in_order(self, iris_table):
        spec = self._spec(iris_table, [5, 17, 89], 50)
        prompt = build_prompt(spec)
        positions = [prompt.find(d.text) for d in spec.demos]
        assert all(p >= 0 for p in positions)
        assert positions == sorted(positions)
        for d in spec.demos:
            assert prompt.count(d.text) == 1

    def test_numbering_starts_at_one(self, iris_table):
        lines = build_prompt(self._spec(iris_table, [0, 1, 2], 50)).splitlines()
        assert lines[2].startswith("1. input:")
        assert lines[4].startswith("3. input:")

    def test_empty_categories_rejected(self, iris_table):
        with pytest.raises(ValueError):
            PromptSpec(categories=[], demos=[], query_text=render_query(iris_table, 0))

    def test_duplicate_categories_rejected(self, iris_table):
        with pytest.raises(ValueError):
            PromptSpec(categories=["A", "A"], demos=[], query_text="q")


class TestCategories:
    def test_first_appearance_order(self, tiny_table):
        assert categories_in_order(tiny_table, [1, 0, 3, 2]) == ["y", "x"]

    def test_deduplicated(self, iris_table):
        cats = categories_in_order(iris_table, range(150))
        assert cats == ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
