import pytest

from demoselect.dataset import Table, Row, load_csv, parse_csv, resolve_label, shuffle_split, write_csv
from demoselect.errors import CsvError, LabelColumnError

from .conftest import TINY_CSV


class TestLoadCsv:
    def test_iris(self, iris_table):
        assert iris_table.columns == [
            "sepallength", "sepalwidth", "petallength", "petalwidth", "class",
        ]
        assert iris_table.n_rows == 150
        assert iris_table.label_col == 4
        assert iris_table.label_of(0) == "Iris-setosa"

    def test_minimal_two_columns(self):
        t = parse_csv("a,b\n1,2\n", label="b")
        assert t.n_rows == 1
        assert t.label_col == 1
        assert t.rows[0].cells == ("1", "2")

    def test_ragged_row_names_offender(self):
        with pytest.raises(CsvError, match="row 3"):
            parse_csv("a,b\n1,2\n1,2,3\n")

    def test_unknown_label_lists_columns(self):
        with pytest.raises(LabelColumnError, match="sepallength"):
            parse_csv("sepallength,class\n1,x\n", label="nope")

    def test_empty_input(self):
        with pytest.raises(CsvError, match="header"):
            parse_csv("")

    def test_header_only(self):
        with pytest.raises(CsvError, match="no data rows"):
            parse_csv("a,b\n")

    def test_single_column_rejected(self):
        with pytest.raises(CsvError, match="at least 2 columns"):
            parse_csv("a\n1\n")

    def test_label_default_is_last_column(self):
        t = parse_csv(TINY_CSV)
        assert t.label_col == 2

    def test_label_by_index(self):
        assert parse_csv(TINY_CSV, label=0).label_col == 0
        assert parse_csv(TINY_CSV, label="1").label_col == 1

    def test_label_index_out_of_range(self):
        with pytest.raises(LabelColumnError):
            parse_csv(TINY_CSV, label=7)

    def test_empty_cells_kept_verbatim(self):
        t = parse_csv("a,b,c\n1,,x\n")
        assert t.rows[0].cells == ("1", "", "x")

    def test_cells_whitespace_stripped(self):
        t = parse_csv("a,b\n 1 ,  x\n")
        assert t.rows[0].cells == ("1", "x")

    def test_quoted_fields_round_trip(self, tmp_path):
        text = 'a,b\n"1,5","he said ""hi"""\n"line\nbreak",plain\n'
        t = parse_csv(text)
        assert t.rows[0].cells == ("1,5", 'he said "hi"')
        assert t.rows[1].cells == ("line\nbreak", "plain")
        path = tmp_path / "rt.csv"
        write_csv(t, path)
        again = load_csv(path)
        assert [r.cells for r in again.rows] == [r.cells for r in t.rows]
        assert again.columns == t.columns

    def test_file_round_trip(self, iris_path, iris_table, tmp_path):
        path = tmp_path / "iris.csv"
        write_csv(iris_table, path)
        again = load_csv(path, label="class")
        assert [r.cells for r in again.rows] == [r.cells for r in iris_table.rows]


class TestTableInvariants:
    def test_row_arity_checked(self):
        with pytest.raises(CsvError):
            Table(columns=["a", "b"], rows=[Row(("1",), 0)], label_col=1)

    def test_label_col_checked(self):
        with pytest.raises(LabelColumnError):
            Table(columns=["a", "b"], rows=[Row(("1", "2"), 0)], label_col=2)

    def test_resolve_label_names_and_indices(self):
        cols = ["x", "y", "z"]
        assert resolve_label(cols, None) == 2
        assert resolve_label(cols, "y") == 1
        assert resolve_label(cols, 0) == 0
        assert resolve_label(cols, "2") == 2


class TestShuffleSplit:
    def test_iris_sizes(self, iris_table):
        s = shuffle_split(iris_table, seed=0)
        assert len(s.train) == 120
        assert len(s.test) == 30

    def test_deterministic(self, tiny_table):
        assert shuffle_split(tiny_table, seed=7) == shuffle_split(tiny_table, seed=7)

    def test_distinct_seeds_permute(self, iris_table):
        a = shuffle_split(iris_table, seed=1)
        b = shuffle_split(iris_table, seed=2)
        assert a.train != b.train

    def test_rounding_half_up(self):
        t = parse_csv("a,b\n" + "".join(f"{i},x\n" for i in range(5)))
        s = shuffle_split(t, seed=0, train_frac=0.8)
        assert (len(s.train), len(s.test)) == (4, 1)
        s = shuffle_split(t, seed=0, train_frac=0.5)  # 2.5 rounds up
        assert (len(s.train), len(s.test)) == (3, 2)

    @pytest.mark.parametrize("seed", [0, 1, 17, 2**32 + 5])
    @pytest.mark.parametrize("n", [2, 5, 29, 150])
    def test_partition_property(self, seed, n):
        t = parse_csv("a,b\n" + "".join(f"{i},x\n" for i in range(n)))
        s = shuffle_split(t, seed=seed)
        assert sorted(s.train + s.test) == list(range(n))
        assert len(s.train) == int(0.8 * n + 0.5)

    def test_pure_function_of_size_and_seed(self):
        t1 = parse_csv("a,b\n" + "".join(f"{i},x\n" for i in range(12)))
        t2 = parse_csv("p,q\n" + "".join(f"{i * 3},y\n" for i in range(12)))
        assert shuffle_split(t1, seed=3).train == shuffle_split(t2, seed=3).train

    def test_too_small(self):
        t = parse_csv("a,b\n1,x\n")
        with pytest.raises(ValueError):
            shuffle_split(t, seed=0)

    def test_bad_frac(self, tiny_table):
        with pytest.raises(ValueError):
            shuffle_split(tiny_table, seed=0, train_frac=1.0)
