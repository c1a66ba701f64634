import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from mured.distribution import from_records
from mured.errors import (
    EmptyFile,
    InputError,
    InvalidTimeValue,
    IoFailure,
    NoTimeColumn,
    RaggedRow,
    UnknownVariable,
)
from mured.ingest import (
    CategoricalDataset,
    WindowSpec,
    measure_series,
    parse_delimited,
    read_delimited,
    time_labels,
    window_datasets,
    write_dataset,
)
from mured.measures import measure_report, transmission_n

PARITY_ROWS = [(a, b, (a + b) % 2) for a, b in itertools.product((0, 1), repeat=2)]
INDEP_ROWS = list(itertools.product((0, 1), repeat=3))


def regime_dataset(parity_years=(1980, 1981, 1982), indep_years=(1983, 1984, 1985)):
    rows = []
    for year in parity_years:
        rows += [(str(year),) + tuple(map(str, r)) for r in PARITY_ROWS]
    for year in indep_years:
        rows += [(str(year),) + tuple(map(str, r)) for r in INDEP_ROWS]
    return CategoricalDataset(("year", "x", "y", "z"), rows, time_column="year")


def test_read_example(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("u,i\n1,1\n1,0\n")
    d = read_delimited(f)
    assert d.columns == ("u", "i")
    assert d.rows == (("1", "1"), ("1", "0"))


def test_ragged_row_reports_line(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("u,i\n1,1\n0\n1,0\n")
    with pytest.raises(RaggedRow) as info:
        read_delimited(f)
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_empty_and_missing(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("\n\n")
    with pytest.raises(EmptyFile):
        read_delimited(f)
    with pytest.raises(IoFailure):
        read_delimited(tmp_path / "nope.csv")


def test_no_header_quoting_and_empty_fields():
    d = parse_delimited('a,"b,c"\n,"say ""hi"""\n', has_header=False)
    assert d.columns == ("c0", "c1")
    assert d.rows == (("a", "b,c"), ("", 'say "hi"'))
    dist = from_records(d, ["c0"])
    assert dist.alphabets[0].categories == ("a", "")


def test_tab_delimited_and_verbatim_labels():
    d = parse_delimited("k\tv\nA\t1\na\t1\n", delimiter="\t")
    assert d.column("k") == ["A", "a"]
    assert from_records(d, ["k"]).cardinalities == (2,)


def test_round_trip(tmp_path):
    text = 'year,u,note\n1980,1,"x,y"\n1981,0,\n1982,1,"he said ""no"""\n'
    f = tmp_path / "in.csv"
    f.write_text(text)
    out = tmp_path / "out.csv"
    assert write_dataset(read_delimited(f), out) == text
    assert out.read_text() == text
    crlf = tmp_path / "crlf.csv"
    crlf.write_bytes(text.replace("\n", "\r\n").encode())
    assert write_dataset(read_delimited(crlf)) == text


def test_dataset_invariants():
    with pytest.raises(RaggedRow):
        CategoricalDataset(("a", "b"), [("1",)])
    with pytest.raises(UnknownVariable):
        CategoricalDataset(("a",), [("1",)], time_column="t")
    with pytest.raises(InputError):
        CategoricalDataset(("a", "a"), [])
    with pytest.raises(InvalidTimeValue):
        CategoricalDataset(("t",), [("x",)], time_column="t", time_order="numeric")


def test_time_ordering():
    d = CategoricalDataset(("t",), [("10",), ("9",), ("11",)], time_column="t")
    assert time_labels(d) == ["9", "10", "11"]
    lex = CategoricalDataset(("t",), [("10",), ("9",), ("11",)], time_column="t", time_order="lexical")
    assert time_labels(lex) == ["10", "11", "9"]
    q = CategoricalDataset(("t",), [("q2",), ("q1",)], time_column="t")
    assert time_labels(q) == ["q1", "q2"]
    with pytest.raises(NoTimeColumn):
        time_labels(CategoricalDataset(("t",), [("1",)]))


def _years(*years):
    return CategoricalDataset(("year", "x"), [(str(y), "0") for y in years], time_column="year")


def test_window_counts():
    d = _years(1980, 1981, 1982, 1983)
    windows, gaps = window_datasets(d, WindowSpec(1))
    assert [w for w, _ in windows] == ["1980..1980", "1981..1981", "1982..1982", "1983..1983"]
    assert not gaps
    windows, _ = window_datasets(d, WindowSpec(2, 1))
    assert [w for w, _ in windows] == ["1980..1981", "1981..1982", "1982..1983"]
    windows, _ = window_datasets(d, WindowSpec(10))
    assert [w for w, _ in windows] == ["1980..1983"]
    assert WindowSpec(2).aggregation == "disjoint"
    assert WindowSpec(2, 1).aggregation == "sliding"
    with pytest.raises(InputError):
        WindowSpec(0)


def test_empty_window_is_a_gap():
    d = _years(1980, 1982)
    windows, gaps = window_datasets(d, WindowSpec(1))
    assert [w for w, _ in windows] == ["1980..1980", "1982..1982"]
    assert gaps == ["1981..1981"]


def test_windows_keep_full_alphabets():
    d = CategoricalDataset(("t", "x"), [("1", "a"), ("2", "b")], time_column="t")
    first = window_datasets(d, WindowSpec(1))[0][0][1]
    assert from_records(first, ["x"]).cardinalities == (2,)
    windows, _ = window_datasets(d, WindowSpec(1), per_window_alphabets=True)
    assert from_records(windows[0][1], ["x"]).cardinalities == (1,)


def test_regime_change_series():
    d = regime_dataset()
    s = measure_series(d, ["x", "y", "z"], "t", WindowSpec(1))
    assert s.labels == [f"{y}..{y}" for y in range(1980, 1986)]
    for v, want in zip(s.values, [-1.0] * 3 + [0.0] * 3):
        assert abs(v - want) <= 1e-9
    assert s.points[0][1].observation_count == 4
    assert s.points[-1][1].observation_count == 8


def test_constant_series():
    d = regime_dataset(parity_years=range(1990, 1995), indep_years=())
    s = measure_series(d, ["x", "y", "z"], "r", WindowSpec(2, 1))
    assert len(s.values) == 4 and len(set(s.values)) == 1


def test_single_window_equals_whole_dataset():
    d = regime_dataset()
    whole = transmission_n(from_records(d, ["x", "y", "z"]), ["x", "y", "z"])
    for step in (1, 3, 7):
        s = measure_series(d, ["x", "y", "z"], "t", WindowSpec(6, step))
        assert s.values == [whole]


def test_series_errors():
    d = regime_dataset()
    with pytest.raises(InputError):
        measure_series(d, ["year", "x"], "t", WindowSpec(1))
    rows = list(d.rows) + [("1986", "0", "0", "0")]
    short = CategoricalDataset(d.columns, rows, time_column="year")
    with pytest.raises(InputError) as info:
        measure_series(short, ["x", "y"], "tcond", WindowSpec(1))
    assert str(info.value).startswith("window 1980..1980:")


def test_workers_match_sequential():
    d = regime_dataset()
    a = measure_series(d, ["x", "y", "z"], "y", WindowSpec(2, 1))
    b = measure_series(d, ["x", "y", "z"], "y", WindowSpec(2, 1), max_workers=4)
    assert a == b


labelled_rows = st.lists(
    st.tuples(st.integers(2000, 2006), st.sampled_from("ab"), st.sampled_from("abc")),
    min_size=1,
    max_size=40,
)


def _ds(rows):
    return CategoricalDataset(
        ("t", "x", "y"), [(str(t), x, y) for t, x, y in rows], time_column="t"
    )


@given(labelled_rows, st.integers(1, 4))
def test_disjoint_windows_partition_rows(rows, width):
    d = _ds(rows)
    windows, _ = window_datasets(d, WindowSpec(width))
    covered = {str(y) for label, _ in windows for y in range(*_span(label))}
    got = Counter(r for _, sub in windows for r in sub.rows)
    want = Counter(r for r in d.rows if r[0] in covered)
    assert got == want


def _span(label):
    a, b = label.split("..")
    return int(a), int(b) + 1


@given(labelled_rows, st.randoms(use_true_random=False))
def test_row_order_is_irrelevant(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    a, b = _ds(rows), _ds(shuffled)
    for m in ("entropy", "t", "y"):
        ra = measure_report(from_records(a, ["x", "y"]), m, ["x", "y"]).value
        rb = measure_report(from_records(b, ["x", "y"]), m, ["x", "y"]).value
        assert abs(ra - rb) <= 1e-12


@given(labelled_rows)
def test_full_width_series_is_whole_measure(rows):
    d = _ds(rows)
    n = len(time_labels(d))
    s = measure_series(d, ["x", "y"], "t", WindowSpec(n, random.Random(len(rows)).randint(1, 5)))
    whole = measure_report(from_records(d, ["x", "y"]), "t", ["x", "y"]).value
    assert s.values == [whole]
