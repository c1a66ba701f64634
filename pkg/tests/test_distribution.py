import math

import pytest
from hypothesis import given, strategies as st

from mured import synth
from mured.distribution import (
    Alphabet,
    JointDistribution,
    build_from_counts,
    entropy,
    from_records,
    marginal,
    max_entropy,
    observed_max_entropy,
    product,
    slice_condition,
)
from mured.errors import (
    AllZeroCounts,
    DuplicateVariable,
    EmptyDataset,
    EmptyVariableSet,
    InputError,
    InvalidAlphabet,
    InvalidBase,
    TupleOutOfAlphabet,
    UnknownVariable,
    ZeroProbabilityCondition,
)
from mured.ingest import CategoricalDataset
from mured.measures import conditional_entropy

from strategies import count_tables, random_dists

BIN = (0, 1)


def ab(*names, cats=BIN):
    return [Alphabet(n, cats) for n in names]


def assert_normalized(d):
    assert abs(math.fsum(d.mass.values()) - 1.0) <= 1e-12
    assert all(p > 0 for p in d.mass.values())


# -- construction -----------------------------------------------------------


def test_counts_fair_coin():
    d = build_from_counts({("H",): 1, ("T",): 1}, [Alphabet("c", ("H", "T"))])
    assert d.labelled() == {("H",): 0.5, ("T",): 0.5}
    assert d.total_observations == 2


def test_counts_bare_labels_for_one_variable():
    d = build_from_counts({"H": 3, "T": 1}, [Alphabet("c", ("H", "T"))])
    assert d.prob(("H",)) == 0.75


def test_counts_diagonal_drops_zero_cells():
    d = build_from_counts({(0, 0): 2, (1, 1): 2, (0, 1): 0}, ab("x", "y"))
    assert dict(d.mass) == {(0, 0): 0.5, (1, 1): 0.5}
    assert d.prob((0, 1)) == 0.0


def test_counts_uniform():
    d = build_from_counts({(i, j): 1 for i in BIN for j in BIN}, ab("x", "y"))
    assert set(d.mass.values()) == {0.25}
    assert len(d) == 4


def test_counts_errors():
    with pytest.raises(AllZeroCounts):
        build_from_counts({(0,): 0}, ab("x"))
    with pytest.raises(TupleOutOfAlphabet):
        build_from_counts({(2,): 1}, ab("x"))
    with pytest.raises(TupleOutOfAlphabet):
        build_from_counts({(0, 1): 1}, ab("x"))
    with pytest.raises(InputError):
        build_from_counts({(0,): -1}, ab("x"))


def test_pseudocount_fills_every_cell():
    d = build_from_counts({(0, 0): 2}, ab("x", "y"), pseudocount=1)
    assert len(d) == 4
    assert d.prob((0, 0)) == pytest.approx(3 / 6)
    assert d.total_observations == 2


def test_alphabet_invariants():
    with pytest.raises(InvalidAlphabet):
        Alphabet("x", ())
    with pytest.raises(InvalidAlphabet):
        Alphabet("x", ("a", "a"))
    with pytest.raises(InvalidAlphabet):
        Alphabet("", ("a",))


def test_distribution_invariants():
    with pytest.raises(InputError):
        JointDistribution(tuple(ab("x")), {(0,): 0.6})
    with pytest.raises(TupleOutOfAlphabet):
        JointDistribution(tuple(ab("x")), {(3,): 1.0})
    with pytest.raises(DuplicateVariable):
        JointDistribution(tuple(ab("x", "x")), {(0, 0): 1.0})


def test_distribution_is_immutable():
    d = synth.parity(3)
    with pytest.raises(TypeError):
        d.mass[(0, 0, 0)] = 1.0
    with pytest.raises(AttributeError):
        d.total_observations = 3


# -- from_records -----------------------------------------------------------


def dataset(columns, rows, **kw):
    return CategoricalDataset(tuple(columns), tuple(tuple(r) for r in rows), **kw)


def test_records_uniform():
    data = dataset(["u", "i"], [("1", "1"), ("1", "0"), ("0", "1"), ("0", "0")])
    d = from_records(data, ["u", "i"])
    assert set(d.mass.values()) == {0.25}
    assert d.alphabet("u").categories == ("1", "0")
    assert d.total_observations == 4


def test_records_point_mass():
    data = dataset(["a", "b"], [("x", "y"), ("x", "y")])
    d = from_records(data, ["a", "b"])
    assert d.labelled() == {("x", "y"): 1.0}


def test_records_parity_enumeration():
    # each parity-consistent triple listed twice
    rows = [(x, y, (x + y) % 2) for x in BIN for y in BIN] * 2
    data = dataset(["x", "y", "z"], [tuple(map(str, r)) for r in rows])
    d = from_records(data, ["x", "y", "z"])
    expected = {("0", "0", "0"), ("0", "1", "1"), ("1", "0", "1"), ("1", "1", "0")}
    assert set(d.labelled()) == expected
    assert set(d.mass.values()) == {0.25}


def test_records_declared_alphabets_and_weights():
    data = dataset(
        ["a", "w"], [("p", "1.5"), ("q", "0.5")], alphabets={"a": ("p", "q", "r")}
    )
    d = from_records(data, ["a"], weight_column="w")
    assert d.cardinalities == (3,)
    assert d.prob(("p",)) == 0.75
    assert d.total_observations == 2.0
    assert max_entropy(d) == pytest.approx(math.log2(3))
    assert observed_max_entropy(d) == pytest.approx(1.0)


def test_records_errors():
    data = dataset(["a"], [])
    with pytest.raises(EmptyDataset):
        from_records(data, ["a"])
    data = dataset(["a"], [("x",)])
    with pytest.raises(UnknownVariable):
        from_records(data, ["b"])
    with pytest.raises(EmptyVariableSet):
        from_records(data, [])


# -- marginal / slice -------------------------------------------------------


def test_marginal_of_uniform_is_fair_coin(coins2):
    m = marginal(coins2, ["x"])
    assert dict(m.mass) == {(0,): 0.5, (1,): 0.5}


def test_marginal_of_parity_pairs_is_uniform(parity3):
    for pair in (["x", "y"], ["x", "z"], ["z", "y"]):
        m = marginal(parity3, pair)
        assert m.variables == tuple(pair)
        assert dict(m.mass) == {(i, j): 0.25 for i in BIN for j in BIN}


def test_marginal_identity(parity3):
    assert marginal(parity3, ["x", "y", "z"]) == parity3


def test_marginal_reorders_axes():
    d = build_from_counts({(0, 1): 1}, ab("x", "y"))
    m = marginal(d, ["y", "x"])
    assert m.variables == ("y", "x")
    assert dict(m.mass) == {(1, 0): 1.0}


def test_marginal_errors(parity3):
    with pytest.raises(UnknownVariable):
        marginal(parity3, ["q"])
    with pytest.raises(EmptyVariableSet):
        marginal(parity3, [])
    with pytest.raises(DuplicateVariable):
        marginal(parity3, ["x", "x"])


def test_slice_parity_on_z(parity3):
    s = slice_condition(parity3, {"z": 0})
    assert s.variables == ("x", "y")
    assert dict(s.mass) == {(0, 0): 0.5, (1, 1): 0.5}


def test_slice_independent(coins2):
    s = slice_condition(coins2, {"y": 1})
    assert dict(s.mass) == {(0,): 0.5, (1,): 0.5}


def test_slice_point_mass():
    d = build_from_counts({("a", "b"): 5}, [Alphabet("x", ("a", "c")), Alphabet("y", ("b", "d"))])
    s = slice_condition(d, {"y": "b"})
    assert s.labelled() == {("a",): 1.0}
    assert s.total_observations == 5
    with pytest.raises(ZeroProbabilityCondition):
        slice_condition(d, {"y": "d"})
    with pytest.raises(UnknownVariable):
        slice_condition(d, {"q": "b"})


# -- entropy ----------------------------------------------------------------


def test_entropy_examples(coins2):
    assert entropy(marginal(coins2, ["x"])) == 1.0
    assert entropy(coins2) == 2.0
    coin = build_from_counts({0: 1, 1: 3}, ab("c"))
    # -(1/4 log2 1/4 + 3/4 log2 3/4) = 1/2 + 3/4 * (2 - log2 3)
    assert entropy(coin) == pytest.approx(0.811278, abs=1e-6)
    assert entropy(coin) == pytest.approx(0.5 + 0.75 * (2 - math.log2(3)), abs=1e-15)


def test_entropy_base(coins2):
    assert entropy(coins2, base=math.e) == pytest.approx(2 * math.log(2), abs=1e-15)
    assert entropy(coins2, base=4) == pytest.approx(1.0, abs=1e-15)
    for bad in (1, 0.5, -2, float("inf"), "x"):
        with pytest.raises(InvalidBase):
            entropy(coins2, base=bad)


def test_max_entropy_examples():
    assert max_entropy(synth.independent_uniform([2])) == 1.0
    assert max_entropy(synth.parity(3)) == 3.0
    d = synth.independent_uniform([2, 3])
    assert max_entropy(d) == pytest.approx(2.584963, abs=1e-6)
    assert max_entropy(d) == pytest.approx(math.log2(6), abs=1e-15)


# -- properties -------------------------------------------------------------


@given(count_tables())
def test_normalization_and_entropy_bounds(d):
    assert_normalized(d)
    h = entropy(d)
    assert 0 <= h <= max_entropy(d) + 1e-9


@given(random_dists(min_vars=3, max_vars=4), st.data())
def test_marginal_chain_consistency(d, data):
    names = list(d.variables)
    big = data.draw(st.permutations(names)).__getitem__(slice(0, len(names) - 1))
    small = data.draw(st.permutations(big))[: max(1, len(big) - 1)]
    direct = marginal(d, small)
    chained = marginal(marginal(d, big), small)
    assert_normalized(direct)
    assert direct.mass.keys() == chained.mass.keys()
    for cell, p in direct.mass.items():
        assert abs(p - chained.mass[cell]) <= 1e-12


@given(random_dists(min_vars=3, max_vars=3))
def test_one_step_equals_iterated_single_marginals(d):
    once = marginal(d, ["z"])
    iterated = marginal(marginal(d, ["y", "z"]), ["z"])
    for cell, p in once.mass.items():
        assert abs(p - iterated.mass[cell]) <= 1e-12


@given(count_tables(), st.integers(2, 1000))
def test_count_scaling_invariance(d, k):
    raw = {
        tuple(a.categories[i] for a, i in zip(d.alphabets, cell)): round(p * d.total_observations)
        for cell, p in d.mass.items()
    }
    base = build_from_counts(raw, d.alphabets)
    scaled = build_from_counts({c: v * k for c, v in raw.items()}, d.alphabets)
    assert base.mass.keys() == scaled.mass.keys()
    for cell in base.mass:
        assert abs(base.mass[cell] - scaled.mass[cell]) <= 1e-12
    assert abs(entropy(base) - entropy(scaled)) <= 1e-12


@given(random_dists(min_vars=2, max_vars=4))
def test_conditioning_consistency(d):
    y = d.variables[-1]
    rest = list(d.variables[:-1])
    py = marginal(d, [y])
    cats = d.alphabet(y).categories
    averaged = math.fsum(
        p * entropy(slice_condition(d, {y: cats[cell[0]]})) for cell, p in py.mass.items()
    )
    assert abs(averaged - conditional_entropy(d, rest, [y])) <= 1e-9


def test_product_is_normalized():
    d = product(synth.random_distribution(1, [2, 3]), synth.random_distribution(2, [2], names=["w"]))
    assert_normalized(d)
    assert d.variables == ("x", "y", "w")
