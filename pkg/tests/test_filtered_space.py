"""Partitions, conditional expectation and space validation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.core.shared.exceptions import NotFoundError
from src.engine.filtered_space import (
    Partition,
    RandomVar,
    SampleSpace,
    TwoSlotFiltration,
    condexp,
    generated_partition,
    is_measurable,
    validate_space,
)


def _space(n: int) -> SampleSpace:
    return SampleSpace.uniform([f"w{i}" for i in range(n)])


@st.composite
def nested_partitions(draw):
    """(space, coarse, fine, x) with coarse <= fine."""
    n = draw(st.integers(min_value=1, max_value=6))
    weights = draw(
        st.lists(st.integers(min_value=1, max_value=9), min_size=n, max_size=n)
    )
    total = sum(weights)
    space = SampleSpace(
        tuple(f"w{i}" for i in range(n)), tuple(Fraction(x, total) for x in weights)
    )
    fine_labels = draw(
        st.lists(st.integers(min_value=0, max_value=3), min_size=n, max_size=n)
    )
    merge = draw(
        st.lists(st.integers(min_value=0, max_value=1), min_size=4, max_size=4)
    )
    fine = generated_partition(
        [{w for w in range(n) if fine_labels[w] == k} for k in range(4)], space
    )
    coarse = generated_partition(
        [{w for w in range(n) if merge[fine_labels[w]] == k} for k in range(2)], space
    )
    values = st.fractions(min_value=0, max_value=20, max_denominator=12)
    x = RandomVar.of(draw(st.lists(values, min_size=n, max_size=n)))
    return space, coarse, fine, x


@given(nested_partitions())
@settings(max_examples=100, deadline=None)
def test_condexp_tower_property(case):
    space, coarse, fine, x = case
    assert coarse.is_coarser_than(fine)
    assert condexp(condexp(x, fine, space), coarse, space) == condexp(x, coarse, space)


@given(nested_partitions())
@settings(max_examples=100, deadline=None)
def test_condexp_is_idempotent_and_preserves_mean(case):
    space, _, fine, x = case
    projected = condexp(x, fine, space)
    assert is_measurable(projected, fine)
    assert condexp(projected, fine, space) == projected
    assert space.expectation(projected) == space.expectation(x)


def test_condexp_weights_by_probability():
    space = SampleSpace(("a", "b"), (Fraction(1, 4), Fraction(3, 4)))
    x = RandomVar.of([4, 0])
    assert condexp(x, Partition.trivial(2), space).values == (Fraction(1), Fraction(1))
    assert condexp(x, Partition.discrete(2), space) == x


def test_partition_order():
    trivial, discrete = Partition.trivial(3), Partition.discrete(3)
    middle = Partition.of([[0, 1], [2]])
    assert trivial.is_coarser_than(middle)
    assert middle.is_coarser_than(discrete)
    assert not discrete.is_coarser_than(middle)
    assert trivial.is_strictly_coarser_than(middle)
    assert not middle.is_strictly_coarser_than(middle)
    assert middle.measures({0, 1})
    assert not middle.measures({0})


def test_generated_partition_intersects_generators():
    space = _space(4)
    atoms = generated_partition([{0, 1}, {1, 2}], space)
    assert set(atoms.blocks) == {frozenset({w}) for w in range(4)}


def test_random_var_on_zeroes_outside_event():
    x = RandomVar.of([1, 2, 3])
    assert x.on({1}).values == (0, 2, 0)
    assert x.first_violation(RandomVar.of([1, 1, 3]), lambda a, b: a <= b) == 1


def test_unknown_outcome_is_not_found():
    with pytest.raises(NotFoundError):
        _space(2).index("nope")


def test_qlc_failures_mark_strictly_coarse_pre_partitions(e2, e3):
    assert e3.filtration.qlc_failures() == [1]
    assert e2.filtration.qlc_failures() == []


def _filtration(space, pre, post) -> TwoSlotFiltration:
    return TwoSlotFiltration(
        space,
        len(pre) - 1,
        tuple(Partition.of(b) for b in pre),
        tuple(Partition.of(b) for b in post),
    )


def _codes(report) -> set[str]:
    return {f.code for f in report.findings}


def test_validate_space_accepts_canonical(e1, e2, e3):
    for instance in (e1, e2, e3):
        assert validate_space(instance.space, instance.filtration).ok


def test_validate_space_rejects_bad_probabilities():
    space = SampleSpace(("a", "b"), (Fraction(1, 2), Fraction(1, 3)))
    filt = _filtration(space, [[[0, 1]]], [[[0, 1]]])
    report = validate_space(space, filt)
    assert _codes(report) == {"probability_sum"}
    assert "sum to 5/6" in report.first().message

    space = SampleSpace(("a", "b"), (Fraction(0), Fraction(1)))
    report = validate_space(space, _filtration(space, [[[0, 1]]], [[[0, 1]]]))
    assert "nonpositive_probability" in _codes(report)


def test_validate_space_rejects_broken_refinement_chain():
    space = _space(2)
    # P_0 splits but Q_1 forgets the split
    filt = _filtration(space, [[[0, 1]], [[0, 1]]], [[[0], [1]], [[0], [1]]])
    report = validate_space(space, filt)
    assert _codes(report) == {"refinement_chain"}
    assert report.first().context["t"] == 0

    # Q_t finer than P_t
    filt = _filtration(space, [[[0, 1]], [[0], [1]]], [[[0, 1]], [[0, 1]]])
    assert "refinement_chain" in _codes(validate_space(space, filt))


def test_validate_space_rejects_nontrivial_initial_and_overlaps():
    space = _space(2)
    filt = _filtration(space, [[[0], [1]]], [[[0], [1]]])
    assert _codes(validate_space(space, filt)) == {"nontrivial_initial"}

    filt = _filtration(space, [[[0, 1]]], [[[0, 1], [1]]])
    report = validate_space(space, filt)
    assert _codes(report) == {"not_a_partition"}
    assert "overlapping" in report.first().message


def test_validate_space_rejects_duplicates_and_slot_count():
    space = SampleSpace(("a", "a"), (Fraction(1, 2), Fraction(1, 2)))
    filt = _filtration(space, [[[0, 1]]], [[[0, 1]]])
    assert "duplicate_outcome" in _codes(validate_space(space, filt))

    space = _space(1)
    filt = TwoSlotFiltration(space, 2, (Partition.trivial(1),), (Partition.trivial(1),))
    assert _codes(validate_space(space, filt)) == {"slot_count"}
