import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from application.identities import (
    bm_check,
    bn_check,
    cap_check,
    mab_check,
    random_admissible_sets,
    sweep,
)
from domain.errors import CapacityError, DomainError


def test_pair_coprime_formula_examples(small_table) -> None:
    report = bn_check([2, 3, 5, 7], 2, small_table)
    assert (report.brute_count, report.formula_value) == (15, Fraction(15))
    assert report.status == "match"
    assert bn_check([2, 3, 5, 7], 0, small_table).brute_count == 48
    assert bn_check([2, 3], 6, small_table).formula_value == 2


def test_pair_coprime_rejects_bad_input(small_table) -> None:
    with pytest.raises(DomainError):
        bn_check([2, 3], 3, small_table)
    with pytest.raises(DomainError):
        bn_check([2, 4], 2, small_table)
    with pytest.raises(CapacityError):
        bn_check([2, 3, 5, 7], 2, small_table, budget=100)


def test_bm_first_closed_form_is_falsified(small_table) -> None:
    report = bm_check([2, 3, 5, 7], 6, 2, small_table)
    assert report.brute_count == 30
    assert report.formula_value == 24
    assert report.checks == {
        "first_equality": False,
        "inequality": True,
        "second_equality": True,
    }
    assert report.quantities["brute_t"] == "15"
    assert report.status == "mismatch"


def test_bm_small_instance(small_table) -> None:
    report = bm_check([2, 3], 6, 2, small_table)
    assert (report.brute_count, report.formula_value) == (2, 1)
    assert not report.matches


@settings(max_examples=30, deadline=None)
@given(odd=st.sets(st.sampled_from([3, 5, 7, 11]), min_size=1), data=st.data())
def test_bm_count_drops_when_fewer_moduli_divide(small_table, odd: set[int], data) -> None:
    # {d : d does not divide s} is a proper subset of {d : d does not divide t}
    dividing = data.draw(st.sets(st.sampled_from(sorted(odd)), min_size=1))
    s = 2 * math.prod(dividing)
    t = data.draw(st.sampled_from([2, 26, 34]))
    report = bm_check([2, *sorted(odd)], s, t, small_table)
    assert report.checks["inequality"]
    assert report.checks["second_equality"]
    assert report.brute_count > int(report.quantities["brute_t"])


def test_bm_preconditions(small_table) -> None:
    with pytest.raises(DomainError):
        bm_check([3, 5], 6, 2, small_table)
    with pytest.raises(DomainError):
        bm_check([2, 3, 5], 14, 2, small_table)
    with pytest.raises(DomainError):
        bm_check([2, 3, 5], 6, 6, small_table)


def test_cap_examples(small_table) -> None:
    assert cap_check(2, [2], 5, small_table).brute_count == 6
    assert cap_check(2, [3], 7, small_table).formula_value == 9
    report = cap_check(2, [], 5, small_table)
    assert (report.brute_count, report.formula_value) == (4, 4)


def test_cap_preconditions(small_table) -> None:
    with pytest.raises(DomainError):
        cap_check(2, [5], 7, small_table)
    with pytest.raises(DomainError):
        cap_check(2, [2], 9, small_table)


def test_mab_examples(small_table) -> None:
    report = mab_check(2, [3], 5, [1], small_table)
    assert (report.brute_count, report.formula_value) == (7, 7)
    falsified = mab_check(2, [3], 5, [1, 2], small_table)
    assert (falsified.brute_count, falsified.formula_value) == (7, 9)
    assert falsified.status == "mismatch"
    assert mab_check(1, [], 3, [1], small_table).matches


def test_mab_rejects_full_choice(small_table) -> None:
    with pytest.raises(DomainError):
        mab_check(2, [3], 5, [1, 2, 3, 4, 5], small_table)
    with pytest.raises(DomainError):
        mab_check(2, [3], 5, [6], small_table)


def test_admissible_sets_are_seeded() -> None:
    first = random_admissible_sets(3, 20, 10**4)
    assert first == random_admissible_sets(3, 20, 10**4)
    assert all(1 <= len(values) <= 6 for values in first)


@pytest.mark.parametrize("lemma", ["BN", "CAP"])
def test_sweep_finds_no_mismatch(small_table, lemma: str) -> None:
    reports = sweep(lemma, small_table, seed=11, count=25, limit=10**4)
    assert len(reports) == 25
    assert all(report.matches for report in reports)
    threaded = sweep(lemma, small_table, seed=11, count=25, limit=10**4, threads=4)
    assert [r.model_dump() for r in threaded] == [r.model_dump() for r in reports]


@pytest.mark.parametrize(("lemma", "limit"), [("CAP", 5), ("BN", 1)])
def test_sweep_rejects_limit_below_smallest_period(small_table, lemma: str, limit: int) -> None:
    with pytest.raises(CapacityError):
        sweep(lemma, small_table, count=3, limit=limit)


def test_sweep_at_smallest_period(small_table) -> None:
    with pytest.raises(CapacityError):
        random_admissible_sets(0, 3, 1)
    assert random_admissible_sets(0, 3, 2) == [(2,), (2,), (2,)]
    reports = sweep("CAP", small_table, seed=2, count=3, limit=6)
    assert [report.params["b"] for report in reports] == [3, 3, 3]
    assert all(report.matches for report in reports)
