from fractions import Fraction

import pytest
from pydantic import ValidationError

from domain.formatting import (
    format_fraction,
    parse_int_list,
    relative_deviation,
    round_sig,
)
from domain.models import (
    GoldbachBound,
    IdentityReport,
    IntervalSpec,
    ReportEnvelope,
    RunConfig,
    Selection,
)


def test_fraction_text() -> None:
    assert format_fraction(Fraction(6, 4)) == "3/2"
    assert format_fraction(5) == "5/1"


def test_rounding_and_deviation() -> None:
    assert round_sig(1 / 3) == 0.333333333333333
    assert round_sig(0.0) == 0.0
    assert relative_deviation(101.0, 100.0) == pytest.approx(0.01)
    assert relative_deviation(0.0, 0.0) == 0.0


def test_int_lists() -> None:
    assert parse_int_list("2,3, 5 7") == [2, 3, 5, 7]
    assert parse_int_list("") == []


def test_interval_spec_validation() -> None:
    assert IntervalSpec(lo=3, hi=7).length == 5
    with pytest.raises(ValidationError):
        IntervalSpec(lo=8, hi=7)
    with pytest.raises(ValidationError):
        IntervalSpec(lo=1, hi=7, prime_set=(2, 2))


def test_selection_validation() -> None:
    Selection(n=2, r=4, primes=(2, 3), choices=(0, 4), hi=10)
    with pytest.raises(ValidationError):
        Selection(n=2, r=4, primes=(2, 3), choices=(0, 2), hi=10)
    with pytest.raises(ValidationError):
        Selection(n=2, r=3, primes=(2, 3), choices=(0, 3), hi=10)
    with pytest.raises(ValidationError):
        Selection(n=2, r=4, primes=(2, 3), choices=(0,), hi=10)


def test_identity_report_status() -> None:
    report = IdentityReport(
        lemma_id="BN", params={}, brute_count=4, formula_value=Fraction(4), matches=True
    )
    assert report.status == "match"
    assert report.model_dump(mode="json")["formula_value"] == "4/1"
    with pytest.raises(ValidationError):
        IdentityReport(
            lemma_id="BN", params={}, brute_count=4, formula_value=Fraction(9, 2), matches=True
        )


def test_goldbach_bound_consistency() -> None:
    fields = {"z": 61, "n": 5, "s": 0.0, "u": 0.1, "lhs_literal": 1.0, "znz_bound": 1.0}
    assert GoldbachBound(lhs=2.0, passes=True, **fields).passes
    with pytest.raises(ValidationError):
        GoldbachBound(lhs=0.5, passes=True, **fields)


def test_run_config_bounds() -> None:
    assert RunConfig(command="primes").threads == 1
    with pytest.raises(ValidationError):
        RunConfig(command="primes", seed=-1)
    with pytest.raises(ValidationError):
        RunConfig(command="unknown")


def test_envelope_findings() -> None:
    clean = ReportEnvelope(command="bounds", params={}, results=[{"status": "match"}])
    assert not clean.has_findings
    dirty = ReportEnvelope(
        command="bounds", params={}, results=[{"status": "paper claim unreproduced"}]
    )
    assert dirty.has_findings
