import pytest

from application.goldbach import goldbach_verify_range
from domain.errors import DomainError


def test_range_verification_passes() -> None:
    report = goldbach_verify_range(4, 200_000, block=8_192)
    assert report.status == "pass"
    assert report.details["targets"] == 99_999
    assert report.value == 99_999
    assert report.details["first_failure"] is None
    assert report.details["largest_least_prime"] >= 3


def test_threads_and_blocks_do_not_change_result() -> None:
    timings: dict[str, float] = {}
    single = goldbach_verify_range(1_000_000, 1_020_000, block=2**20)
    split = goldbach_verify_range(1_000_000, 1_020_000, block=1_000, threads=4, timings=timings)
    assert single.model_dump() == split.model_dump()
    assert timings["goldbach_targets_per_second"] > 0


def test_small_targets() -> None:
    report = goldbach_verify_range(4, 8)
    assert report.value == 3
    assert report.details["largest_least_prime"] == 3


def test_range_arguments() -> None:
    with pytest.raises(DomainError):
        goldbach_verify_range(5, 10)
    with pytest.raises(DomainError):
        goldbach_verify_range(2, 10)
    with pytest.raises(DomainError):
        goldbach_verify_range(10, 4)
