from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from functools import partial

import numpy as np

from application.sieve import PrimeTable, noncoprime_count, nth_prime
from domain.errors import DomainError, RangeError
from domain.formatting import round_sig
from domain.models import BoundReport, DiscrepancyRecord, IntervalSpec
from infrastructure.workers import ordered_map

logger = logging.getLogger(__name__)

LOG2_OVER_4 = math.log(2) / 4
LOG2_TOLERANCE = 0.035
SAMPLE_PRIME_POOL = 25

Sample = tuple[tuple[int, ...], DiscrepancyRecord]


def discrepancy(i: int, k: int, primes: Sequence[int], base: int = 1) -> int:
    """Non-coprime count of [1 + k, i + k] minus that of the reference window.

    ``base`` picks the reference window: 1 gives [1, i], 0 gives [0, i - 1].
    """
    if i < 1:
        raise DomainError(f"Window length must be positive, got {i}")
    if 1 + k < 0:
        raise DomainError(f"Shifted window [{1 + k}, {i + k}] has a negative endpoint")
    if base not in (0, 1):
        raise DomainError(f"Reference window base must be 0 or 1, got {base}")
    prime_set = tuple(primes)
    shifted = noncoprime_count(IntervalSpec(lo=1 + k, hi=i + k, prime_set=prime_set))
    reference = noncoprime_count(IntervalSpec(lo=base, hi=base + i - 1, prime_set=prime_set))
    return shifted - reference


def theorem1_bound(primes: Sequence[int]) -> Fraction:
    return Fraction(5 * len(primes) ** 2, 8)


def h_value(values: Iterable[int], primes: Sequence[int]) -> int:
    """Inclusion-exclusion style sum over the prime divisors each m has in T.

    Equals the number of m sharing a factor with prod T.
    """
    total = 0
    for m in values:
        size = sum(1 for p in primes if m % p == 0)
        pairs = math.comb(size, 2)
        total += size - pairs
        if size > 2:
            total += pairs - size + 1
    return total


def noncoprime_set(values: Iterable[int], primes: Sequence[int]) -> list[int]:
    return [m for m in values if any(m % p == 0 for p in primes)]


def h_identity_check(values: Sequence[int], primes: Sequence[int]) -> BoundReport:
    h = h_value(values, primes)
    direct = len(noncoprime_set(values, primes))
    return BoundReport(
        quantity="h_identity",
        params={"size": len(values), "primes": list(primes)},
        value=float(h),
        paper_value=float(direct),
        deviation=float(h - direct),
        status="match" if h == direct else "mismatch",
    )


def h_difference_check(
    window: tuple[int, int], reference: tuple[int, int], primes: Sequence[int]
) -> BoundReport:
    """h over a window minus h over a reference against the count difference."""
    shifted = range(window[0], window[1] + 1)
    base = range(reference[0], reference[1] + 1)
    h_diff = h_value(shifted, primes) - h_value(base, primes)
    count_diff = noncoprime_count(
        IntervalSpec(lo=window[0], hi=window[1], prime_set=tuple(primes))
    ) - noncoprime_count(IntervalSpec(lo=reference[0], hi=reference[1], prime_set=tuple(primes)))
    return BoundReport(
        quantity="h_difference",
        params={"window": list(window), "reference": list(reference), "primes": list(primes)},
        value=float(h_diff),
        paper_value=float(count_diff),
        status="match" if h_diff == count_diff else "mismatch",
    )


def make_record(n: int, i: int, k: int, value: int) -> DiscrepancyRecord:
    ratio = round_sig(float(Fraction(value, n * n))) if n > 0 else 0.0
    return DiscrepancyRecord(
        n=n, i=i, k=k, discrepancy=value, bound=Fraction(5 * n * n, 8), ratio=ratio
    )


def _scan_one(n: int, table: PrimeTable, base: int) -> DiscrepancyRecord:
    p_n = nth_prime(n, table)
    half = (p_n * p_n + 1) // 2
    value = discrepancy(half, half, table.prime_list(n), base)
    return make_record(n, half, half, value)


def ratio_scan(
    n_lo: int, n_hi: int, table: PrimeTable, threads: int = 1, base: int = 1
) -> list[DiscrepancyRecord]:
    if not (4 <= n_lo <= n_hi):
        raise DomainError(f"ratio_scan needs 4 <= n_lo <= n_hi, got [{n_lo}, {n_hi}]")
    p_hi = nth_prime(n_hi, table)
    if p_hi * p_hi > table.limit:
        raise RangeError(f"p_{n_hi}^2 = {p_hi * p_hi} is beyond the table limit {table.limit}")
    records = ordered_map(
        partial(_scan_one, table=table, base=base), range(n_lo, n_hi + 1), threads
    )
    logger.info(
        "ratio_scan_finished",
        extra={"n_lo": n_lo, "n_hi": n_hi, "violations": sum(not r.within_bound for r in records)},
    )
    return records


def log2_study(records: Sequence[DiscrepancyRecord], lo: int = 150, hi: int = 200) -> BoundReport:
    ratios = [record.ratio for record in records if lo <= record.n <= hi]
    if not ratios:
        raise DomainError(f"No discrepancy records with n in [{lo}, {hi}]")
    mean = math.fsum(ratios) / len(ratios)
    deviation = mean - LOG2_OVER_4
    within = abs(deviation) <= LOG2_TOLERANCE
    return BoundReport(
        quantity="log2_study",
        params={"n_lo": lo, "n_hi": hi, "records": len(ratios)},
        value=mean,
        paper_value=LOG2_OVER_4,
        deviation=deviation,
        tolerance=LOG2_TOLERANCE,
        status="pass" if within else "paper claim unreproduced",
    )


def theorem1_sample(
    count: int,
    seed: int,
    table: PrimeTable,
    max_length: int = 10**6,
    threads: int = 1,
) -> list[Sample]:
    """Random (i, k, J) with J a subset of P(25) of size >= 4, seeded."""
    rng = np.random.default_rng(seed)
    pool = table.prime_list(SAMPLE_PRIME_POOL)
    draws = []
    for _ in range(count):
        size = int(rng.integers(4, SAMPLE_PRIME_POOL + 1))
        chosen = tuple(sorted(int(p) for p in rng.choice(pool, size=size, replace=False)))
        i = int(rng.integers(1, max_length + 1))
        k = int(rng.integers(0, max_length + 1))
        draws.append((chosen, i, k))

    def evaluate(draw: tuple[tuple[int, ...], int, int]) -> Sample:
        primes, i, k = draw
        return primes, make_record(len(primes), i, k, discrepancy(i, k, primes))

    return ordered_map(evaluate, draws, threads)
