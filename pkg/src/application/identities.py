from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from fractions import Fraction
from functools import partial, reduce
from itertools import combinations
from operator import mul
from typing import Any, Literal

import numpy as np

from application.folding import folded_noncoprime_mask
from application.sieve import DEFAULT_SEGMENT, PrimeTable, iter_segments, noncoprime_mask, totient
from domain.errors import CapacityError, DomainError
from domain.models import IdentityReport
from infrastructure.workers import ordered_map

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9
SWEEP_PRIME_POOL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
MIN_PERIOD = {"BN": 2, "CAP": 2 * 3}

Lemma = Literal["BN", "CAP"]
MaskBuilder = Callable[[int, int], np.ndarray]


def _product(values: Sequence[int]) -> int:
    return reduce(mul, values, 1)


def _check_budget(period: int, budget: int) -> None:
    if period > budget:
        raise CapacityError(f"Period {period} exceeds the enumeration budget {budget}")


def _count_over_period(period: int, build: MaskBuilder, segment_size: int) -> int:
    return sum(
        int(np.count_nonzero(build(lo, hi))) for lo, hi in iter_segments(1, period, segment_size)
    )


def _factor_union(values: Sequence[int], table: PrimeTable) -> list[int]:
    return sorted({p for d in values for p in table.factorize(d)})


def _euler_phi(values: Sequence[int], table: PrimeTable) -> Fraction:
    """phi(prod J) for pairwise coprime J."""
    return Fraction(_product([totient(d, table) for d in values]))


def _check_pairwise_coprime(values: Sequence[int]) -> None:
    if any(d < 2 for d in values):
        raise DomainError(f"Elements must be integers >= 2, got {list(values)}")
    for a, b in combinations(values, 2):
        if math.gcd(a, b) != 1:
            raise DomainError(f"{a} and {b} are not coprime")


def pair_coprime_count(
    values: Sequence[int], s: int, table: PrimeTable, segment_size: int = DEFAULT_SEGMENT
) -> int:
    """|{1 <= m <= prod J : gcd(m(m - s), prod J) = 1}| by marking."""
    primes = _factor_union(values, table)
    return _count_over_period(
        _product(values),
        lambda lo, hi: ~folded_noncoprime_mask(lo, hi, primes, s),
        segment_size,
    )


def bn_formula(values: Sequence[int], s: int, table: PrimeTable) -> Fraction:
    value = _euler_phi(values, table)
    for d in values:
        if s % d:
            value *= Fraction(d - 2, d - 1)
    return value


def bn_check(
    values: Sequence[int],
    s: int,
    table: PrimeTable,
    budget: int = DEFAULT_BUDGET,
    segment_size: int = DEFAULT_SEGMENT,
) -> IdentityReport:
    if s % 2:
        raise DomainError(f"s must be even, got {s}")
    _check_pairwise_coprime(values)
    _check_budget(_product(values), budget)
    brute = pair_coprime_count(values, s, table, segment_size)
    formula = bn_formula(values, s, table)
    return IdentityReport(
        lemma_id="BN",
        params={"J": sorted(values), "s": s},
        brute_count=brute,
        formula_value=formula,
        matches=formula == brute,
    )


def bm_check(
    values: Sequence[int],
    s: int,
    t: int,
    table: PrimeTable,
    budget: int = DEFAULT_BUDGET,
    segment_size: int = DEFAULT_SEGMENT,
) -> IdentityReport:
    """Both closed forms, both brute counts and the strict inequality between them."""
    _check_pairwise_coprime(values)
    if 2 not in values:
        raise DomainError("J must contain 2")
    if s % 2:
        raise DomainError(f"s must be even, got {s}")
    if sum(1 for d in values if s % d == 0) < 2:
        raise DomainError(f"s={s} must have at least two divisors in J")
    if [d for d in values if t % d == 0] != [2]:
        raise DomainError(f"2 must be the sole element of J dividing t={t}")
    _check_budget(_product(values), budget)

    brute_s = pair_coprime_count(values, s, table, segment_size)
    brute_t = pair_coprime_count(values, t, table, segment_size)
    phi = _euler_phi(values, table)
    first_form = phi
    second_form = phi
    for d in values:
        if d == 2:
            continue
        second_form *= Fraction(d - 2, d - 1)
        if s % d == 0:
            first_form *= Fraction(d - 2, d - 1)
    checks = {
        "first_equality": first_form == brute_s,
        "inequality": brute_s > brute_t,
        "second_equality": second_form == brute_t,
    }
    return IdentityReport(
        lemma_id="BM",
        params={"J": sorted(values), "s": s, "t": t},
        brute_count=brute_s,
        formula_value=first_form,
        matches=all(checks.values()),
        checks=checks,
        quantities={
            "brute_t": str(brute_t),
            "second_form": f"{second_form.numerator}/{second_form.denominator}",
        },
    )


def _check_cap_params(n: int, subset: Sequence[int], b: int, table: PrimeTable) -> list[int]:
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    primes = table.prime_list(n)
    if not set(subset) <= set(primes):
        raise DomainError(f"V={list(subset)} is not a subset of P({n})")
    if b < 2:
        raise DomainError(f"b must be at least 2, got {b}")
    if any(b % p == 0 for p in primes):
        raise DomainError(f"b={b} shares a factor with P({n})")
    return primes


def cap_check(
    n: int,
    subset: Sequence[int],
    b: int,
    table: PrimeTable,
    budget: int = DEFAULT_BUDGET,
    segment_size: int = DEFAULT_SEGMENT,
) -> IdentityReport:
    primes = _check_cap_params(n, subset, b, table)
    period = _product(primes) * b
    _check_budget(period, budget)
    inner = sorted(set(subset) | set(table.factorize(b)))
    outer = [p for p in primes if p not in subset]

    def both(lo: int, hi: int) -> np.ndarray:
        return noncoprime_mask(lo, hi, inner) & noncoprime_mask(lo, hi, outer)

    brute = _count_over_period(period, both, segment_size)
    outer_count = _count_over_period(
        period, lambda lo, hi: noncoprime_mask(lo, hi, outer), segment_size
    )
    density = Fraction(1)
    for q in [*subset, b]:
        density *= Fraction(q - 1, q)
    formula = (1 - density) * outer_count
    return IdentityReport(
        lemma_id="CAP",
        params={"n": n, "V": sorted(subset), "b": b},
        brute_count=brute,
        formula_value=formula,
        matches=formula == brute,
    )


def mab_check(
    n: int,
    subset: Sequence[int],
    b: int,
    chosen: Sequence[int],
    table: PrimeTable,
    budget: int = DEFAULT_BUDGET,
    segment_size: int = DEFAULT_SEGMENT,
) -> IdentityReport:
    primes = _check_cap_params(n, subset, b, table)
    a = len(set(chosen))
    if not 1 <= a < b:
        raise DomainError(f"|S| must lie in [1, {b - 1}], got {a}")
    if any(not 1 <= w <= b for w in chosen):
        raise DomainError(f"S={list(chosen)} is not a subset of [1, {b}]")
    period = _product(primes) * b
    _check_budget(period, budget)
    inner = sorted(set(subset) | set(table.factorize(b)))
    outer = [p for p in primes if p not in subset]
    steps = sorted({w * b for w in chosen})

    def marked(lo: int, hi: int) -> np.ndarray:
        mask = noncoprime_mask(lo, hi, inner)
        for step in steps:
            mask[(-lo) % step :: step] = True
        return mask & ~noncoprime_mask(lo, hi, outer)

    brute = _count_over_period(period, marked, segment_size)
    coprime_outer = _count_over_period(
        period, lambda lo, hi: ~noncoprime_mask(lo, hi, outer), segment_size
    )
    density = 1 - Fraction(a, b)
    for q in subset:
        density *= Fraction(q - 1, q)
    formula = (1 - density) * coprime_outer
    return IdentityReport(
        lemma_id="MAB",
        params={"n": n, "V": sorted(subset), "b": b, "S": sorted(set(chosen))},
        brute_count=brute,
        formula_value=formula,
        matches=formula == brute,
    )


def _check_sweep_limit(lemma: Lemma, limit: int) -> None:
    if limit < MIN_PERIOD[lemma]:
        raise CapacityError(
            f"No {lemma} instance has a period <= {limit}; the smallest is {MIN_PERIOD[lemma]}"
        )


def random_admissible_sets(seed: int, count: int, limit: int) -> list[tuple[int, ...]]:
    """Seeded sets of distinct primes with product <= limit."""
    _check_sweep_limit("BN", limit)
    rng = np.random.default_rng(seed)
    found: list[tuple[int, ...]] = []
    while len(found) < count:
        size = int(rng.integers(1, 7))
        chosen = tuple(sorted(int(p) for p in rng.choice(SWEEP_PRIME_POOL, size, replace=False)))
        if _product(chosen) <= limit:
            found.append(chosen)
    return found


def sweep_instances(
    lemma: Lemma, seed: int, count: int, limit: int, table: PrimeTable
) -> list[dict[str, Any]]:
    _check_sweep_limit(lemma, limit)
    rng = np.random.default_rng(seed)
    if lemma == "BN":
        sets = random_admissible_sets(int(rng.integers(2**63)), count, limit)
        return [{"values": J, "s": 2 * int(rng.integers(0, _product(J) + 1))} for J in sets]

    instances: list[dict[str, Any]] = []
    while len(instances) < count:
        n = int(rng.integers(1, 6))
        primes = table.prime_list(n)
        subset = [p for p in primes if rng.random() < 0.5]
        b = int(rng.choice([q for q in SWEEP_PRIME_POOL if q > primes[-1]]))
        if any(b % p == 0 for p in primes) or _product(primes) * b > limit:
            continue
        instances.append({"n": n, "subset": subset, "b": b})
    return instances


def _run_instance(
    instance: dict[str, Any], lemma: Lemma, table: PrimeTable, budget: int, segment_size: int
) -> IdentityReport:
    if lemma == "BN":
        return bn_check(instance["values"], instance["s"], table, budget, segment_size)
    return cap_check(
        instance["n"], instance["subset"], instance["b"], table, budget, segment_size
    )


def sweep(
    lemma: Lemma,
    table: PrimeTable,
    seed: int = 0,
    count: int = 200,
    limit: int = 10**7,
    threads: int = 1,
    segment_size: int = DEFAULT_SEGMENT,
) -> list[IdentityReport]:
    """Randomized admissible instances checked in parallel, reported in instance order."""
    instances = sweep_instances(lemma, seed, count, limit, table)
    reports = ordered_map(
        partial(_run_instance, lemma=lemma, table=table, budget=limit, segment_size=segment_size),
        instances,
        threads,
    )
    logger.info(
        "identity_sweep_finished",
        extra={
            "lemma": lemma,
            "instances": len(reports),
            "mismatches": sum(not report.matches for report in reports),
        },
    )
    return reports
