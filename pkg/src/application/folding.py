from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence

import numpy as np

from application.sieve import PrimeTable, is_prime_trial, noncoprime_count, nth_prime
from domain.errors import CapacityError, DomainError, RangeError
from domain.models import BoundReport, FoldedCountRecord, IntervalSpec, Selection
from infrastructure.workers import ordered_map

logger = logging.getLogger(__name__)

MAX_ENUMERATION_N = 20


def class_mask(lo: int, hi: int, p: int, s: int) -> np.ndarray:
    """Mask over [lo, hi] of the p-sieve {h : p | h - s}."""
    mask = np.zeros(hi - lo + 1, dtype=bool)
    mask[(s - lo) % p :: p] = True
    return mask


def folded_noncoprime_mask(lo: int, hi: int, primes: Sequence[int], r: int) -> np.ndarray:
    """m in [lo, hi] with gcd(m(m - r), prod primes) != 1.

    Marked per prime as the two classes m = 0 and m = r (mod p); the sign of
    m - r never matters.
    """
    mask = np.zeros(hi - lo + 1, dtype=bool)
    for p in primes:
        mask[(-lo) % p :: p] = True
        mask[(r - lo) % p :: p] = True
    return mask


def _check_fold(r: int) -> None:
    if r % 2:
        raise DomainError(f"Fold parameter r must be even, got {r}")


def enumerate_selections(
    i: int, n: int, r: int, table: PrimeTable, enforce_host: bool = True
) -> list[Selection]:
    """All 2^n members of R([1, i], n, r); primes ascending, s = 0 before s = r.

    ``enforce_host`` requires i >= 2 p_n so the class sets stay distinct.
    """
    _check_fold(r)
    if n < 1:
        raise DomainError(f"Selections need n >= 1, got {n}")
    if n > MAX_ENUMERATION_N:
        raise CapacityError(f"2^{n} selections exceed the enumeration cap 2^{MAX_ENUMERATION_N}")
    primes = tuple(table.prime_list(n))
    if enforce_host and i < 2 * primes[-1]:
        raise DomainError(f"Host interval [1, {i}] is shorter than 2 p_n = {2 * primes[-1]}")
    return [
        Selection(n=n, r=r, primes=primes, choices=choices, lo=1, hi=i)
        for choices in itertools.product((0, r), repeat=n)
    ]


def selection_union_mask(sel: Selection) -> np.ndarray:
    mask = np.zeros(sel.length, dtype=bool)
    for p, s in zip(sel.primes, sel.choices):
        mask |= class_mask(sel.lo, sel.hi, p, s)
    return mask


def selection_union_size(sel: Selection) -> int:
    return int(np.count_nonzero(selection_union_mask(sel)))


def folded_count(i: int, n: int, r: int, table: PrimeTable) -> FoldedCountRecord:
    _check_fold(r)
    primes = table.prime_list(n)
    noncoprime = int(np.count_nonzero(folded_noncoprime_mask(1, i, primes, r)))
    return FoldedCountRecord(
        i=i, n=n, r=r, coprime_count=i - noncoprime, noncoprime_count=noncoprime
    )


def union_identity(i: int, n: int, r: int, table: PrimeTable, threads: int = 1) -> BoundReport:
    """Double union over R([1, i], n, r) against the folded non-coprime set."""
    if r > 2 * i:
        raise DomainError(f"Fold parameter r={r} exceeds 2i={2 * i}")
    selections = enumerate_selections(i, n, r, table)
    masks = ordered_map(selection_union_mask, selections, threads)
    union = np.logical_or.reduce(masks)
    folded = folded_noncoprime_mask(1, i, selections[0].primes, r)
    equal = bool(np.array_equal(union, folded))
    return BoundReport(
        quantity="union_identity",
        params={"i": i, "n": n, "r": r},
        value=float(np.count_nonzero(union)),
        status="pass" if equal else "falsification",
        details={"selections": len(selections), "folded_size": int(np.count_nonzero(folded))},
    )


def fold_symmetry(i: int, n: int, r: int, table: PrimeTable) -> BoundReport:
    """p | r implies the classes of 0 and r coincide."""
    _check_fold(r)
    per_prime = {
        str(p): bool(np.array_equal(class_mask(1, i, p, 0), class_mask(1, i, p, r)))
        for p in table.prime_list(n)
        if r % p == 0
    }
    holds = all(per_prime.values())
    return BoundReport(
        quantity="fold_symmetry",
        params={"i": i, "n": n, "r": r},
        status="pass" if holds else "falsification",
        details={"checked": per_prime},
    )


def find_shift(j: int, sel: Selection) -> int:
    """Start i_T in [1, prod P(n)] of a plain window carrying the selection's pattern.

    Position t of [i_T, i_T + j - 1] is a multiple of p exactly when
    t = s_p (mod p), so i_T = 1 - s_p (mod p) for every p; composed by CRT.
    """
    if j < 1:
        raise DomainError(f"Window length must be positive, got {j}")
    residue, modulus = 0, 1
    for p, s in zip(sel.primes, sel.choices):
        target = (1 - s) % p
        step = (target - residue) * pow(modulus, -1, p) % p
        residue += modulus * step
        modulus *= p
    return residue if residue else modulus


def shift_check(j: int, sel: Selection) -> BoundReport:
    """Locate i_T and confirm the pattern and the union-size equality."""
    start = find_shift(j, sel)
    hi = start + j - 1
    pattern_ok = all(
        np.array_equal(class_mask(start, hi, p, 0), class_mask(1, j, p, s))
        for p, s in zip(sel.primes, sel.choices)
    )
    window = Selection(n=sel.n, r=sel.r, primes=sel.primes, choices=sel.choices, lo=1, hi=j)
    union_size = selection_union_size(window)
    plain = noncoprime_count(IntervalSpec(lo=start, hi=hi, prime_set=sel.primes))
    ok = pattern_ok and union_size == plain
    return BoundReport(
        quantity="shift",
        params={"j": j, "n": sel.n, "r": sel.r, "choices": list(sel.choices)},
        value=float(start),
        status="pass" if ok else "falsification",
        details={
            "i_T": start,
            "pattern_matches": pattern_ok,
            "union_size": union_size,
            "window_noncoprime": plain,
        },
    )


def twin_pair_count(limit: int, table: PrimeTable) -> int:
    if limit > table.limit:
        raise RangeError(f"Twin count to {limit} is beyond the table limit {table.limit}")
    if limit < 5:
        return 0
    mask = table.is_prime_mask(0, limit)
    return int(np.count_nonzero(mask[2:] & mask[:-2]))


def twin_pair_count_oracle(limit: int) -> int:
    return sum(
        1 for p in range(5, limit + 1, 2) if is_prime_trial(p) and is_prime_trial(p - 2)
    )


def _check_even_target(target: int) -> None:
    if target < 4 or target % 2:
        raise DomainError(f"Goldbach targets are even integers >= 4, got {target}")


def goldbach_representations(target: int, table: PrimeTable) -> int:
    """Unordered prime pairs p <= q with p + q = target."""
    _check_even_target(target)
    if target > table.limit:
        raise RangeError(f"Target {target} is beyond the table limit {table.limit}")
    mask = table.is_prime_mask(0, target)
    half = target // 2
    return int(np.count_nonzero(mask[: half + 1] & mask[target - half :][::-1]))


def goldbach_representations_oracle(target: int) -> int:
    _check_even_target(target)
    return sum(
        1
        for p in range(2, target // 2 + 1)
        if is_prime_trial(p) and is_prime_trial(target - p)
    )


def _folded_coprime(lo: int, hi: int, primes: Sequence[int], r: int = 2) -> int:
    if hi < lo:
        return 0
    return int(np.count_nonzero(~folded_noncoprime_mask(lo, hi, primes, r)))


def twin_correspondence(n: int, i: int, table: PrimeTable) -> BoundReport:
    """Folded coprime set for r = 2 on (p_n + 2, i] against twin upper members."""
    p_n = nth_prime(n, table)
    if i > p_n * p_n:
        raise DomainError(f"i={i} exceeds p_n^2={p_n * p_n}")
    primes = table.prime_list(n)
    lo = p_n + 3
    if lo > i:
        folded = np.zeros(0, dtype=bool)
        twins = np.zeros(0, dtype=bool)
    else:
        folded = ~folded_noncoprime_mask(lo, i, primes, 2)
        prime_mask = table.is_prime_mask(lo - 2, i)
        twins = prime_mask[2:] & prime_mask[:-2]
    equal = bool(np.array_equal(folded, twins))
    twin_count = int(np.count_nonzero(twins))
    # both product ranges of the pair count over 1 < m <= i
    count_from_one = _folded_coprime(2, i, primes)
    count_from_two = _folded_coprime(2, i, primes[1:])
    return BoundReport(
        quantity="twin_correspondence",
        params={"n": n, "i": i},
        value=float(twin_count),
        status="pass" if equal else "falsification",
        details={
            "window_equal": equal,
            "twin_pairs": twin_count,
            "pair_count_k_from_1": count_from_one,
            "pair_count_k_from_2": count_from_two,
        },
    )


def goldbach_correspondence(n: int, z: int, table: PrimeTable) -> BoundReport:
    """Folded coprime set for r = 2z on (p_n, z] against Goldbach partners."""
    p_n, p_next = nth_prime(n, table), nth_prime(n + 1, table)
    if not (p_n * p_n < 2 * z < p_next * p_next):
        raise DomainError(f"z={z} is outside ({p_n}^2/2, {p_next}^2/2)")
    target = 2 * z
    if target > table.limit:
        raise RangeError(f"2z={target} is beyond the table limit {table.limit}")
    lo = p_n + 1
    folded = ~folded_noncoprime_mask(lo, z, table.prime_list(n), target)
    mask = table.is_prime_mask(0, target)
    ms = np.arange(lo, z + 1)
    partners = mask[ms] & mask[target - ms]
    subset = not bool(np.any(folded & ~partners))
    equal = bool(np.array_equal(folded, partners))
    return BoundReport(
        quantity="goldbach_correspondence",
        params={"n": n, "z": z},
        value=float(np.count_nonzero(folded)),
        status="pass" if subset else "falsification",
        details={"subset": subset, "equal": equal, "partners": int(np.count_nonzero(partners))},
    )
