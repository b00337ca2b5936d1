from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator
from functools import cached_property, partial

import numpy as np

from domain.errors import DomainError, RangeError
from domain.models import IntervalSpec
from infrastructure.workers import ordered_map

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT = 2**20


class PrimeTable:
    """Primes up to ``limit`` with prime-count and smallest-prime-factor lookups.

    Immutable once built; safe to share between threads.
    """

    def __init__(self, limit: int, primes: np.ndarray) -> None:
        self.limit = limit
        self.primes = primes
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)

    def pi(self, x: float) -> int:
        if x > self.limit:
            raise RangeError(f"pi({x}) is beyond the table limit {self.limit}")
        if x < 2:
            return 0
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))

    def prime_list(self, count: int) -> list[int]:
        if count > self.primes.size:
            raise RangeError(f"Table holds {self.primes.size} primes, {count} requested")
        return [int(p) for p in self.primes[:count]]

    def is_prime_mask(self, lo: int, hi: int) -> np.ndarray:
        if hi > self.limit:
            raise RangeError(f"Window [{lo}, {hi}] is beyond the table limit {self.limit}")
        mask = np.zeros(hi - lo + 1, dtype=bool)
        left = int(np.searchsorted(self.primes, lo))
        right = int(np.searchsorted(self.primes, hi, side="right"))
        mask[self.primes[left:right] - lo] = True
        return mask

    @cached_property
    def spf(self) -> np.ndarray:
        spf = np.arange(self.limit + 1, dtype=np.int64)
        root = math.isqrt(self.limit)
        # descending so the smallest prime writes last
        for p in reversed(self.primes[self.primes <= root].tolist()):
            spf[p * p :: p] = p
        spf[:2] = 0
        spf.setflags(write=False)
        return spf

    def smallest_factor(self, m: int) -> int:
        if m < 2 or m > self.limit:
            raise RangeError(f"spf({m}) needs 2 <= m <= {self.limit}")
        return int(self.spf[m])

    def factorize(self, m: int) -> list[int]:
        """Distinct prime factors of ``m`` in ascending order.

        Values beyond the table fall back to trial division.
        """
        if m > self.limit:
            return trial_factors(m)
        factors: list[int] = []
        while m > 1:
            p = self.smallest_factor(m)
            factors.append(p)
            while m % p == 0:
                m //= p
        return factors


def simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def segment_is_prime(lo: int, hi: int, base_primes: np.ndarray) -> np.ndarray:
    """Primality mask for the window [lo, hi].

    ``base_primes`` must hold every prime up to sqrt(hi).
    """
    if hi < lo:
        return np.zeros(0, dtype=bool)
    mask = np.ones(hi - lo + 1, dtype=bool)
    if lo < 2:
        mask[: min(2 - lo, mask.size)] = False
    for p in base_primes.tolist():
        square = p * p
        if square > hi:
            break
        start = max(square, -(-lo // p) * p)
        mask[start - lo :: p] = False
    return mask


def _sieve_segment(bounds: tuple[int, int], base_primes: np.ndarray) -> np.ndarray:
    lo, hi = bounds
    mask = segment_is_prime(lo, hi, base_primes)
    return np.flatnonzero(mask).astype(np.int64) + lo


def iter_segments(lo: int, hi: int, size: int) -> Iterator[tuple[int, int]]:
    start = lo
    while start <= hi:
        stop = min(start + size - 1, hi)
        yield start, stop
        start = stop + 1


def build_prime_table(
    limit: int, segment_size: int = DEFAULT_SEGMENT, threads: int = 1
) -> PrimeTable:
    if limit < 2:
        raise DomainError(f"Prime table limit must be >= 2, got {limit}")
    base = simple_sieve(math.isqrt(limit))
    segments = list(iter_segments(2, limit, segment_size))
    chunks = ordered_map(partial(_sieve_segment, base_primes=base), segments, threads)
    primes = np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)
    logger.info(
        "prime_table_built",
        extra={"limit": limit, "count": int(primes.size), "segments": len(segments)},
    )
    return PrimeTable(limit, primes)


def prime_count(x: float, table: PrimeTable) -> int:
    return table.pi(x)


def nth_prime(n: int, table: PrimeTable) -> int:
    if n < 1:
        raise DomainError(f"Prime index must be positive, got {n}")
    if n > len(table):
        raise RangeError(f"Table up to {table.limit} holds {len(table)} primes, p_{n} requested")
    return int(table.primes[n - 1])


def noncoprime_mask(lo: int, hi: int, primes: Iterable[int]) -> np.ndarray:
    """Mask over [lo, hi] of integers sharing a factor with some listed prime.

    Built by marking multiples; zero is a multiple of every prime.
    """
    mask = np.zeros(hi - lo + 1, dtype=bool)
    for p in primes:
        mask[(-lo) % p :: p] = True
    return mask


def noncoprime_count(spec: IntervalSpec, segment_size: int = DEFAULT_SEGMENT) -> int:
    if not spec.prime_set:
        return 0
    total = 0
    for lo, hi in iter_segments(spec.lo, spec.hi, segment_size):
        total += int(np.count_nonzero(noncoprime_mask(lo, hi, spec.prime_set)))
    return total


def is_prime_trial(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    divisor = 3
    while divisor * divisor <= m:
        if m % divisor == 0:
            return False
        divisor += 2
    return True


def trial_factors(m: int) -> list[int]:
    """Distinct prime factors of ``m`` by trial division."""
    factors: list[int] = []
    divisor = 2
    while divisor * divisor <= m:
        if m % divisor == 0:
            factors.append(divisor)
            while m % divisor == 0:
                m //= divisor
        divisor += 1 if divisor == 2 else 2
    if m > 1:
        factors.append(m)
    return factors


def totient(m: int, table: PrimeTable) -> int:
    result = m
    for p in table.factorize(m):
        result -= result // p
    return result
