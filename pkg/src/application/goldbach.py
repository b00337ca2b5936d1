from __future__ import annotations

import logging
import math
import time
from functools import partial

import numpy as np

from application.sieve import iter_segments, segment_is_prime, simple_sieve
from domain.errors import DomainError
from domain.models import BoundReport
from infrastructure.workers import ordered_map

logger = logging.getLogger(__name__)

INITIAL_PARTNER_LIMIT = 2_000


def _check_even(value: int, name: str) -> None:
    if value < 4 or value % 2:
        raise DomainError(f"{name} must be an even integer >= 4, got {value}")


def _verify_block(
    bounds: tuple[int, int], base_primes: np.ndarray
) -> tuple[int, list[int], int]:
    """Check every even target in the block; return (verified, failures, largest least prime)."""
    lo, hi = bounds
    if lo % 2:
        lo += 1
    targets = np.arange(lo, hi + 1, 2, dtype=np.int64)
    least = np.zeros(targets.size, dtype=np.int64)
    partner_limit = INITIAL_PARTNER_LIMIT
    searched = 0
    while True:
        window_lo = max(lo - partner_limit, 0)
        mask = segment_is_prime(window_lo, hi, base_primes)
        candidates = simple_sieve(partner_limit)
        for p in candidates[candidates > searched].tolist():
            open_ = np.flatnonzero(least == 0)
            if open_.size == 0:
                break
            pending = targets[open_]
            usable = pending - p >= 2
            hits = np.zeros(open_.size, dtype=bool)
            hits[usable] = mask[pending[usable] - p - window_lo]
            least[open_[hits]] = p
        if not np.any(least == 0) or partner_limit >= hi:
            break
        searched = partner_limit
        partner_limit = min(partner_limit * 4, hi)
    failures = targets[least == 0].tolist()
    return int(np.count_nonzero(least)), failures, int(least.max(initial=0))


def goldbach_verify_range(
    lo: int,
    hi: int,
    block: int = 2**20,
    threads: int = 1,
    timings: dict[str, float] | None = None,
) -> BoundReport:
    """Confirm a prime pair for every even target in [lo, hi].

    Any target without one is a falsification finding, never an exception.
    Wall time and throughput go to ``timings`` when given, never the report.
    """
    _check_even(lo, "lo")
    _check_even(hi, "hi")
    if lo > hi:
        raise DomainError(f"Empty range [{lo}, {hi}]")
    started = time.perf_counter()
    base_primes = simple_sieve(math.isqrt(hi) + 1)
    blocks = list(iter_segments(lo, hi, block))
    outcomes = ordered_map(partial(_verify_block, base_primes=base_primes), blocks, threads)

    verified = sum(outcome[0] for outcome in outcomes)
    failures = [t for outcome in outcomes for t in outcome[1]]
    largest_least = max(outcome[2] for outcome in outcomes)
    elapsed = time.perf_counter() - started
    throughput = verified / elapsed if elapsed > 0 else 0.0
    logger.info(
        "goldbach_range_verified",
        extra={
            "lo": lo,
            "hi": hi,
            "blocks": len(blocks),
            "verified": verified,
            "failures": len(failures),
            "targets_per_second": throughput,
        },
    )
    report = BoundReport(
        quantity="goldbach_range",
        params={"lo": lo, "hi": hi},
        value=float(verified),
        status="pass" if not failures else "falsification",
        details={
            "targets": (hi - lo) // 2 + 1,
            "first_failure": failures[0] if failures else None,
            "failures": failures[:100],
            "largest_least_prime": largest_least,
        },
    )
    if timings is not None:
        timings["goldbach_seconds"] = round(elapsed, 6)
        timings["goldbach_targets_per_second"] = round(throughput, 3)
    return report
