from __future__ import annotations

from collections.abc import Callable, Iterable
from typing import Literal, TypeVar

from joblib import Parallel, delayed

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    prefer: Literal["threads", "processes"] = "threads",
) -> list[R]:
    """Apply ``func`` to every item; results come back in input order for any ``threads``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    return list(Parallel(n_jobs=threads, prefer=prefer)(delayed(func)(item) for item in items))
