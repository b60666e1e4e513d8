"""Deterministic summation over hidden-variable atoms."""

from __future__ import annotations

from typing import Iterable, List, Optional

from . import config


def ordered_sum(terms: Iterable[float], threshold: Optional[int] = None) -> float:
    """Sum *terms* in label order; above *threshold* terms use a fixed pairwise tree.

    The tree splits at ``n // 2`` recursively until a run fits the threshold, so
    the result depends only on the terms and the threshold, never on scheduling.
    """

    values: List[float] = [float(term) for term in terms]
    limit = int(threshold if threshold is not None else config.PAIRWISE_SUMMATION_THRESHOLD)
    return _pairwise(values, 0, len(values), max(1, limit))


def _pairwise(values: List[float], start: int, stop: int, limit: int) -> float:
    if stop - start <= limit:
        total = 0.0
        for index in range(start, stop):
            total += values[index]
        return total
    middle = start + (stop - start) // 2
    return _pairwise(values, start, middle, limit) + _pairwise(values, middle, stop, limit)
