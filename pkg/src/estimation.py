"""Empirical estimation from spreadsheets: cell correlations, CHSH and z-scores."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from . import config
from .errors import EmptyCellError
from .exact import CHSH_KEYS, chsh_expressions, strongest
from .models import SETTING_PAIRS, CorrelationVector
from .sampler import Spreadsheet

logger = config.get_logger(__name__)

Z_FINITE = "OK"
Z_INFINITE = "INFINITE"


@dataclass(frozen=True)
class CellEstimate:
    a: int
    b: int
    n_ab: int
    r_hat: float
    se: float

    def as_dict(self) -> Dict[str, object]:
        return {"a": self.a, "b": self.b, "n_ab": self.n_ab, "r_hat": self.r_hat, "se": self.se}


@dataclass(frozen=True)
class ChshEstimate:
    expression_values: Tuple[float, float, float, float]
    ses: Tuple[float, float, float, float]
    max_abs: float
    witness_k: str

    def as_dict(self) -> Dict[str, object]:
        return {
            "expressions": dict(zip(CHSH_KEYS, self.expression_values)),
            "ses": dict(zip(CHSH_KEYS, self.ses)),
            "max_abs": self.max_abs,
            "witness_k": self.witness_k,
        }


@dataclass(frozen=True)
class CellComparison:
    a: int
    b: int
    z: float
    status: str = Z_FINITE

    @property
    def infinite(self) -> bool:
        return self.status == Z_INFINITE

    def as_dict(self) -> Dict[str, object]:
        return {"a": self.a, "b": self.b, "z": None if self.infinite else self.z, "status": self.status}


def estimate_cells(spreadsheet: Spreadsheet) -> Tuple[CellEstimate, ...]:
    """r_hat = Σ x y / n_ab and se = sqrt((1 - r_hat²) / n_ab) for each setting pair."""

    products = spreadsheet.x.astype(np.int64) * spreadsheet.y.astype(np.int64)
    estimates = []
    for a, b in SETTING_PAIRS:
        mask = (spreadsheet.a == a) & (spreadsheet.b == b)
        n_ab = int(np.count_nonzero(mask))
        if n_ab == 0:
            logger.error("Setting pair (%s, %s) has no trials.", a, b)
            raise EmptyCellError(a, b)
        # integer sums are exact, so the result does not depend on row order
        total = int(products[mask].sum())
        r_hat = total / n_ab
        se = math.sqrt(max(0.0, 1.0 - r_hat * r_hat) / n_ab)
        estimates.append(CellEstimate(a, b, n_ab, r_hat, se))
    return tuple(estimates)


def _require_cells(cells: Sequence[CellEstimate]) -> Dict[Tuple[int, int], CellEstimate]:
    by_pair = {(cell.a, cell.b): cell for cell in cells if cell.n_ab >= 1}
    for a, b in SETTING_PAIRS:
        if (a, b) not in by_pair:
            raise EmptyCellError(a, b)
    return by_pair


def estimate_chsh(cells: Sequence[CellEstimate]) -> ChshEstimate:
    """Plug-in CHSH expressions; SEs add in quadrature treating cells as independent."""

    by_pair = _require_cells(cells)
    values = tuple(by_pair[pair].r_hat for pair in SETTING_PAIRS)
    expressions = chsh_expressions(values)  # type: ignore[arg-type]
    # every expression uses all four cells with coefficient ±1
    se = math.sqrt(sum(by_pair[pair].se ** 2 for pair in SETTING_PAIRS))
    max_abs, witness = strongest(expressions)
    return ChshEstimate(expressions, (se, se, se, se), max_abs, witness)


def compare(cells: Sequence[CellEstimate], exact: CorrelationVector) -> Tuple[CellComparison, ...]:
    """z_ab = (r_hat - exact) / se; degenerate cells (se = 0) give 0 or INFINITE."""

    by_pair = _require_cells(cells)
    comparisons = []
    for a, b in SETTING_PAIRS:
        cell = by_pair[(a, b)]
        difference = cell.r_hat - exact.get(a, b)
        if cell.se > 0:
            comparisons.append(CellComparison(a, b, difference / cell.se))
        elif abs(difference) <= config.IDENTITY_TOLERANCE:
            comparisons.append(CellComparison(a, b, 0.0))
        else:
            comparisons.append(CellComparison(a, b, math.copysign(math.inf, difference), Z_INFINITE))
    return tuple(comparisons)


def cells_to_vector(cells: Sequence[CellEstimate]) -> CorrelationVector:
    by_pair = _require_cells(cells)
    return CorrelationVector.from_sequence(by_pair[pair].r_hat for pair in SETTING_PAIRS)


__all__ = [
    "CellEstimate",
    "ChshEstimate",
    "CellComparison",
    "estimate_cells",
    "estimate_chsh",
    "compare",
    "cells_to_vector",
]
