"""Brute-force ground truth from the 16 deterministic strategies.

A strategy fixes (X1, X2, Y1, Y2); every finite local model is the mixture of
strategies obtained by multiplying its kernels out over Λ. Vertex arithmetic
is done in integers so the ±2 CHSH values carry no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from . import config
from .exact import CHSH_KEYS, correlation_vector, strongest
from .models import OUTCOME_QUADRUPLES, SETTING_PAIRS, CorrelationVector, FiniteLocalModel
from .summation import ordered_sum
from .validators import ensure_valid

logger = config.get_logger(__name__)


@dataclass(frozen=True)
class DeterministicStrategy:
    x1: int
    x2: int
    y1: int
    y2: int

    def outcomes(self) -> Tuple[int, int, int, int]:
        return (self.x1, self.x2, self.y1, self.y2)

    def products(self) -> Tuple[int, int, int, int]:
        """x_a * y_b for the four setting pairs, in block order."""

        xs, ys = (self.x1, self.x2), (self.y1, self.y2)
        return tuple(xs[a - 1] * ys[b - 1] for a, b in SETTING_PAIRS)  # type: ignore[return-value]

    def correlations(self) -> CorrelationVector:
        return CorrelationVector.from_sequence(self.products())

    def key(self) -> str:
        return ",".join(f"{value:+d}" for value in self.outcomes())


STRATEGIES: Tuple[DeterministicStrategy, ...] = tuple(DeterministicStrategy(*quad) for quad in OUTCOME_QUADRUPLES)


@dataclass(frozen=True)
class ConvexDecomposition:
    """Mixture weights over STRATEGIES (same order)."""

    weights: Tuple[float, ...]

    def weight(self, strategy: DeterministicStrategy) -> float:
        return self.weights[STRATEGIES.index(strategy)]

    def reconstruct(self) -> CorrelationVector:
        """Σ_s w(s) (s.x_a s.y_b) for each setting pair."""

        products = [strategy.products() for strategy in STRATEGIES]
        return CorrelationVector.from_sequence(
            ordered_sum(weight * product[cell] for weight, product in zip(self.weights, products))
            for cell in range(4)
        )

    def as_dict(self) -> Dict[str, float]:
        return {strategy.key(): weight for strategy, weight in zip(STRATEGIES, self.weights)}


@dataclass(frozen=True)
class VertexChsh:
    strategy: DeterministicStrategy
    expressions: Tuple[int, int, int, int]
    max_abs: int
    witness_k: str

    def as_dict(self) -> Dict[str, object]:
        return {
            "strategy": self.strategy.key(),
            "expressions": dict(zip(CHSH_KEYS, self.expressions)),
            "max_abs": self.max_abs,
            "witness_k": self.witness_k,
        }


def enumerate_strategies() -> List[Tuple[DeterministicStrategy, CorrelationVector]]:
    """All 2**4 strategies with their correlation vectors."""

    return [(strategy, strategy.correlations()) for strategy in STRATEGIES]


def decompose(model: FiniteLocalModel) -> ConvexDecomposition:
    """w(s) = Σ_λ p(λ) Π_a P(X = s.x_a | a, λ) Π_b P(Y = s.y_b | b, λ)."""

    ensure_valid(model)
    weights = []
    for strategy in STRATEGIES:
        weights.append(
            ordered_sum(
                weight
                * model.p_alice(strategy.x1, 1, atom)
                * model.p_alice(strategy.x2, 2, atom)
                * model.p_bob(strategy.y1, 1, atom)
                * model.p_bob(strategy.y2, 2, atom)
                for atom, weight in enumerate(model.weights)
            )
        )
    return ConvexDecomposition(tuple(weights))


def reconstruction_error(model: FiniteLocalModel, decomposition: ConvexDecomposition) -> float:
    """Max |reconstructed - exact| correlation over the four cells."""

    exact = correlation_vector(model).as_tuple()
    rebuilt = decomposition.reconstruct().as_tuple()
    return max(abs(left - right) for left, right in zip(exact, rebuilt))


def vertex_chsh_extremes() -> List[VertexChsh]:
    """CHSH expressions of every strategy, computed in integer arithmetic."""

    rows = []
    for strategy in STRATEGIES:
        products = strategy.products()
        expressions = tuple(products[k] - sum(products[j] for j in range(4) if j != k) for k in range(4))
        max_abs, witness = strongest(expressions)
        rows.append(VertexChsh(strategy, expressions, int(max_abs), witness))  # type: ignore[arg-type]

    if any(abs(value) != 2 for row in rows for value in row.expressions):
        logger.error("A deterministic strategy produced a CHSH value other than ±2.")
    return rows


__all__ = [
    "DeterministicStrategy",
    "STRATEGIES",
    "ConvexDecomposition",
    "VertexChsh",
    "enumerate_strategies",
    "decompose",
    "reconstruction_error",
    "vertex_chsh_extremes",
]
