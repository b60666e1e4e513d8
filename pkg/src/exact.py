"""Exact computation of correlations, the counterfactual joint law and CHSH values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from . import config
from .models import (
    OUTCOME_PAIRS,
    OUTCOME_QUADRUPLES,
    SETTING_PAIRS,
    Behavior,
    CorrelationVector,
    FiniteLocalModel,
)
from .summation import ordered_sum
from .validators import ensure_valid

logger = config.get_logger(__name__)

CHSH_KEYS: Tuple[str, ...] = ("11", "12", "21", "22")


@dataclass(frozen=True)
class CounterfactualJoint:
    """Joint law of (X1, X2, Y1, Y2); ``atoms`` follows OUTCOME_QUADRUPLES order."""

    atoms: Tuple[float, ...]

    def prob(self, x1: int, x2: int, y1: int, y2: int) -> float:
        return self.atoms[OUTCOME_QUADRUPLES.index((x1, x2, y1, y2))]

    def correlation(self, a: int, b: int) -> float:
        """E(X_a Y_b) from the marginal of (X_a, Y_b)."""

        return sum(
            quad[a - 1] * quad[2 + b - 1] * weight for quad, weight in zip(OUTCOME_QUADRUPLES, self.atoms)
        )

    def total(self) -> float:
        return sum(self.atoms)

    def as_dict(self) -> Dict[str, float]:
        return {_quad_key(quad): weight for quad, weight in zip(OUTCOME_QUADRUPLES, self.atoms)}


@dataclass(frozen=True)
class ChshReport:
    """The four one-against-three CHSH expressions.

    Expression k is E_k minus the sum of the other three correlations; local
    models keep every expression in [-2, +2].
    """

    expressions: Tuple[float, float, float, float]
    max_abs: float
    witness_k: str

    def expression(self, key: str) -> float:
        return self.expressions[CHSH_KEYS.index(key)]

    def as_dict(self) -> Dict[str, object]:
        return {
            "expressions": dict(zip(CHSH_KEYS, self.expressions)),
            "max_abs": self.max_abs,
            "witness_k": self.witness_k,
        }


def _quad_key(quad: Tuple[int, ...]) -> str:
    return ",".join(f"{value:+d}" for value in quad)


def chsh_expressions(values: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
    expressions = []
    for k in range(4):
        others = 0.0
        for j in range(4):
            if j != k:
                others += values[j]
        expressions.append(values[k] - others)
    return tuple(expressions)  # type: ignore[return-value]


def strongest(expressions: Tuple[float, ...]) -> Tuple[float, str]:
    """Largest absolute expression and its key; ties go to the earliest key."""

    best = 0
    for k in range(1, 4):
        if abs(expressions[k]) > abs(expressions[best]):
            best = k
    return abs(expressions[best]), CHSH_KEYS[best]


def exact_correlation(model: FiniteLocalModel, a: int, b: int) -> float:
    """Σ_λ p(λ) m_A(a, λ) m_B(b, λ) with m = 2 P(+1) - 1."""

    ensure_valid(model)
    return _correlation(model, a, b)


def _correlation(model: FiniteLocalModel, a: int, b: int) -> float:
    return ordered_sum(
        weight * (2.0 * model.alice_kernel[a - 1][atom] - 1.0) * (2.0 * model.bob_kernel[b - 1][atom] - 1.0)
        for atom, weight in enumerate(model.weights)
    )


def correlation_vector(model: FiniteLocalModel) -> CorrelationVector:
    ensure_valid(model)
    return CorrelationVector.from_sequence(_correlation(model, a, b) for a, b in SETTING_PAIRS)


def behavior_correlations(behavior: Behavior) -> CorrelationVector:
    """Σ_{x,y} x y P(x, y | a, b) for each block of a (possibly non-local) behavior."""

    ensure_valid(behavior)
    return CorrelationVector.from_sequence(
        sum(x * y * behavior.prob(x, y, a, b) for x, y in OUTCOME_PAIRS) for a, b in SETTING_PAIRS
    )


def counterfactual_joint(model: FiniteLocalModel) -> CounterfactualJoint:
    """Law of (X1, X2, Y1, Y2) obtained by mixing the product kernels over Λ."""

    ensure_valid(model)
    atoms = []
    for x1, x2, y1, y2 in OUTCOME_QUADRUPLES:
        atoms.append(
            ordered_sum(
                weight
                * model.p_alice(x1, 1, atom)
                * model.p_alice(x2, 2, atom)
                * model.p_bob(y1, 1, atom)
                * model.p_bob(y2, 2, atom)
                for atom, weight in enumerate(model.weights)
            )
        )
    return CounterfactualJoint(tuple(atoms))


def verify_identity(model: FiniteLocalModel) -> float:
    """Max over (a, b) of |E(X_a Y_b) - E(XY | A=a, B=b)|."""

    joint = counterfactual_joint(model)
    correlations = correlation_vector(model)
    discrepancy = max(abs(joint.correlation(a, b) - correlations.get(a, b)) for a, b in SETTING_PAIRS)
    if discrepancy > config.IDENTITY_TOLERANCE:
        logger.warning("Counterfactual identity discrepancy %.3e exceeds tolerance.", discrepancy)
    return discrepancy


def chsh(corr: CorrelationVector) -> ChshReport:
    ensure_valid(corr)
    expressions = chsh_expressions(corr.as_tuple())
    max_abs, witness = strongest(expressions)
    return ChshReport(expressions, max_abs, witness)


__all__ = [
    "CHSH_KEYS",
    "CounterfactualJoint",
    "ChshReport",
    "chsh_expressions",
    "strongest",
    "exact_correlation",
    "correlation_vector",
    "behavior_correlations",
    "counterfactual_joint",
    "verify_identity",
    "chsh",
]
