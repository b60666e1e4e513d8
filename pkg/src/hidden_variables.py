"""Operations on hidden-variable models: merging sources and marginalizing Λ."""

from __future__ import annotations

from itertools import product
from typing import List

from . import config
from .models import (
    OUTCOME_PAIRS,
    SETTING_PAIRS,
    SETTINGS,
    Behavior,
    CorrelationVector,
    FactoredContextualModel,
    FiniteLocalModel,
)
from .summation import ordered_sum
from .validators import ensure_valid

logger = config.get_logger(__name__)


def flatten(factored: FactoredContextualModel) -> FiniteLocalModel:
    """Merge (Λ_H, Λ_X, Λ_Y) into one hidden space Λ with indicator kernels.

    Atoms are ordered with λ_H outermost and λ_Y innermost; labels join the
    three component labels with ``|``.
    """

    ensure_valid(factored)
    h_source, x_source, y_source = factored.source_h, factored.source_x, factored.source_y

    labels: List[str] = []
    weights: List[float] = []
    alice: List[List[float]] = [[], []]
    bob: List[List[float]] = [[], []]
    for h, i, j in product(range(h_source.size), range(x_source.size), range(y_source.size)):
        labels.append(f"{h_source.labels[h]}|{x_source.labels[i]}|{y_source.labels[j]}")
        weights.append(h_source.weights[h] * x_source.weights[i] * y_source.weights[j])
        for setting in SETTINGS:
            # Alice's entry ignores λ_Y and Bob's ignores λ_X.
            alice[setting - 1].append(1.0 if factored.f[setting - 1][h][i] == 1 else 0.0)
            bob[setting - 1].append(1.0 if factored.g[setting - 1][h][j] == 1 else 0.0)

    logger.info(
        "Flattened factored model %sx%sx%s into %s atoms.",
        h_source.size,
        x_source.size,
        y_source.size,
        len(labels),
    )
    return FiniteLocalModel(labels, weights, alice, bob)


def behavior_of(model: FiniteLocalModel) -> Behavior:
    """P(x, y | a, b) = Σ_λ p(λ) P(x | a, λ) P(y | b, λ)."""

    ensure_valid(model)
    blocks = []
    for a, b in SETTING_PAIRS:
        blocks.append(
            tuple(
                ordered_sum(
                    weight * model.p_alice(x, a, atom) * model.p_bob(y, b, atom)
                    for atom, weight in enumerate(model.weights)
                )
                for x, y in OUTCOME_PAIRS
            )
        )
    return Behavior(blocks)


def factored_behavior(factored: FactoredContextualModel) -> Behavior:
    """Behavior of a factored model by direct summation over λ_H, λ_X and λ_Y."""

    ensure_valid(factored)
    h_source, x_source, y_source = factored.source_h, factored.source_x, factored.source_y
    blocks = []
    for a, b in SETTING_PAIRS:
        cells = [0.0, 0.0, 0.0, 0.0]
        for h, h_weight in enumerate(h_source.weights):
            for i, x_weight in enumerate(x_source.weights):
                x = factored.f[a - 1][h][i]
                for j, y_weight in enumerate(y_source.weights):
                    y = factored.g[b - 1][h][j]
                    cells[OUTCOME_PAIRS.index((x, y))] += h_weight * x_weight * y_weight
        blocks.append(tuple(cells))
    return Behavior(blocks)


def factored_correlations(factored: FactoredContextualModel) -> CorrelationVector:
    """E(XY | a, b) of a factored model by direct triple summation."""

    behavior = factored_behavior(factored)
    return CorrelationVector.from_sequence(
        sum(x * y * behavior.prob(x, y, a, b) for x, y in OUTCOME_PAIRS) for a, b in SETTING_PAIRS
    )


def no_signalling_gap(behavior: Behavior) -> float:
    """Largest change of one side's marginal when the other side's setting changes."""

    ensure_valid(behavior)
    gap = 0.0
    for a in SETTINGS:
        for x in (-1, 1):
            marginals = [sum(behavior.prob(x, y, a, b) for y in (-1, 1)) for b in SETTINGS]
            gap = max(gap, abs(marginals[0] - marginals[1]))
    for b in SETTINGS:
        for y in (-1, 1):
            marginals = [sum(behavior.prob(x, y, a, b) for x in (-1, 1)) for a in SETTINGS]
            gap = max(gap, abs(marginals[0] - marginals[1]))
    return gap


__all__ = [
    "flatten",
    "behavior_of",
    "factored_behavior",
    "factored_correlations",
    "no_signalling_gap",
]
