"""Shared data models for settings, outcomes, hidden-variable models and behaviors.

Index conventions used by every table in the package (and by the JSON model
files):

* settings are the labels 1 and 2; kernel tables are indexed ``[a - 1][λ]``;
* setting pairs (blocks) are ordered (1,1), (1,2), (2,1), (2,2);
* outcome pairs inside a block are ordered (-1,-1), (-1,+1), (+1,-1), (+1,+1);
* kernels store P(outcome = +1 | setting, λ) only.

All types are frozen. Constructors accept lists and freeze them into tuples but
never validate; use :func:`src.validators.validate` for that.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, ClassVar, Literal, Tuple

Setting = Literal[1, 2]
BinaryOutcome = Literal[-1, 1]

SETTINGS: Tuple[int, int] = (1, 2)
OUTCOMES: Tuple[int, int] = (-1, 1)
SETTING_PAIRS: Tuple[Tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (2, 2))
OUTCOME_PAIRS: Tuple[Tuple[int, int], ...] = ((-1, -1), (-1, 1), (1, -1), (1, 1))
# (x1, x2, y1, y2) in lexicographic order with -1 < +1.
OUTCOME_QUADRUPLES: Tuple[Tuple[int, int, int, int], ...] = tuple(product(OUTCOMES, repeat=4))  # type: ignore[assignment]


def block_index(a: int, b: int) -> int:
    return 2 * (a - 1) + (b - 1)


def outcome_index(x: int, y: int) -> int:
    return 2 * (x == 1) + (y == 1)


def _freeze(value: Any) -> Any:
    """Recursively turn lists into tuples; anything else is left alone."""

    if isinstance(value, (list, tuple)):
        return tuple(_freeze(item) for item in value)
    return value


class _Frozen:
    """Mixin that freezes list-valued fields after dataclass init."""

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:  # type: ignore[attr-defined]
            object.__setattr__(self, name, _freeze(getattr(self, name)))


@dataclass(frozen=True)
class TrialRecord:
    """One observed 4-tuple (a, b, x, y) of the experiment spreadsheet."""

    trial_index: int
    a: int
    b: int
    x: int
    y: int

    def to_row(self) -> Tuple[int, int, int, int, int]:
        return (self.trial_index, self.a, self.b, self.x, self.y)


@dataclass(frozen=True)
class Source(_Frozen):
    """A finite random source: labels with probability weights."""

    labels: Tuple[str, ...]
    weights: Tuple[float, ...]

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class FiniteLocalModel(_Frozen):
    """Finite hidden space Λ with per-side response kernels P(+1 | setting, λ)."""

    KIND: ClassVar[str] = "local"

    lambda_labels: Tuple[str, ...]
    weights: Tuple[float, ...]
    alice_kernel: Tuple[Tuple[float, ...], ...]
    bob_kernel: Tuple[Tuple[float, ...], ...]

    @property
    def size(self) -> int:
        return len(self.lambda_labels)

    def p_alice(self, x: int, a: int, atom: int) -> float:
        """P(X = x | A = a, λ = atom)."""

        p_plus = self.alice_kernel[a - 1][atom]
        return p_plus if x == 1 else 1.0 - p_plus

    def p_bob(self, y: int, b: int, atom: int) -> float:
        """P(Y = y | B = b, λ = atom)."""

        p_plus = self.bob_kernel[b - 1][atom]
        return p_plus if y == 1 else 1.0 - p_plus


@dataclass(frozen=True)
class FactoredContextualModel(_Frozen):
    """Separate sources Λ_H, Λ_X, Λ_Y with deterministic response tables.

    ``f[a - 1][h][i]`` is X for setting a, λ_H atom h and λ_X atom i;
    ``g[b - 1][h][j]`` is Y for setting b, λ_H atom h and λ_Y atom j.
    """

    KIND: ClassVar[str] = "factored"

    source_h: Source
    source_x: Source
    source_y: Source
    f: Tuple[Tuple[Tuple[int, ...], ...], ...]
    g: Tuple[Tuple[Tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class SettingPolicy(_Frozen):
    """Experimenter source Λ_E with per-atom setting distributions.

    ``alice_table[e]`` is (P(A=1 | λ_E=e), P(A=2 | λ_E=e)); likewise for Bob.
    """

    KIND: ClassVar[str] = "policy"

    source_e: Source
    alice_table: Tuple[Tuple[float, float], ...]
    bob_table: Tuple[Tuple[float, float], ...]

    def joint(self) -> Tuple[float, float, float, float]:
        """p(a, b) for the four setting pairs, in block order."""

        cells = []
        for a, b in SETTING_PAIRS:
            cells.append(
                sum(
                    weight * self.alice_table[e][a - 1] * self.bob_table[e][b - 1]
                    for e, weight in enumerate(self.source_e.weights)
                )
            )
        return tuple(cells)  # type: ignore[return-value]


@dataclass(frozen=True)
class Behavior(_Frozen):
    """A joint conditional table P(x, y | a, b); possibly non-local."""

    KIND: ClassVar[str] = "behavior"

    table: Tuple[Tuple[float, float, float, float], ...]

    def prob(self, x: int, y: int, a: int, b: int) -> float:
        return self.table[block_index(a, b)][outcome_index(x, y)]

    def block(self, a: int, b: int) -> Tuple[float, float, float, float]:
        return self.table[block_index(a, b)]


@dataclass(frozen=True)
class CorrelationVector:
    """The four correlations E(XY | A=a, B=b)."""

    e11: float
    e12: float
    e21: float
    e22: float

    def get(self, a: int, b: int) -> float:
        return self.as_tuple()[block_index(a, b)]

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.e11, self.e12, self.e21, self.e22)

    def as_dict(self) -> dict:
        return {"e11": self.e11, "e12": self.e12, "e21": self.e21, "e22": self.e22}

    @classmethod
    def from_sequence(cls, values) -> "CorrelationVector":
        e11, e12, e21, e22 = (float(value) for value in values)
        return cls(e11, e12, e21, e22)


@dataclass(frozen=True)
class ContinuousLocalModel(_Frozen):
    """Local model whose outcomes are conditional expectations μ ∈ [-1, 1]."""

    KIND: ClassVar[str] = "continuous"

    lambda_labels: Tuple[str, ...]
    weights: Tuple[float, ...]
    alice_mu: Tuple[Tuple[float, ...], ...]
    bob_mu: Tuple[Tuple[float, ...], ...]


@dataclass(frozen=True)
class TernaryLocalModel(_Frozen):
    """Local model with outcomes in {-1, 0, +1}.

    ``alice_probs[a - 1][λ]`` is the triple (P(-1), P(0), P(+1)).
    """

    KIND: ClassVar[str] = "ternary"

    lambda_labels: Tuple[str, ...]
    weights: Tuple[float, ...]
    alice_probs: Tuple[Tuple[Tuple[float, float, float], ...], ...]
    bob_probs: Tuple[Tuple[Tuple[float, float, float], ...], ...]


__all__ = [
    "Setting",
    "BinaryOutcome",
    "SETTINGS",
    "OUTCOMES",
    "SETTING_PAIRS",
    "OUTCOME_PAIRS",
    "OUTCOME_QUADRUPLES",
    "block_index",
    "outcome_index",
    "TrialRecord",
    "Source",
    "FiniteLocalModel",
    "FactoredContextualModel",
    "SettingPolicy",
    "Behavior",
    "CorrelationVector",
    "ContinuousLocalModel",
    "TernaryLocalModel",
]
