"""Named constructors for model classes, foils and setting policies.

Builtins are addressed by name with a key-value parameter map (the CLI passes
them as ``builtin:<name>?k=v&k=v``). ``random_*`` constructors are pure
functions of their ``seed`` parameter.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from . import config
from .errors import MissingParamError, ModelFormatError, NotLocalError, OutOfRangeError, UnknownModelError
from .hidden_variables import flatten
from .models import (
    OUTCOME_PAIRS,
    SETTING_PAIRS,
    Behavior,
    ContinuousLocalModel,
    FactoredContextualModel,
    FiniteLocalModel,
    SettingPolicy,
    Source,
    TernaryLocalModel,
)
from .validators import ensure_valid

logger = config.get_logger(__name__)

# Settings (α1, α2; β1, β2) at which the singlet reaches 2√2.
OPTIMAL_ANGLES: Tuple[float, float, float, float] = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)

Built = Union[FiniteLocalModel, FactoredContextualModel, Behavior, ContinuousLocalModel, TernaryLocalModel]

_REQUIRED = object()


def _param(builtin: str, params: Mapping[str, Any], name: str, cast: Callable[[Any], Any], default: Any = _REQUIRED) -> Any:
    if name not in params:
        if default is _REQUIRED:
            raise MissingParamError(builtin, name)
        return default
    try:
        return cast(params[name])
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"{builtin}: parameter {name!r}={params[name]!r} is invalid ({exc})") from exc


def _outcome(value: Any) -> int:
    outcome = int(value)
    if outcome not in (-1, 1):
        raise ValueError("outcome must be -1 or +1")
    return outcome


def _positive_int(value: Any) -> int:
    number = int(value)
    if number < 1:
        raise ValueError("must be a positive integer")
    return number


def _seed(value: Any) -> int:
    number = int(value)
    if not 0 <= number < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return number


def _finite_float(value: Any) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ValueError("must be a finite number")
    return number


def _labels(prefix: str, count: int) -> Tuple[str, ...]:
    return tuple(f"{prefix}{index}" for index in range(count))


def _simplex_weights(rng: np.random.Generator, atoms: int) -> list:
    """Flat Dirichlet draw via normalized exponentials."""

    raw = rng.exponential(size=atoms)
    return (raw / raw.sum()).tolist()


# ---------------------------------------------------------------------------
# Model constructors
# ---------------------------------------------------------------------------


def deterministic_model(x1: int, x2: int, y1: int, y2: int) -> FiniteLocalModel:
    """One-atom model that always answers (x1, x2) on Alice's side and (y1, y2) on Bob's."""

    return FiniteLocalModel(
        ("s",),
        (1.0,),
        [[1.0 if x1 == 1 else 0.0], [1.0 if x2 == 1 else 0.0]],
        [[1.0 if y1 == 1 else 0.0], [1.0 if y2 == 1 else 0.0]],
    )


def uniform_local_model(atoms: int = 1) -> FiniteLocalModel:
    return FiniteLocalModel(
        _labels("l", atoms),
        [1.0 / atoms] * atoms,
        [[0.5] * atoms, [0.5] * atoms],
        [[0.5] * atoms, [0.5] * atoms],
    )


def random_local_model(atoms: int, seed: int) -> FiniteLocalModel:
    rng = np.random.default_rng(seed)
    weights = _simplex_weights(rng, atoms)
    alice = rng.uniform(0.0, 1.0, size=(2, atoms)).tolist()
    bob = rng.uniform(0.0, 1.0, size=(2, atoms)).tolist()
    return FiniteLocalModel(_labels("l", atoms), weights, alice, bob)


def random_factored_model(seed: int, h_atoms: int = 2, x_atoms: int = 3, y_atoms: int = 2) -> FactoredContextualModel:
    """Setting-contextual device variables: X = f(A, λ_H, λ_X), Y = g(B, λ_H, λ_Y)."""

    rng = np.random.default_rng(seed)
    source_h = Source(_labels("h", h_atoms), _simplex_weights(rng, h_atoms))
    source_x = Source(_labels("x", x_atoms), _simplex_weights(rng, x_atoms))
    source_y = Source(_labels("y", y_atoms), _simplex_weights(rng, y_atoms))
    f = rng.choice([-1, 1], size=(2, h_atoms, x_atoms)).tolist()
    g = rng.choice([-1, 1], size=(2, h_atoms, y_atoms)).tolist()
    return FactoredContextualModel(source_h, source_x, source_y, f, g)


def pr_box() -> Behavior:
    """x·y = +1 with certainty except in block (2,2), where x·y = -1."""

    blocks = []
    for a, b in SETTING_PAIRS:
        sign = -1 if (a, b) == (2, 2) else 1
        blocks.append(tuple(0.5 if x * y == sign else 0.0 for x, y in OUTCOME_PAIRS))
    return Behavior(blocks)


def singlet_behavior(alpha1: float, alpha2: float, beta1: float, beta2: float) -> Behavior:
    """P(x, y | a, b) = (1 + x y E_ab) / 4 with E_ab = -cos(α_a - β_b)."""

    alphas, betas = (alpha1, alpha2), (beta1, beta2)
    if not all(math.isfinite(angle) for angle in alphas + betas):
        raise OutOfRangeError(f"singlet angles must be finite, got {alphas + betas!r}")
    blocks = []
    for a, b in SETTING_PAIRS:
        correlation = -math.cos(alphas[a - 1] - betas[b - 1])
        blocks.append(tuple((1.0 + x * y * correlation) / 4.0 for x, y in OUTCOME_PAIRS))
    behavior = Behavior(blocks)
    ensure_valid(behavior)
    return behavior


def continuous_random_model(atoms: int, seed: int) -> ContinuousLocalModel:
    rng = np.random.default_rng(seed)
    weights = _simplex_weights(rng, atoms)
    alice = rng.uniform(-1.0, 1.0, size=(2, atoms)).tolist()
    bob = rng.uniform(-1.0, 1.0, size=(2, atoms)).tolist()
    return ContinuousLocalModel(_labels("l", atoms), weights, alice, bob)


def ternary_random_model(atoms: int, seed: int) -> TernaryLocalModel:
    rng = np.random.default_rng(seed)
    weights = _simplex_weights(rng, atoms)
    alice = rng.dirichlet(np.ones(3), size=(2, atoms)).tolist()
    bob = rng.dirichlet(np.ones(3), size=(2, atoms)).tolist()
    return TernaryLocalModel(_labels("l", atoms), weights, alice, bob)


# ---------------------------------------------------------------------------
# Expectation realization
# ---------------------------------------------------------------------------


def realize_expectation(mu: float, u: float) -> int:
    """+1 iff u < (1 + mu) / 2; averaging over a uniform u gives exactly mu."""

    if not (isinstance(mu, (int, float)) and -1.0 <= mu <= 1.0):
        raise OutOfRangeError(f"mu must lie in [-1, 1], got {mu!r}")
    if not 0.0 <= u < 1.0:
        raise OutOfRangeError(f"u must lie in [0, 1), got {u!r}")
    return 1 if u < (1.0 + mu) / 2.0 else -1


def realize_ternary(p_minus: float, p_zero: float, u: float) -> int:
    """Three-way threshold: -1 below p_minus, 0 below p_minus + p_zero, else +1."""

    if not 0.0 <= u < 1.0:
        raise OutOfRangeError(f"u must lie in [0, 1), got {u!r}")
    if u < p_minus:
        return -1
    if u < p_minus + p_zero:
        return 0
    return 1


def binarize(model: ContinuousLocalModel) -> FiniteLocalModel:
    """Integrate out the auxiliary uniform: P(+1 | a, λ) = (1 + μ_A(a, λ)) / 2."""

    ensure_valid(model)
    alice = [[(1.0 + mu) / 2.0 for mu in row] for row in model.alice_mu]
    bob = [[(1.0 + mu) / 2.0 for mu in row] for row in model.bob_mu]
    return FiniteLocalModel(model.lambda_labels, model.weights, alice, bob)


def ternary_to_continuous(model: TernaryLocalModel) -> ContinuousLocalModel:
    """Replace each ternary outcome law by its expectation p(+1) - p(-1)."""

    ensure_valid(model)
    alice = [[p_plus - p_minus for p_minus, _, p_plus in row] for row in model.alice_probs]
    bob = [[p_plus - p_minus for p_minus, _, p_plus in row] for row in model.bob_probs]
    return ContinuousLocalModel(model.lambda_labels, model.weights, alice, bob)


def to_local_model(model: Built) -> FiniteLocalModel:
    """Reduce any local model class to a FiniteLocalModel; behaviors are rejected."""

    if isinstance(model, FiniteLocalModel):
        return model
    if isinstance(model, FactoredContextualModel):
        return flatten(model)
    if isinstance(model, ContinuousLocalModel):
        return binarize(model)
    if isinstance(model, TernaryLocalModel):
        return binarize(ternary_to_continuous(model))
    raise NotLocalError(f"{type(model).__name__} has no local-model representation")


# ---------------------------------------------------------------------------
# Setting policies
# ---------------------------------------------------------------------------


def uniform_policy() -> SettingPolicy:
    """Independent fair coins on both sides."""

    return SettingPolicy(Source(("e0",), (1.0,)), [[0.5, 0.5]], [[0.5, 0.5]])


def fixed_policy(a: int, b: int) -> SettingPolicy:
    alice = [1.0, 0.0] if a == 1 else [0.0, 1.0]
    bob = [1.0, 0.0] if b == 1 else [0.0, 1.0]
    return SettingPolicy(Source(("e0",), (1.0,)), [alice], [bob])


def shared_coin_policy(bias: float = 0.8) -> SettingPolicy:
    """λ_E is a fair bit; each side picks setting λ_E + 1 with probability *bias*."""

    alice = [[bias, 1.0 - bias], [1.0 - bias, bias]]
    return SettingPolicy(Source(("e0", "e1"), (0.5, 0.5)), alice, [list(row) for row in alice])


def policy_joint(policy: SettingPolicy) -> Tuple[float, float, float, float]:
    """p(a, b) over the four setting pairs, in block order."""

    ensure_valid(policy)
    return policy.joint()


def _setting(value: Any) -> int:
    setting = int(value)
    if setting not in (1, 2):
        raise ValueError("setting must be 1 or 2")
    return setting


def _probability(value: Any) -> float:
    number = float(value)
    if not 0.0 <= number <= 1.0:
        raise ValueError("must lie in [0, 1]")
    return number


# ---------------------------------------------------------------------------
# Registries
# ---------------------------------------------------------------------------


Builder = Callable[[str, Mapping[str, Any]], Any]


class BuiltinRegistry:
    """Name -> constructor table with parameter checking."""

    def __init__(self, kind: str, builders: Dict[str, Builder]):
        self.kind = kind
        self._builders = dict(builders)

    def names(self) -> Tuple[str, ...]:
        return tuple(self._builders)

    def build(self, name: str, params: Optional[Mapping[str, Any]] = None) -> Any:
        builder = self._builders.get(name)
        if builder is None:
            raise UnknownModelError(name, self.names())
        built = builder(name, params or {})
        logger.info("Built %s %r with params %s", self.kind, name, dict(params or {}))
        return built


_MODEL_BUILDERS: Dict[str, Builder] = {
    "deterministic": lambda name, p: deterministic_model(
        *(_param(name, p, key, _outcome) for key in ("x1", "x2", "y1", "y2"))
    ),
    "random_local": lambda name, p: random_local_model(
        _param(name, p, "atoms", _positive_int), _param(name, p, "seed", _seed)
    ),
    "uniform_local": lambda name, p: uniform_local_model(_param(name, p, "atoms", _positive_int, 1)),
    "kupczynski_factored": lambda name, p: random_factored_model(
        _param(name, p, "seed", _seed),
        _param(name, p, "h_atoms", _positive_int, 2),
        _param(name, p, "x_atoms", _positive_int, 3),
        _param(name, p, "y_atoms", _positive_int, 2),
    ),
    "pr_box": lambda name, p: pr_box(),
    "singlet": lambda name, p: singlet_behavior(
        *(
            _param(name, p, key, _finite_float, default)
            for key, default in zip(("alpha1", "alpha2", "beta1", "beta2"), OPTIMAL_ANGLES)
        )
    ),
    "continuous_random": lambda name, p: continuous_random_model(
        _param(name, p, "atoms", _positive_int), _param(name, p, "seed", _seed)
    ),
    "ternary_random": lambda name, p: ternary_random_model(
        _param(name, p, "atoms", _positive_int), _param(name, p, "seed", _seed)
    ),
}

_POLICY_BUILDERS: Dict[str, Builder] = {
    "uniform": lambda name, p: uniform_policy(),
    "fixed": lambda name, p: fixed_policy(_param(name, p, "a", _setting), _param(name, p, "b", _setting)),
    "shared_coin": lambda name, p: shared_coin_policy(_param(name, p, "bias", _probability, 0.8)),
}

_MODEL_REGISTRY: Optional[BuiltinRegistry] = None
_POLICY_REGISTRY: Optional[BuiltinRegistry] = None


def get_registry() -> BuiltinRegistry:
    global _MODEL_REGISTRY
    if _MODEL_REGISTRY is None:
        _MODEL_REGISTRY = BuiltinRegistry("model", _MODEL_BUILDERS)
    return _MODEL_REGISTRY


def get_policy_registry() -> BuiltinRegistry:
    global _POLICY_REGISTRY
    if _POLICY_REGISTRY is None:
        _POLICY_REGISTRY = BuiltinRegistry("policy", _POLICY_BUILDERS)
    return _POLICY_REGISTRY


def builtin(name: str, params: Optional[Mapping[str, Any]] = None) -> Built:
    """Construct the registered model or behavior *name*."""

    return get_registry().build(name, params)


def builtin_policy(name: str, params: Optional[Mapping[str, Any]] = None) -> SettingPolicy:
    return get_policy_registry().build(name, params)


__all__ = [
    "OPTIMAL_ANGLES",
    "deterministic_model",
    "uniform_local_model",
    "random_local_model",
    "random_factored_model",
    "pr_box",
    "singlet_behavior",
    "continuous_random_model",
    "ternary_random_model",
    "realize_expectation",
    "realize_ternary",
    "binarize",
    "ternary_to_continuous",
    "to_local_model",
    "uniform_policy",
    "fixed_policy",
    "shared_coin_policy",
    "policy_joint",
    "BuiltinRegistry",
    "get_registry",
    "get_policy_registry",
    "builtin",
    "builtin_policy",
]
