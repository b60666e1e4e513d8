"""Trial sampler: the N-trial spreadsheet by sequential ancestral draws.

Each trial consumes uniforms from its own stream in a fixed order:

* local model: λ_E, λ_H, a, b, x, y (six uniforms);
* behavior:    λ_E, a, b, (x, y), reserved (five uniforms; the last one is
  drawn and discarded).

Categorical draws walk the atoms in order, subtracting each weight from the
uniform; the first atom that takes the remainder below zero is chosen, so a
uniform exactly on a cumulative boundary selects the next atom. A binary
outcome is +1 iff its uniform is below P(+1 | setting, λ).
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .models import OUTCOME_PAIRS, Behavior, FiniteLocalModel, SettingPolicy, TrialRecord
from .rng import TrialStream, uniform_block
from .validators import ensure_valid, validate_experiment, validate_for_estimation

logger = config.get_logger(__name__)

SampledModel = Union[FiniteLocalModel, Behavior]

LOCAL_DRAWS = 6
BEHAVIOR_DRAWS = 5


@dataclass(frozen=True)
class ExperimentConfig:
    n_trials: int
    master_seed: int
    model: SampledModel
    policy: SettingPolicy

    def digest(self) -> str:
        """SHA-256 over the seed and the model and policy digests."""

        from .storage import document_digest

        payload = {
            "master_seed": self.master_seed,
            "model": document_digest(self.model),
            "policy": document_digest(self.policy),
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


@dataclass(frozen=True, eq=False)
class Spreadsheet:
    """Columns of the N x 4 spreadsheet plus the trial index column."""

    trial: np.ndarray
    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    config_digest: str = ""

    def __len__(self) -> int:
        return int(self.trial.shape[0])

    def __getitem__(self, position: int) -> TrialRecord:
        return TrialRecord(
            int(self.trial[position]),
            int(self.a[position]),
            int(self.b[position]),
            int(self.x[position]),
            int(self.y[position]),
        )

    def __iter__(self) -> Iterator[TrialRecord]:
        for position in range(len(self)):
            yield self[position]

    @property
    def records(self) -> List[TrialRecord]:
        return list(self)

    def equals(self, other: "Spreadsheet") -> bool:
        return all(
            np.array_equal(getattr(self, name), getattr(other, name)) for name in ("trial", "a", "b", "x", "y")
        )

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord], config_digest: str = "") -> "Spreadsheet":
        columns = np.array([record.to_row() for record in records], dtype=np.int64).reshape(-1, 5)
        return cls(*(columns[:, k].copy() for k in range(5)), config_digest=config_digest)


def categorical_index(weights: Sequence[float], u: float) -> int:
    """Inverse-CDF draw over ordered atoms with half-open intervals [lo, hi)."""

    remaining = u
    for index, weight in enumerate(weights):
        remaining -= weight
        if remaining < 0:
            return index
    return _last_positive(weights)


def _last_positive(weights: Sequence[float]) -> int:
    for index in range(len(weights) - 1, -1, -1):
        if weights[index] > 0:
            return index
    return len(weights) - 1


def sample_trial(
    model: SampledModel,
    policy: SettingPolicy,
    stream: TrialStream,
    settings_override: Optional[Tuple[int, int]] = None,
) -> TrialRecord:
    """Draw one trial from *stream*.

    ``settings_override`` replaces the drawn (a, b) after their uniforms are
    consumed; every other draw is unchanged, which makes counterfactual
    re-runs of the same trial possible.
    """

    is_behavior = isinstance(model, Behavior)
    e = categorical_index(policy.source_e.weights, stream.next_uniform())
    u_hidden = None if is_behavior else stream.next_uniform()
    a = 1 + categorical_index(policy.alice_table[e], stream.next_uniform())
    b = 1 + categorical_index(policy.bob_table[e], stream.next_uniform())
    if settings_override is not None:
        a, b = settings_override

    if is_behavior:
        x, y = OUTCOME_PAIRS[categorical_index(model.block(a, b), stream.next_uniform())]
        stream.next_uniform()  # reserved
    else:
        atom = categorical_index(model.weights, u_hidden)
        x = 1 if stream.next_uniform() < model.alice_kernel[a - 1][atom] else -1
        y = 1 if stream.next_uniform() < model.bob_kernel[b - 1][atom] else -1

    return TrialRecord(stream.trial_index, a, b, x, y)


def _categorical_array(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise categorical draw; ``weights`` has shape (n, k) or (k,)."""

    weights = np.broadcast_to(weights, (u.shape[0], weights.shape[-1]))
    remaining = u.copy()
    chosen = np.full(u.shape[0], -1, dtype=np.int64)
    for index in range(weights.shape[1]):
        remaining = remaining - weights[:, index]
        hit = (chosen < 0) & (remaining < 0)
        chosen[hit] = index
    positive = weights > 0
    last_positive = np.where(
        positive.any(axis=1),
        weights.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1),
        weights.shape[1] - 1,
    )
    missing = chosen < 0
    chosen[missing] = last_positive[missing]
    return chosen


def _sample_range(
    model: SampledModel, policy: SettingPolicy, master_seed: int, bounds: Tuple[int, int]
) -> Tuple[np.ndarray, ...]:
    start, stop = bounds
    is_behavior = isinstance(model, Behavior)
    u = uniform_block(master_seed, start, stop, BEHAVIOR_DRAWS if is_behavior else LOCAL_DRAWS)

    # behaviors have no λ_H draw, so their settings start one column earlier
    first = 1 if is_behavior else 2
    e = _categorical_array(np.asarray(policy.source_e.weights, dtype=np.float64), u[:, 0])
    a = 1 + _categorical_array(np.asarray(policy.alice_table, dtype=np.float64)[e], u[:, first])
    b = 1 + _categorical_array(np.asarray(policy.bob_table, dtype=np.float64)[e], u[:, first + 1])

    if is_behavior:
        table = np.asarray(model.table, dtype=np.float64)
        joint = _categorical_array(table[2 * (a - 1) + (b - 1)], u[:, 3])
        pairs = np.asarray(OUTCOME_PAIRS, dtype=np.int64)
        x, y = pairs[joint, 0], pairs[joint, 1]
    else:
        atom = _categorical_array(np.asarray(model.weights, dtype=np.float64), u[:, 1])
        alice = np.asarray(model.alice_kernel, dtype=np.float64)
        bob = np.asarray(model.bob_kernel, dtype=np.float64)
        x = np.where(u[:, 4] < alice[a - 1, atom], 1, -1).astype(np.int64)
        y = np.where(u[:, 5] < bob[b - 1, atom], 1, -1).astype(np.int64)

    trial = np.arange(start, stop, dtype=np.int64)
    return trial, a.astype(np.int64), b.astype(np.int64), x, y


def _chunk_bounds(n_trials: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + chunk_size, n_trials)) for start in range(0, n_trials, chunk_size)]


def run_experiment(experiment: ExperimentConfig, workers: Optional[int] = None) -> Spreadsheet:
    """Sample ``n_trials`` i.i.d. trials; record i always uses stream i."""

    report = validate_experiment(experiment.n_trials, experiment.master_seed, experiment.model, experiment.policy)
    ensure_valid(experiment, report)

    starved = validate_for_estimation(experiment.policy)
    if not starved.ok:
        logger.warning("Setting policy starves some setting pairs: %s", [v.path for v in starved.violations])

    digest = experiment.digest()
    workers = workers if workers is not None else config.SAMPLER_MAX_WORKERS
    chunks = _chunk_bounds(experiment.n_trials, config.SAMPLER_CHUNK_SIZE)
    logger.info(
        "Running experiment: n=%s seed=%s chunks=%s workers=%s digest=%s",
        experiment.n_trials,
        experiment.master_seed,
        len(chunks),
        workers,
        digest,
    )

    task = partial(_sample_range, experiment.model, experiment.policy, experiment.master_seed)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves chunk order, so assembly is ordered by trial index
            parts = list(pool.map(task, chunks))
    else:
        parts = [task(bounds) for bounds in chunks]

    columns = [np.concatenate([part[k] for part in parts]) for k in range(5)]
    logger.info("Experiment finished: %s trials.", experiment.n_trials)
    return Spreadsheet(*columns, config_digest=digest)


__all__ = [
    "ExperimentConfig",
    "Spreadsheet",
    "categorical_index",
    "sample_trial",
    "run_experiment",
]
