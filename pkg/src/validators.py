"""Validation helpers for models, policies and behaviors.

Violations are data: :func:`validate` never raises and returns every problem it
finds with a machine-readable code. Operations that must reject invalid input
call :func:`ensure_valid`, which raises :class:`InvalidModelError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type

from . import config
from .errors import InvalidModelError
from .models import (
    SETTING_PAIRS,
    Behavior,
    ContinuousLocalModel,
    CorrelationVector,
    FactoredContextualModel,
    FiniteLocalModel,
    SettingPolicy,
    Source,
    TernaryLocalModel,
)

logger = config.get_logger(__name__)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    path: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"code": self.code, "path": self.path, "message": self.message}


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, path: str = "") -> None:
        self.violations.append(Violation(code, message, path))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def codes(self) -> List[str]:
        return [violation.code for violation in self.violations]

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.ok, "violations": [violation.to_dict() for violation in self.violations]}


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool) and math.isfinite(float(value))


def _tolerance() -> float:
    return config.NORMALIZATION_TOLERANCE


class Check:
    """One invariant family; appends violations to the report."""

    def run(self, obj: Any, report: ValidationReport) -> None:  # pragma: no cover - interface
        raise NotImplementedError


class SourceCheck(Check):
    """Labels distinct, weights finite, nonnegative and normalized."""

    def __init__(self, labels: Callable[[Any], Sequence], weights: Callable[[Any], Sequence], path: str):
        self.labels = labels
        self.weights = weights
        self.path = path

    def run(self, obj: Any, report: ValidationReport) -> None:
        labels = list(self.labels(obj))
        weights = list(self.weights(obj))
        prefix = f"{self.path}." if self.path else ""

        if not labels:
            report.add("EMPTY_SOURCE", "hidden space has no atoms", f"{prefix}labels")
        if len(set(labels)) != len(labels):
            report.add("LABELS_NOT_DISTINCT", "labels must be distinct", f"{prefix}labels")
        if len(weights) != len(labels):
            report.add(
                "LENGTH_MISMATCH",
                f"{len(weights)} weights for {len(labels)} labels",
                f"{prefix}weights",
            )

        finite = True
        for index, weight in enumerate(weights):
            if not _is_number(weight):
                report.add("NON_FINITE", f"weight {weight!r} is not a finite number", f"{prefix}weights[{index}]")
                finite = False
            elif weight < 0:
                report.add("WEIGHT_NEGATIVE", f"weight {weight} is negative", f"{prefix}weights[{index}]")

        if finite and weights:
            total = math.fsum(weights)
            if abs(total - 1.0) > _tolerance():
                report.add("WEIGHTS_NOT_NORMALIZED", f"weights sum to {total!r}", f"{prefix}weights")


class ProbabilityTableCheck(Check):
    """A [setting][atom] table of probabilities (or expectations) of the right shape."""

    def __init__(
        self,
        table: Callable[[Any], Sequence],
        width: Callable[[Any], int],
        path: str,
        code: str = "KERNEL_OUT_OF_RANGE",
        bounds: Tuple[float, float] = (0.0, 1.0),
    ):
        self.table = table
        self.width = width
        self.path = path
        self.code = code
        self.bounds = bounds

    def run(self, obj: Any, report: ValidationReport) -> None:
        rows = list(self.table(obj))
        width = self.width(obj)
        if len(rows) != 2:
            report.add("TABLE_SHAPE", f"expected 2 setting rows, got {len(rows)}", self.path)
        low, high = self.bounds
        for setting_index, row in enumerate(rows):
            row = list(row)
            if len(row) != width:
                report.add(
                    "TABLE_SHAPE",
                    f"expected {width} entries, got {len(row)}",
                    f"{self.path}[{setting_index}]",
                )
            for atom, value in enumerate(row):
                path = f"{self.path}[{setting_index}][{atom}]"
                if not _is_number(value):
                    report.add("NON_FINITE", f"entry {value!r} is not a finite number", path)
                elif not low <= value <= high:
                    report.add(self.code, f"entry {value} outside [{low}, {high}]", path)


class TernaryTableCheck(Check):
    """A [setting][atom] table of (P(-1), P(0), P(+1)) triples."""

    def __init__(self, table: Callable[[Any], Sequence], width: Callable[[Any], int], path: str):
        self.table = table
        self.width = width
        self.path = path

    def run(self, obj: Any, report: ValidationReport) -> None:
        rows = list(self.table(obj))
        width = self.width(obj)
        if len(rows) != 2:
            report.add("TABLE_SHAPE", f"expected 2 setting rows, got {len(rows)}", self.path)
        for setting_index, row in enumerate(rows):
            row = list(row)
            if len(row) != width:
                report.add("TABLE_SHAPE", f"expected {width} entries, got {len(row)}", f"{self.path}[{setting_index}]")
            for atom, triple in enumerate(row):
                path = f"{self.path}[{setting_index}][{atom}]"
                triple = list(triple)
                if len(triple) != 3:
                    report.add("TABLE_SHAPE", f"expected 3 outcome probabilities, got {len(triple)}", path)
                    continue
                if not all(_is_number(value) for value in triple):
                    report.add("NON_FINITE", f"entries {triple!r} are not finite numbers", path)
                    continue
                if any(not 0.0 <= value <= 1.0 for value in triple):
                    report.add("KERNEL_OUT_OF_RANGE", f"entries {triple} outside [0, 1]", path)
                total = math.fsum(triple)
                if abs(total - 1.0) > _tolerance():
                    report.add("ROW_NOT_NORMALIZED", f"outcome probabilities sum to {total!r}", path)


class FunctionTableCheck(Check):
    """A deterministic response table defined on the whole product domain."""

    def __init__(self, table: Callable[[Any], Sequence], shape: Callable[[Any], Tuple[int, int]], path: str):
        self.table = table
        self.shape = shape
        self.path = path

    def run(self, obj: Any, report: ValidationReport) -> None:
        outer, inner = self.shape(obj)
        rows = list(self.table(obj))
        if len(rows) != 2:
            report.add("FUNCTION_TABLE_INCOMPLETE", f"expected 2 setting rows, got {len(rows)}", self.path)
        for setting_index, block in enumerate(rows):
            block = list(block)
            if len(block) != outer:
                report.add(
                    "FUNCTION_TABLE_INCOMPLETE",
                    f"expected {outer} shared-source rows, got {len(block)}",
                    f"{self.path}[{setting_index}]",
                )
            for h, row in enumerate(block):
                row = list(row)
                if len(row) != inner:
                    report.add(
                        "FUNCTION_TABLE_INCOMPLETE",
                        f"expected {inner} device-source entries, got {len(row)}",
                        f"{self.path}[{setting_index}][{h}]",
                    )
                for i, value in enumerate(row):
                    if isinstance(value, bool) or value not in (-1, 1):
                        report.add(
                            "OUTCOME_NOT_BINARY",
                            f"response {value!r} is not -1 or +1",
                            f"{self.path}[{setting_index}][{h}][{i}]",
                        )


class PolicyTableCheck(Check):
    """Per-λ_E setting distributions: one row per atom, each row normalized."""

    def __init__(self, table: Callable[[Any], Sequence], path: str):
        self.table = table
        self.path = path

    def run(self, obj: Any, report: ValidationReport) -> None:
        rows = list(self.table(obj))
        if len(rows) != obj.source_e.size:
            report.add("TABLE_SHAPE", f"expected {obj.source_e.size} rows, got {len(rows)}", self.path)
        for e, row in enumerate(rows):
            row = list(row)
            path = f"{self.path}[{e}]"
            if len(row) != 2:
                report.add("TABLE_SHAPE", f"expected 2 setting probabilities, got {len(row)}", path)
                continue
            if not all(_is_number(value) for value in row):
                report.add("NON_FINITE", f"entries {row!r} are not finite numbers", path)
                continue
            if any(value < 0 or value > 1 for value in row):
                report.add("PROBABILITY_OUT_OF_RANGE", f"entries {row} outside [0, 1]", path)
            total = math.fsum(row)
            if abs(total - 1.0) > _tolerance():
                report.add("ROW_NOT_NORMALIZED", f"row sums to {total!r}", path)


class BehaviorTableCheck(Check):
    def run(self, obj: Any, report: ValidationReport) -> None:
        blocks = list(obj.table)
        if len(blocks) != 4:
            report.add("TABLE_SHAPE", f"expected 4 setting blocks, got {len(blocks)}", "table")
        for index, block in enumerate(blocks):
            block = list(block)
            a, b = SETTING_PAIRS[index] if index < 4 else (0, 0)
            path = f"table[{a},{b}]"
            if len(block) != 4:
                report.add("TABLE_SHAPE", f"expected 4 outcome entries, got {len(block)}", path)
                continue
            if not all(_is_number(value) for value in block):
                report.add("NON_FINITE", f"entries {block!r} are not finite numbers", path)
                continue
            for position, value in enumerate(block):
                if value < 0:
                    report.add("ENTRY_NEGATIVE", f"entry {value} is negative", f"{path}[{position}]")
            total = math.fsum(block)
            if abs(total - 1.0) > _tolerance():
                report.add("BLOCK_NOT_NORMALIZED", f"block sums to {total!r}", path)


class CorrelationRangeCheck(Check):
    def run(self, obj: Any, report: ValidationReport) -> None:
        for name, value in obj.as_dict().items():
            if not _is_number(value):
                report.add("NON_FINITE", f"correlation {value!r} is not a finite number", name)
            elif not -1.0 - _tolerance() <= value <= 1.0 + _tolerance():
                report.add("CORRELATION_OUT_OF_RANGE", f"correlation {value} outside [-1, 1]", name)


def _source_checks(getter: Callable[[Any], Source], path: str) -> List[Check]:
    return [SourceCheck(lambda obj: getter(obj).labels, lambda obj: getter(obj).weights, path)]


def _atoms(obj: Any) -> int:
    return len(obj.lambda_labels)


_PIPELINES: Dict[Type, List[Check]] = {
    FiniteLocalModel: [
        SourceCheck(lambda obj: obj.lambda_labels, lambda obj: obj.weights, ""),
        ProbabilityTableCheck(lambda obj: obj.alice_kernel, _atoms, "alice_kernel"),
        ProbabilityTableCheck(lambda obj: obj.bob_kernel, _atoms, "bob_kernel"),
    ],
    FactoredContextualModel: [
        *_source_checks(lambda obj: obj.source_h, "source_h"),
        *_source_checks(lambda obj: obj.source_x, "source_x"),
        *_source_checks(lambda obj: obj.source_y, "source_y"),
        FunctionTableCheck(lambda obj: obj.f, lambda obj: (obj.source_h.size, obj.source_x.size), "f"),
        FunctionTableCheck(lambda obj: obj.g, lambda obj: (obj.source_h.size, obj.source_y.size), "g"),
    ],
    SettingPolicy: [
        *_source_checks(lambda obj: obj.source_e, "source_e"),
        PolicyTableCheck(lambda obj: obj.alice_table, "alice_table"),
        PolicyTableCheck(lambda obj: obj.bob_table, "bob_table"),
    ],
    Behavior: [BehaviorTableCheck()],
    ContinuousLocalModel: [
        SourceCheck(lambda obj: obj.lambda_labels, lambda obj: obj.weights, ""),
        ProbabilityTableCheck(lambda obj: obj.alice_mu, _atoms, "alice_mu", "MU_OUT_OF_RANGE", (-1.0, 1.0)),
        ProbabilityTableCheck(lambda obj: obj.bob_mu, _atoms, "bob_mu", "MU_OUT_OF_RANGE", (-1.0, 1.0)),
    ],
    TernaryLocalModel: [
        SourceCheck(lambda obj: obj.lambda_labels, lambda obj: obj.weights, ""),
        TernaryTableCheck(lambda obj: obj.alice_probs, _atoms, "alice_probs"),
        TernaryTableCheck(lambda obj: obj.bob_probs, _atoms, "bob_probs"),
    ],
    CorrelationVector: [CorrelationRangeCheck()],
}


def validate(obj: Any) -> ValidationReport:
    """Return every invariant violation of *obj*; empty iff valid. Never raises."""

    report = ValidationReport()
    checks = _PIPELINES.get(type(obj))
    if checks is None:
        report.add("UNSUPPORTED_TYPE", f"cannot validate objects of type {type(obj).__name__}")
        return report

    for check in checks:
        try:
            check.run(obj, report)
        except Exception as exc:  # malformed structure must not escape validate
            report.add("STRUCTURE_INVALID", f"{type(check).__name__}: {exc}")
    return report


def validate_for_estimation(policy: SettingPolicy) -> ValidationReport:
    """Validate *policy* and additionally require every setting pair to be reachable."""

    report = validate(policy)
    if not report.ok:
        return report
    for (a, b), probability in zip(SETTING_PAIRS, policy.joint()):
        if probability <= 0.0:
            report.add(
                "SETTING_PAIR_STARVED",
                f"p(a={a}, b={b}) = {probability!r}; correlation is not estimable",
                f"joint[{a},{b}]",
            )
    return report


def validate_experiment(n_trials: Any, master_seed: Any, model: Any, policy: Any) -> ValidationReport:
    """Validate the pieces of an experiment configuration."""

    report = ValidationReport()
    if isinstance(n_trials, bool) or not isinstance(n_trials, int) or n_trials < 1:
        report.add("N_TRIALS_INVALID", f"n_trials must be a positive integer, got {n_trials!r}", "n_trials")
    if isinstance(master_seed, bool) or not isinstance(master_seed, int) or not 0 <= master_seed < 2**64:
        report.add("SEED_OUT_OF_RANGE", f"master_seed must be a 64-bit unsigned integer, got {master_seed!r}", "master_seed")
    if not isinstance(model, (FiniteLocalModel, Behavior)):
        report.add("UNSUPPORTED_TYPE", f"experiments run local models or behaviors, got {type(model).__name__}", "model")
    else:
        report.extend(_prefixed(validate(model), "model"))
    if not isinstance(policy, SettingPolicy):
        report.add("UNSUPPORTED_TYPE", f"policy must be a SettingPolicy, got {type(policy).__name__}", "policy")
    else:
        report.extend(_prefixed(validate(policy), "policy"))
    return report


def _prefixed(report: ValidationReport, prefix: str) -> ValidationReport:
    return ValidationReport(
        [Violation(v.code, v.message, f"{prefix}.{v.path}" if v.path else prefix) for v in report.violations]
    )


def ensure_valid(obj: Any, report: Optional[ValidationReport] = None) -> None:
    """Raise InvalidModelError when *obj* (or the supplied report) has violations."""

    report = report if report is not None else validate(obj)
    if report.ok:
        return
    subject = getattr(obj, "KIND", type(obj).__name__)
    logger.warning("Rejected invalid %s: %s", subject, report.codes())
    raise InvalidModelError(report, subject=subject)


__all__ = [
    "Violation",
    "ValidationReport",
    "validate",
    "validate_for_estimation",
    "validate_experiment",
    "ensure_valid",
]
