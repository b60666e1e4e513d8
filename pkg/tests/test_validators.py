import math

import pytest

from src import zoo
from src.errors import InvalidModelError
from src.models import (
    Behavior,
    ContinuousLocalModel,
    CorrelationVector,
    FactoredContextualModel,
    FiniteLocalModel,
    SettingPolicy,
    Source,
    TernaryLocalModel,
)
from src.validators import ensure_valid, validate, validate_experiment, validate_for_estimation


def _local(weights=(0.5, 0.5), labels=("l0", "l1"), alice=None, bob=None):
    size = len(labels)
    return FiniteLocalModel(
        list(labels),
        list(weights),
        alice if alice is not None else [[0.5] * size, [0.5] * size],
        bob if bob is not None else [[0.5] * size, [0.5] * size],
    )


def test_valid_model_has_empty_report(two_atom_model):
    report = validate(two_atom_model)

    assert report.ok
    assert report.to_dict() == {"valid": True, "violations": []}


@pytest.mark.parametrize(
    "model, code",
    [
        (_local(weights=(0.6, 0.5)), "WEIGHTS_NOT_NORMALIZED"),
        (_local(weights=(1.5, -0.5)), "WEIGHT_NEGATIVE"),
        (_local(weights=(float("nan"), 0.5)), "NON_FINITE"),
        (_local(labels=("l0", "l0")), "LABELS_NOT_DISTINCT"),
        (_local(weights=(1.0,)), "LENGTH_MISMATCH"),
        (_local(weights=(), labels=()), "EMPTY_SOURCE"),
        (_local(alice=[[1.2, 0.5], [0.5, 0.5]]), "KERNEL_OUT_OF_RANGE"),
        (_local(bob=[[0.5, 0.5]]), "TABLE_SHAPE"),
    ],
)
def test_local_model_violations(model, code):
    assert code in validate(model).codes()


def test_weights_within_tolerance_are_accepted():
    assert validate(_local(weights=(0.5, 0.5 + 1e-12))).ok


def test_violation_paths_name_the_entry():
    report = validate(_local(alice=[[0.5, 0.5], [0.5, -0.1]]))

    assert [violation.path for violation in report.violations] == ["alice_kernel[1][1]"]


def test_behavior_checks():
    assert validate(zoo.pr_box()).ok

    shifted = Behavior([[0.5, 0.0, 0.0, 0.6]] + [[0.25] * 4] * 3)
    negative = Behavior([[-0.25, 0.5, 0.5, 0.25]] + [[0.25] * 4] * 3)
    assert "BLOCK_NOT_NORMALIZED" in validate(shifted).codes()
    assert "ENTRY_NEGATIVE" in validate(negative).codes()
    assert "TABLE_SHAPE" in validate(Behavior([[0.25] * 4])).codes()


def test_factored_model_requires_binary_complete_tables():
    source = Source(["s0"], [1.0])
    good = FactoredContextualModel(source, source, source, [[[1]], [[-1]]], [[[1]], [[1]]])
    zero = FactoredContextualModel(source, source, source, [[[0]], [[-1]]], [[[1]], [[1]]])
    short = FactoredContextualModel(source, source, source, [[[1]]], [[[1]], [[1]]])

    assert validate(good).ok
    assert "OUTCOME_NOT_BINARY" in validate(zero).codes()
    assert "FUNCTION_TABLE_INCOMPLETE" in validate(short).codes()


def test_policy_rows_must_be_distributions():
    source = Source(["e0"], [1.0])

    assert validate(SettingPolicy(source, [[0.5, 0.5]], [[1.0, 0.0]])).ok
    assert "ROW_NOT_NORMALIZED" in validate(SettingPolicy(source, [[0.5, 0.6]], [[1.0, 0.0]])).codes()
    assert "PROBABILITY_OUT_OF_RANGE" in validate(SettingPolicy(source, [[1.5, -0.5]], [[1.0, 0.0]])).codes()


def test_starved_policy_is_flagged_for_estimation():
    report = validate_for_estimation(zoo.fixed_policy(1, 2))

    assert report.codes().count("SETTING_PAIR_STARVED") == 3
    assert validate_for_estimation(zoo.shared_coin_policy()).ok


def test_continuous_and_ternary_ranges():
    continuous = ContinuousLocalModel(["l0"], [1.0], [[1.0], [-1.5]], [[0.0], [0.0]])
    ternary = TernaryLocalModel(["l0"], [1.0], [[(0.2, 0.2, 0.2)], [(0.0, 0.0, 1.0)]], [[(1.0, 0.0, 0.0)], [(0.5, 0.5, 0.0)]])

    assert validate(continuous).codes() == ["MU_OUT_OF_RANGE"]
    assert validate(ternary).codes() == ["ROW_NOT_NORMALIZED"]


def test_correlation_range_is_tolerant():
    assert validate(CorrelationVector(1.0 + 1e-12, -1.0, 0.0, 0.5)).ok
    assert "CORRELATION_OUT_OF_RANGE" in validate(CorrelationVector(1.1, 0.0, 0.0, 0.0)).codes()
    assert "NON_FINITE" in validate(CorrelationVector(math.inf, 0.0, 0.0, 0.0)).codes()


def test_validate_never_raises():
    assert validate("not a model").codes() == ["UNSUPPORTED_TYPE"]
    assert "STRUCTURE_INVALID" in validate(FiniteLocalModel(None, None, None, None)).codes()


def test_experiment_checks():
    report = validate_experiment(0, -1, zoo.uniform_local_model(), zoo.uniform_policy())
    assert report.codes() == ["N_TRIALS_INVALID", "SEED_OUT_OF_RANGE"]

    report = validate_experiment(10, 2**64, _local(weights=(0.7, 0.7)), zoo.uniform_policy())
    assert "SEED_OUT_OF_RANGE" in report.codes()
    assert any(violation.path == "model.weights" for violation in report.violations)


def test_ensure_valid_raises_with_report():
    with pytest.raises(InvalidModelError) as excinfo:
        ensure_valid(_local(weights=(0.6, 0.5)))

    assert excinfo.value.subject == "local"
    assert excinfo.value.report.codes() == ["WEIGHTS_NOT_NORMALIZED"]
    assert "WEIGHTS_NOT_NORMALIZED" in str(excinfo.value)
