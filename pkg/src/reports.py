"""Assemble the exact, summary and oracle documents the CLI prints or saves."""

from __future__ import annotations

from typing import Any, Dict, Optional

from . import __version__, config
from .estimation import compare, estimate_cells, estimate_chsh
from .exact import behavior_correlations, chsh, correlation_vector, counterfactual_joint, verify_identity
from .hidden_variables import no_signalling_gap
from .models import Behavior, CorrelationVector
from .oracle import decompose, reconstruction_error, vertex_chsh_extremes
from .sampler import Spreadsheet
from .storage import FORMAT_VERSION, document_digest
from .zoo import to_local_model

logger = config.get_logger(__name__)

NOT_APPLICABLE = "not_applicable"


def _header(command: str) -> Dict[str, Any]:
    return {"format_version": FORMAT_VERSION, "tool_version": __version__, "command": command}


def exact_correlations(model: Any) -> CorrelationVector:
    """Correlation vector of any model class; behaviors are read off their table."""

    if isinstance(model, Behavior):
        return behavior_correlations(model)
    return correlation_vector(to_local_model(model))


def exact_report(model: Any, ref: str) -> Dict[str, Any]:
    document = _header("exact")
    document.update({"model": ref, "model_kind": model.KIND, "model_digest": document_digest(model)})

    if isinstance(model, Behavior):
        correlations = behavior_correlations(model)
        document["correlations"] = correlations.as_dict()
        document["chsh"] = chsh(correlations).as_dict()
        document["no_signalling_gap"] = no_signalling_gap(model)
        document["counterfactual_joint"] = NOT_APPLICABLE
        document["identity_discrepancy"] = NOT_APPLICABLE
        return document

    local = to_local_model(model)
    correlations = correlation_vector(local)
    joint = counterfactual_joint(local)
    document["correlations"] = correlations.as_dict()
    document["chsh"] = chsh(correlations).as_dict()
    document["counterfactual_joint"] = joint.as_dict()
    document["identity_discrepancy"] = verify_identity(local)
    return document


def summary_report(
    spreadsheet: Spreadsheet, source: str, model: Optional[Any] = None, ref: Optional[str] = None
) -> Dict[str, Any]:
    """Empirical cell estimates and CHSH; with a model, exact values and z-scores as well."""

    cells = estimate_cells(spreadsheet)
    estimate = estimate_chsh(cells)
    document = _header("analyze")
    document.update(
        {
            "input": source,
            "config_digest": spreadsheet.config_digest or None,
            "n_trials": len(spreadsheet),
            "cells": [cell.as_dict() for cell in cells],
            "chsh": estimate.as_dict(),
        }
    )
    if model is None:
        return document

    exact = exact_correlations(model)
    comparisons = compare(cells, exact)
    finite = [abs(item.z) for item in comparisons if not item.infinite]
    document["model"] = ref
    document["model_digest"] = document_digest(model)
    document["exact_correlations"] = exact.as_dict()
    document["exact_chsh"] = chsh(exact).as_dict()
    document["z_scores"] = [item.as_dict() for item in comparisons]
    document["max_abs_z"] = max(finite) if finite else None
    document["any_infinite_z"] = any(item.infinite for item in comparisons)
    logger.info("Analyzed %s trials against %s", len(spreadsheet), ref)
    return document


def oracle_report(model: Any, ref: str) -> Dict[str, Any]:
    """Strategy decomposition of a local model; behaviors raise NotLocalError."""

    local = to_local_model(model)
    decomposition = decompose(local)
    document = _header("oracle")
    document.update(
        {
            "model": ref,
            "model_kind": model.KIND,
            "model_digest": document_digest(model),
            "weights": decomposition.as_dict(),
            "weight_total": sum(decomposition.weights),
            "reconstruction_error": reconstruction_error(local, decomposition),
            "vertex_chsh": [row.as_dict() for row in vertex_chsh_extremes()],
        }
    )
    return document


__all__ = ["NOT_APPLICABLE", "exact_correlations", "exact_report", "summary_report", "oracle_report"]
