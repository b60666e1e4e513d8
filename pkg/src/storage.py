"""Reading and writing model files, refs, spreadsheets and report documents."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import numbers
import os
import tempfile
from dataclasses import fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Tuple, Union
from urllib.parse import parse_qsl

import numpy as np

from . import config, zoo
from .errors import ModelFormatError, SpreadsheetSchemaError
from .models import (
    Behavior,
    ContinuousLocalModel,
    FactoredContextualModel,
    FiniteLocalModel,
    SettingPolicy,
    Source,
    TernaryLocalModel,
)
from .sampler import Spreadsheet

logger = config.get_logger(__name__)

FORMAT_VERSION = 1
SPREADSHEET_HEADER: Tuple[str, ...] = ("trial", "a", "b", "x", "y")
BUILTIN_PREFIX = "builtin:"

Document = Union[FiniteLocalModel, FactoredContextualModel, Behavior, SettingPolicy, ContinuousLocalModel, TernaryLocalModel]

_KINDS: Dict[str, type] = {
    cls.KIND: cls
    for cls in (FiniteLocalModel, FactoredContextualModel, Behavior, SettingPolicy, ContinuousLocalModel, TernaryLocalModel)
}
# Keys a model file may carry besides the fields of its kind.
_ANNOTATION_KEYS = frozenset({"kind", "format_version", "description"})


# ---------------------------------------------------------------------------
# Model documents
# ---------------------------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, Source):
        return {"labels": list(value.labels), "weights": _plain(value.weights)}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def model_to_document(obj: Document) -> Dict[str, Any]:
    """Plain JSON-ready dict with ``kind`` first and fields in declaration order."""

    kind = getattr(obj, "KIND", None)
    if kind not in _KINDS:
        raise ModelFormatError(f"{type(obj).__name__} has no document form")
    document: Dict[str, Any] = {"kind": kind}
    for field in fields(obj):
        document[field.name] = _plain(getattr(obj, field.name))
    return document


def _source_from(value: Any, path: str) -> Source:
    if not isinstance(value, Mapping) or set(value) != {"labels", "weights"}:
        raise ModelFormatError(f"{path}: expected an object with 'labels' and 'weights'")
    return Source(value["labels"], value["weights"])


def document_to_model(document: Any) -> Document:
    """Build the typed object a model document describes; the result is not validated."""

    if not isinstance(document, Mapping):
        raise ModelFormatError("model document must be a JSON object")
    kind = document.get("kind")
    cls = _KINDS.get(kind)  # type: ignore[arg-type]
    if cls is None:
        raise ModelFormatError(f"unknown model kind {kind!r} (known: {', '.join(_KINDS)})")

    names = [field.name for field in fields(cls)]
    missing = [name for name in names if name not in document]
    if missing:
        raise ModelFormatError(f"{kind} document is missing {', '.join(missing)}")
    extra = sorted(set(document) - set(names) - _ANNOTATION_KEYS)
    if extra:
        raise ModelFormatError(f"{kind} document has unexpected keys {', '.join(extra)}")

    values = {}
    for name in names:
        value = document[name]
        if name.startswith("source_"):
            value = _source_from(value, name)
        elif not isinstance(value, list):
            raise ModelFormatError(f"{kind}.{name}: expected a JSON array")
        values[name] = value
    return cls(**values)


def document_digest(obj: Document) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON form of *obj*."""

    canonical = json.dumps(model_to_document(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


model_digest = document_digest
behavior_digest = document_digest


def load_model_file(path: Union[str, Path]) -> Document:
    file_path = Path(path)
    try:
        with file_path.open(encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{file_path} is not valid JSON: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"{file_path} is not UTF-8 text: {exc}") from exc
    except OSError as exc:
        raise OSError(f"Unable to read model file {file_path}: {exc}") from exc
    logger.info("Loaded %s document from %s", document.get("kind") if isinstance(document, dict) else "?", file_path)
    return document_to_model(document)


def save_model_file(obj: Document, path: Union[str, Path]) -> Path:
    document = {"format_version": FORMAT_VERSION, **model_to_document(obj)}
    return _atomic_write(Path(path), lambda handle: handle.write(json.dumps(document, indent=2) + "\n"))


# ---------------------------------------------------------------------------
# Refs
# ---------------------------------------------------------------------------


def parse_builtin_ref(ref: str) -> Tuple[str, Dict[str, str]]:
    """Split ``builtin:<name>?k=v&k=v`` into the name and its parameter map."""

    body = ref[len(BUILTIN_PREFIX):]
    name, _, query = body.partition("?")
    if not name:
        raise ModelFormatError(f"builtin ref {ref!r} has no name")
    try:
        params = dict(parse_qsl(query, keep_blank_values=True, strict_parsing=bool(query)))
    except ValueError as exc:
        raise ModelFormatError(f"builtin ref {ref!r} has malformed parameters") from exc
    return name, params


def load_model_ref(ref: str) -> Document:
    """Resolve a model ref: a builtin or a JSON model file of any non-policy kind."""

    if ref.startswith(BUILTIN_PREFIX):
        name, params = parse_builtin_ref(ref)
        return zoo.builtin(name, params)
    model = load_model_file(ref)
    if isinstance(model, SettingPolicy):
        raise ModelFormatError(f"{ref} holds a setting policy, not a model")
    return model


def load_policy_ref(ref: str) -> SettingPolicy:
    if ref.startswith(BUILTIN_PREFIX):
        name, params = parse_builtin_ref(ref)
        return zoo.builtin_policy(name, params)
    policy = load_model_file(ref)
    if not isinstance(policy, SettingPolicy):
        raise ModelFormatError(f"{ref} holds a {policy.KIND} document, not a policy")
    return policy


# ---------------------------------------------------------------------------
# Atomic file output
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, write: Callable[[Any], Any]) -> Path:
    """Write through a temp file in the target directory, then rename over *path*."""

    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
    )
    try:
        with handle:
            write(handle)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise
    return path


# ---------------------------------------------------------------------------
# Spreadsheets
# ---------------------------------------------------------------------------


def write_spreadsheet_csv(spreadsheet: Spreadsheet, path: Union[str, Path]) -> Path:
    """Persist the spreadsheet as ``trial,a,b,x,y`` rows with ``\\n`` line endings."""

    target = Path(path)

    def write(handle: Any) -> None:
        writer = csv.writer(handle, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(SPREADSHEET_HEADER)
        writer.writerows(
            zip(
                spreadsheet.trial.tolist(),
                spreadsheet.a.tolist(),
                spreadsheet.b.tolist(),
                spreadsheet.x.tolist(),
                spreadsheet.y.tolist(),
            )
        )

    try:
        _atomic_write(target, write)
    except OSError as exc:
        raise OSError(f"Failed to write spreadsheet to {target}: {exc}") from exc
    logger.info("Wrote %s trials to %s", len(spreadsheet), target)
    return target


_COLUMN_DOMAINS: Dict[str, Tuple[int, ...]] = {"a": (1, 2), "b": (1, 2), "x": (-1, 1), "y": (-1, 1)}


def _parse_cell(text: str, row: int, column: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise SpreadsheetSchemaError(row, column, f"{text!r} is not an integer") from None
    domain = _COLUMN_DOMAINS.get(column)
    if domain is not None and value not in domain:
        allowed = ", ".join(str(item) for item in domain)
        raise SpreadsheetSchemaError(row, column, f"{value} is not one of {allowed}")
    if column == "trial" and value < 0:
        raise SpreadsheetSchemaError(row, column, "trial index must be non-negative")
    return value


def read_spreadsheet_csv(path: Union[str, Path]) -> Spreadsheet:
    """Parse a spreadsheet CSV; rows are numbered by file line, the header being row 1.

    The returned spreadsheet carries the SHA-256 of the file bytes as its
    ``config_digest``.
    """

    source = Path(path)
    columns: List[List[int]] = [[] for _ in SPREADSHEET_HEADER]
    try:
        digest = hashlib.sha256(source.read_bytes()).hexdigest()
        with source.open(newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None:
                raise SpreadsheetSchemaError(1, "header", "file is empty")
            if tuple(cell.strip() for cell in header) != SPREADSHEET_HEADER:
                raise SpreadsheetSchemaError(1, "header", f"expected {','.join(SPREADSHEET_HEADER)}")
            for row in reader:
                line = reader.line_num
                if not row:
                    continue
                if len(row) != len(SPREADSHEET_HEADER):
                    column = SPREADSHEET_HEADER[min(len(row), len(SPREADSHEET_HEADER) - 1)]
                    raise SpreadsheetSchemaError(line, column, f"expected 5 fields, found {len(row)}")
                for index, (column, text) in enumerate(zip(SPREADSHEET_HEADER, row)):
                    columns[index].append(_parse_cell(text.strip(), line, column))
    except csv.Error as exc:
        raise SpreadsheetSchemaError(0, "", f"malformed CSV at {source}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise SpreadsheetSchemaError(0, "", f"{source} is not UTF-8 text: {exc.reason}") from exc
    except SpreadsheetSchemaError:
        logger.error("Spreadsheet %s failed schema checks.", source)
        raise
    except OSError as exc:
        raise OSError(f"Unable to read CSV {source}: {exc}") from exc

    logger.info("Read %s trials from %s", len(columns[0]), source)
    return Spreadsheet(*(np.asarray(column, dtype=np.int64) for column in columns), config_digest=digest)


# ---------------------------------------------------------------------------
# Report documents
# ---------------------------------------------------------------------------


def _render_scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        number = float(value)
        if not math.isfinite(number):
            return "null"
        return format(number, ".17g")
    return json.dumps(str(value))


def _render(value: Any, depth: int) -> str:
    pad = "  " * (depth + 1)
    close = "  " * depth
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(key))}: {_render(item, depth + 1)}" for key, item in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_render(item, depth + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    return _render_scalar(value)


def render_document(document: Mapping[str, Any]) -> str:
    """JSON text in insertion order with floats at 17 significant digits."""

    return _render(document, 0) + "\n"


def write_document(document: Mapping[str, Any], path: Union[str, Path]) -> Path:
    target = Path(path)
    text = render_document(document)
    try:
        _atomic_write(target, lambda handle: handle.write(text))
    except OSError as exc:
        raise OSError(f"Failed to write document to {target}: {exc}") from exc
    logger.info("Wrote document to %s", target)
    return target


__all__ = [
    "FORMAT_VERSION",
    "SPREADSHEET_HEADER",
    "model_to_document",
    "document_to_model",
    "document_digest",
    "model_digest",
    "behavior_digest",
    "load_model_file",
    "save_model_file",
    "parse_builtin_ref",
    "load_model_ref",
    "load_policy_ref",
    "write_spreadsheet_csv",
    "read_spreadsheet_csv",
    "render_document",
    "write_document",
]
