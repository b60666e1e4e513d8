import hashlib
import json

import pytest

from src import storage, zoo
from src.errors import ModelFormatError, SpreadsheetSchemaError, UnknownModelError
from src.models import FiniteLocalModel, SettingPolicy
from src.sampler import ExperimentConfig, run_experiment

GOLDEN_SHA256 = "33f504616932b152e5b4aae75d2ce86d08007e08d1a3af841fd056554bd28112"


@pytest.mark.parametrize(
    "obj",
    [
        zoo.random_local_model(3, seed=1),
        zoo.random_factored_model(2),
        zoo.pr_box(),
        zoo.shared_coin_policy(),
        zoo.continuous_random_model(2, seed=5),
        zoo.ternary_random_model(2, seed=5),
    ],
)
def test_documents_rebuild_the_same_object(obj):
    document = json.loads(json.dumps(storage.model_to_document(obj)))

    assert document["kind"] == obj.KIND
    assert storage.document_to_model(document) == obj


def test_golden_model_file_loads(golden_model_path, two_atom_model):
    assert storage.load_model_file(golden_model_path) == two_atom_model
    assert storage.load_model_ref(str(golden_model_path)) == two_atom_model


@pytest.mark.parametrize(
    "document, message",
    [
        ([1, 2], "JSON object"),
        ({"kind": "quantum"}, "unknown model kind"),
        ({"kind": "local", "weights": [1.0]}, "missing"),
        ({"kind": "behavior", "table": [], "colour": "red"}, "unexpected keys"),
        ({"kind": "behavior", "table": "none"}, "expected a JSON array"),
        ({"kind": "policy", "source_e": [1.0], "alice_table": [], "bob_table": []}, "labels"),
    ],
)
def test_malformed_documents(document, message):
    with pytest.raises(ModelFormatError, match=message):
        storage.document_to_model(document)


def test_invalid_json_is_a_format_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ModelFormatError):
        storage.load_model_file(path)


def test_missing_model_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError):
        storage.load_model_file(tmp_path / "absent.json")


def test_save_and_load_model_file(tmp_path):
    model = zoo.random_local_model(4, seed=8)
    path = storage.save_model_file(model, tmp_path / "nested" / "model.json")

    assert json.loads(path.read_text(encoding="utf-8"))["format_version"] == storage.FORMAT_VERSION
    assert storage.load_model_file(path) == model


def test_builtin_refs():
    assert storage.parse_builtin_ref("builtin:random_local?atoms=3&seed=7") == ("random_local", {"atoms": "3", "seed": "7"})
    assert storage.parse_builtin_ref("builtin:pr_box") == ("pr_box", {})
    assert storage.load_model_ref("builtin:random_local?atoms=3&seed=7") == zoo.random_local_model(3, 7)
    assert storage.load_policy_ref("builtin:fixed?a=2&b=1") == zoo.fixed_policy(2, 1)


@pytest.mark.parametrize("ref", ["builtin:", "builtin:?atoms=2", "builtin:random_local?atoms"])
def test_malformed_builtin_refs(ref):
    with pytest.raises(ModelFormatError):
        storage.parse_builtin_ref(ref)


def test_unknown_builtin_ref():
    with pytest.raises(UnknownModelError):
        storage.load_model_ref("builtin:hidden_oracle")


def test_policy_and_model_refs_are_not_interchangeable(tmp_path):
    policy_path = storage.save_model_file(zoo.uniform_policy(), tmp_path / "policy.json")
    model_path = storage.save_model_file(zoo.uniform_local_model(), tmp_path / "model.json")

    assert isinstance(storage.load_policy_ref(str(policy_path)), SettingPolicy)
    with pytest.raises(ModelFormatError):
        storage.load_model_ref(str(policy_path))
    with pytest.raises(ModelFormatError):
        storage.load_policy_ref(str(model_path))


def test_digests_are_canonical():
    model = zoo.random_local_model(3, seed=1)
    same = FiniteLocalModel(list(model.lambda_labels), list(model.weights), model.alice_kernel, model.bob_kernel)

    assert storage.model_digest(model) == storage.model_digest(same)
    assert storage.model_digest(model) != storage.model_digest(zoo.random_local_model(3, seed=2))
    assert len(storage.behavior_digest(zoo.pr_box())) == 64


def test_golden_spreadsheet_is_reproduced_byte_for_byte(tmp_path, two_atom_model, golden_spreadsheet_path):
    spreadsheet = run_experiment(ExperimentConfig(100, 2024, two_atom_model, zoo.uniform_policy()))
    path = storage.write_spreadsheet_csv(spreadsheet, tmp_path / "golden.csv")

    produced = path.read_bytes()
    assert produced == golden_spreadsheet_path.read_bytes()
    assert hashlib.sha256(produced).hexdigest() == GOLDEN_SHA256
    assert produced.startswith(b"trial,a,b,x,y\n0,2,2,-1,-1\n")
    assert b"\r" not in produced


def test_spreadsheet_csv_round_trip(tmp_path, golden_spreadsheet_path):
    spreadsheet = storage.read_spreadsheet_csv(golden_spreadsheet_path)

    assert len(spreadsheet) == 100
    assert spreadsheet.config_digest == GOLDEN_SHA256
    storage.write_spreadsheet_csv(spreadsheet, tmp_path / "copy.csv")
    assert (tmp_path / "copy.csv").read_bytes() == golden_spreadsheet_path.read_bytes()


@pytest.mark.parametrize(
    "text, row, column",
    [
        ("trial,a,b,x,y\n0,1,1,0,1\n", 2, "x"),
        ("trial,a,b,x,y\n0,1,1,1,1\n1,3,1,1,1\n", 3, "a"),
        ("trial,a,b,x,y\n0,1,1,1,one\n", 2, "y"),
        ("trial,a,b,x,y\n-1,1,1,1,1\n", 2, "trial"),
        ("trial,a,b,x,y\n0,1,1\n", 2, "x"),
        ("trial,setting,b,x,y\n0,1,1,1,1\n", 1, "header"),
        ("", 1, "header"),
    ],
)
def test_spreadsheet_schema_errors(tmp_path, text, row, column):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")

    with pytest.raises(SpreadsheetSchemaError) as excinfo:
        storage.read_spreadsheet_csv(path)
    assert (excinfo.value.row, excinfo.value.column) == (row, column)


def test_failed_write_leaves_no_partial_file(tmp_path):
    def explode(handle):
        handle.write("partial")
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        storage._atomic_write(tmp_path / "out.json", explode)
    assert list(tmp_path.iterdir()) == []


def test_render_document_uses_seventeen_significant_digits():
    text = storage.render_document({"b": 0.1, "a": [1, True, None, float("inf")], "c": {"nested": "x"}})

    assert text == (
        "{\n"
        '  "b": 0.10000000000000001,\n'
        '  "a": [\n'
        "    1,\n"
        "    true,\n"
        "    null,\n"
        "    null\n"
        "  ],\n"
        '  "c": {\n'
        '    "nested": "x"\n'
        "  }\n"
        "}\n"
    )
    assert json.loads(text)["b"] == 0.1


def test_write_document(tmp_path):
    path = storage.write_document({"value": 0.5}, tmp_path / "reports" / "doc.json")

    assert path.read_text(encoding="utf-8") == '{\n  "value": 0.5\n}\n'
