import importlib.util
import json
from pathlib import Path

from wiretap_kit import vectors

DATA = Path(__file__).resolve().parent / "data"


def load_reference_module():
    spec = importlib.util.spec_from_file_location("make_reference_vectors", DATA / "make_reference_vectors.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_reference_file_passes():
    doc = json.loads((DATA / "reference_vectors.json").read_text())
    assert doc["producer"] == "independent-reference"
    assert vectors.check(doc) == []
    assert vectors.count(doc) > 600


def test_reference_file_is_reproducible():
    doc = load_reference_module().build()
    stored = json.loads((DATA / "reference_vectors.json").read_text())
    assert json.loads(json.dumps(doc)) == stored


def test_emitted_vectors_self_check():
    doc = vectors.emit()
    assert vectors.check(doc) == []


def test_check_reports_mismatch():
    doc = json.loads((DATA / "reference_vectors.json").read_text())
    lse = next(s for s in doc["suites"] if s["kind"] == "lse")
    x, z, y = lse["extract"][0]
    lse["extract"][0] = [x, z, "00" if y != "00" else "11"]
    doc["suites"].append({"kind": "bogus", "params": {}})
    failures = vectors.check(doc)
    assert len(failures) == 2 and failures[-1].startswith("unknown suite")
