from __future__ import annotations

import copy
import csv
import json
from pathlib import Path

import jsonschema
import pytest

from ajtlab.ajt import verdict
from ajtlab.lemma import check_all
from ajtlab.matrix import MatrixFp
from ajtlab.report import (
    EnvelopeError,
    canonical_bytes,
    dumps,
    load_envelope,
    load_schema,
    make_envelope,
    payload_checksum,
    verdict_payload,
    verify_envelope,
    write_atomic,
    write_scan_csv,
)
from ajtlab.scanner import ScanConfig, scan

GOLDEN = sorted((Path(__file__).parent / "golden").glob("*.json"))


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def regenerate(env):
    cfg, command = env["config"], env["command"]
    if command == "verdict":
        M = MatrixFp.from_rows(cfg["p"], cfg["rows"])
        return verdict_payload(M, verdict(M))
    if command == "lemma":
        M = MatrixFp.from_rows(cfg["p"], cfg["rows"])
        return check_all(M, cfg["i"] - 1).to_dict()
    return scan(ScanConfig(cfg["p"], cfg["n"], canonicalize=cfg["canonicalize"], shard=tuple(cfg["shard"]))).to_dict()


def test_golden_files_present():
    assert {p.name.split("_")[0] for p in GOLDEN} == {"verdict", "lemma", "scan"}


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_golden_reports_validate_and_reproduce(path):
    env = load_envelope(str(path))
    jsonschema.validate(env, load_schema())
    assert strip_timing(regenerate(env)) == strip_timing(env["payload"])


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_envelope_round_trip(path, tmp_path):
    env = json.loads(path.read_text())
    out = tmp_path / "copy.json"
    write_atomic(str(out), dumps(env))
    again = load_envelope(str(out))
    assert again == env
    assert canonical_bytes(again["payload"]) == canonical_bytes(env["payload"])


def test_tampering_is_detected(tmp_path):
    M = MatrixFp.from_rows(3, [[1, 1], [1, 2]])
    env = make_envelope("verdict", {"p": 3}, verdict_payload(M, verdict(M)))
    verify_envelope(env)
    bad = copy.deepcopy(env)
    bad["payload"]["z_identity"] = False
    with pytest.raises(EnvelopeError, match="checksum"):
        verify_envelope(bad)
    bad = copy.deepcopy(env)
    bad["schema_version"] = 2
    with pytest.raises(EnvelopeError, match="schema version"):
        verify_envelope(bad)


def test_schema_rejects_malformed_payloads():
    schema = load_schema()
    M = MatrixFp.identity(5, 2)
    payload = verdict_payload(M, verdict(M))
    jsonschema.validate(make_envelope("verdict", {}, payload), schema)
    broken = dict(payload, fp_identity="no")
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(make_envelope("verdict", {}, broken), schema)
    extra = dict(payload, surprise=1)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(make_envelope("verdict", {}, extra), schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(make_envelope("frobnicate", {}, payload), schema)


def test_checksum_ignores_key_order():
    a = {"b": 1, "a": [1, 2]}
    b = {"a": [1, 2], "b": 1}
    assert payload_checksum(a) == payload_checksum(b)


def test_scan_csv(tmp_path):
    payload = scan(ScanConfig(2, 2)).to_dict()
    out = tmp_path / "t.csv"
    write_scan_csv(str(out), payload)
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1
    assert rows[0]["matrices"] == "6"
    assert rows[0]["violations"] == "2"
    assert rows[0]["shard"] == "0/1"
    assert rows[0]["digest"] == payload["digest"]
