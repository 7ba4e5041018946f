"""JSON report envelopes: payload plus metadata and a checksum over the payload bytes."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from datetime import datetime, timezone
from importlib import resources

from . import __version__
from .ajt import MatrixVerdict
from .matrix import MatrixFp

SCHEMA_VERSION = 1


class EnvelopeError(ValueError):
    pass


def canonical_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def payload_checksum(payload: dict) -> str:
    return hashlib.sha256(canonical_bytes(payload)).hexdigest()


def make_envelope(command: str, config: dict, payload: dict, timing: dict | None = None) -> dict:
    env = {
        "schema_version": SCHEMA_VERSION,
        "tool": "ajtlab",
        "tool_version": __version__,
        "command": command,
        "config": config,
        "timestamp": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "payload": payload,
        "payload_sha256": payload_checksum(payload),
    }
    if timing is not None:
        env["timing"] = timing
    return env


def verify_envelope(env: dict) -> None:
    if env.get("schema_version") != SCHEMA_VERSION:
        raise EnvelopeError(f"unsupported schema version {env.get('schema_version')}")
    if payload_checksum(env["payload"]) != env.get("payload_sha256"):
        raise EnvelopeError("payload checksum mismatch")


def dumps(env: dict) -> str:
    return json.dumps(env, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_envelope(path: str) -> dict:
    with open(path) as fh:
        env = json.load(fh)
    verify_envelope(env)
    return env


def load_schema() -> dict:
    return json.loads(resources.files("ajtlab").joinpath("schema/report.schema.json").read_text())


def verdict_payload(M: MatrixFp, v: MatrixVerdict) -> dict:
    return {
        "kind": "verdict",
        "p": M.p,
        "n": M.n,
        "rows": M.tolist(),
        **v.to_dict(),
        "counterexample": v.counterexample,
        "violates_conjecture": v.violates_conjecture,
    }


def write_scan_csv(path: str, payload: dict) -> None:
    totals = payload["totals"]
    header = ["p", "n", "canonicalize", "shard", "partial", *totals.keys(), "digest"]
    row = [
        payload["p"],
        payload["n"],
        payload["canonicalize"],
        "/".join(map(str, payload["shard"])),
        payload["partial"],
        *totals.values(),
        payload["digest"],
    ]
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerow(row)
    os.replace(tmp, path)
