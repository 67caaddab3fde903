"""Stable JSON reports for the command line."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

SCHEMA = 1


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    # mpmath numbers and anything else numeric
    return str(obj)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def build_report(command: list[str], inputs: dict, results: dict, version: str) -> dict:
    body = {"command": command, "inputs": inputs, "results": results}
    digest = hashlib.sha256(canonical(body).encode("utf-8")).hexdigest()
    return {"schema": SCHEMA, "tool": "fibdesign", "version": version, **body, "run_hash": digest}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"
