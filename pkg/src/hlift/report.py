"""Structured reports with deterministic serialization.

Reports are JSON objects with sorted keys; exact scalars render as "p/q"
strings, so exact-mode reruns with identical inputs are byte-identical.
Every report embeds a digest of its inputs and the options used.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .poly import MultiPoly, format_fraction


def _encode(value):
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, MultiPoly):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_encode(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def canonical_json(payload) -> str:
    return json.dumps(_encode(payload), sort_keys=True, separators=(",", ":"))


def digest(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Report:
    command: str
    inputs: dict
    results: dict
    mode: str = "exact"
    version: str = field(default=__version__)

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "inputs": _encode(self.inputs),
            "inputs_digest": digest(self.inputs),
            "mode": self.mode,
            "results": _encode(self.results),
            "version": self.version,
        }
        return json.dumps(body, sort_keys=True, indent=2)
