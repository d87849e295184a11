"""Bundled model documents.

These are ordinary model documents (the same JSON users write), compiled
in so the CLI and tests can refer to them by name.  Strata carry sample
points used by kernel-rank checks and dimension audits.
"""

from __future__ import annotations

import copy

from .documents import load_distribution, load_strata
from .errors import InputError

HEISENBERG = {
    "name": "heisenberg",
    "dim": 3,
    "rank": 2,
    "coords": ["x1", "x2", "y"],
    "frame": [["1", "0", "0"],
              ["0", "1", "x1"]],
    "strata": [
        {"name": "heisenberg-z1", "ambient": "Z1", "level": 1,
         "equations": [], "inequations": ["a1"], "coframe_selection": [0],
         "samples": [{"base": ["0", "0", "0"], "fiber": ["1"]},
                     {"base": ["1", "-1", "2"], "fiber": ["2"]},
                     {"base": ["1/2", "1/3", "0"], "fiber": ["-1"]}]},
    ],
}

MARTINET = {
    "name": "martinet",
    "dim": 3,
    "rank": 2,
    "coords": ["x1", "x2", "y"],
    "frame": [["1", "0", "x2^2"],
              ["0", "1", "0"]],
    "strata": [
        {"name": "martinet-x2zero", "ambient": "Z1", "level": 2,
         "equations": ["x2"], "inequations": ["a1"], "coframe_selection": [0],
         "samples": [{"base": ["0", "0", "0"], "fiber": ["1"]},
                     {"base": ["1", "0", "0"], "fiber": ["1"]},
                     {"base": ["0", "0", "1"], "fiber": ["2"]},
                     {"base": ["-1", "0", "1/2"], "fiber": ["-1"]}]},
        {"name": "martinet-x2zero-base", "ambient": "M", "level": 1,
         "equations": ["x2"], "inequations": [],
         "samples": [["0", "0", "0"], ["1", "0", "0"], ["-1", "0", "2"]]},
    ],
}

ENGEL = {
    "name": "engel",
    "dim": 4,
    "rank": 2,
    "coords": ["x1", "x2", "y1", "y2"],
    "frame": [["1", "0", "0", "0"],
              ["0", "1", "x1", "x1^2/2"]],
    "strata": [
        {"name": "engel-z2", "ambient": "Z1", "level": 2,
         "equations": ["a1 + x1*a2"], "inequations": ["a2"],
         "coframe_selection": [0, 1],
         "samples": [{"base": ["0", "0", "0", "0"], "fiber": ["0", "1"]},
                     {"base": ["1", "0", "0", "0"], "fiber": ["-1", "1"]},
                     {"base": ["1/2", "1", "-1", "0"], "fiber": ["-1", "2"]}]},
    ],
}

BUNDLED = {"heisenberg": HEISENBERG, "martinet": MARTINET, "engel": ENGEL}


def bundled_document(name: str) -> dict:
    if name not in BUNDLED:
        raise InputError(f"unknown bundled model {name!r}; "
                         f"available: {sorted(BUNDLED)}")
    return copy.deepcopy(BUNDLED[name])


def bundled_model(name: str):
    """Returns (Distribution, {stratum name: StratumSpec})."""
    doc = bundled_document(name)
    dist = load_distribution(doc)
    return dist, load_strata(doc, dist)
