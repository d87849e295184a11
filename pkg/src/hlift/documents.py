"""Document formats (JSON) for models, curves, jets, covectors and strata.

All numeric leaves accept integers, "p/q" strings, or floats; they are
parsed exactly into Fractions.  Loaders validate against the geometry and
raise :class:`InputError` with a readable message on any mismatch.
"""

from __future__ import annotations

import json
from fractions import Fraction
from .annihilator import CovectorPoint
from .distribution import Distribution
from .endpoint import ControlCurve
from .errors import InputError
from .forms import PolyOneForm, PolyVectorField
from .jets import AMBIENTS, CurveJet
from .poly import as_fraction, format_fraction, poly_parse
from .strata import StratumSpec


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise InputError(f"{context}: missing required key {key!r}")
    return doc[key]


def _scalar_list(values, context: str) -> tuple:
    try:
        return tuple(as_fraction(v) for v in values)
    except InputError as exc:
        raise InputError(f"{context}: {exc}") from exc


# ---------------------------------------------------------------------------
# Distributions


def load_distribution(doc: dict) -> Distribution:
    """Build a distribution from its document; the coframe is derived when
    omitted and verified when present."""
    name = _require(doc, "name", "model")
    dim = int(_require(doc, "dim", "model"))
    rank = int(_require(doc, "rank", "model"))
    coords = tuple(_require(doc, "coords", "model"))
    if len(coords) != dim:
        raise InputError(f"model {name!r}: {len(coords)} coords for dim {dim}")
    frame_doc = _require(doc, "frame", "model")
    if len(frame_doc) != rank:
        raise InputError(f"model {name!r}: {len(frame_doc)} frame fields "
                         f"for rank {rank}")
    frame = []
    for j, row in enumerate(frame_doc):
        if len(row) != dim:
            raise InputError(f"model {name!r}: frame field {j + 1} has "
                             f"{len(row)} components, expected {dim}")
        frame.append(PolyVectorField(tuple(poly_parse(s, coords) for s in row)))
    coframe = None
    if doc.get("coframe") is not None:
        coframe = []
        for i, row in enumerate(doc["coframe"]):
            if len(row) != dim:
                raise InputError(f"model {name!r}: coframe element {i + 1} "
                                 f"has {len(row)} components, expected {dim}")
            coframe.append(PolyOneForm(tuple(poly_parse(s, coords) for s in row)))
    return Distribution(name, coords, frame, rank, coframe)


def load_strata(doc: dict, dist: Distribution) -> dict:
    """Parse and validate the optional strata list of a model document."""
    out = {}
    for sdoc in doc.get("strata", []):
        spec = load_stratum(sdoc, dist)
        if spec.name in out:
            raise InputError(f"duplicate stratum name {spec.name!r}")
        out[spec.name] = spec
    return out


def load_stratum(doc: dict, dist: Distribution) -> StratumSpec:
    name = _require(doc, "name", "stratum")
    ambient = _require(doc, "ambient", "stratum")
    level = int(doc.get("level", 1))
    corank = dist.corank
    if ambient == "Z1":
        vars = dist.coords + tuple(f"a{i + 1}" for i in range(corank))
    elif ambient == "M":
        vars = dist.coords
    else:
        raise InputError(f"stratum {name!r}: ambient must be 'M' or 'Z1'")
    equations = tuple(poly_parse(s, vars) for s in doc.get("equations", []))
    inequations = tuple(poly_parse(s, vars) for s in doc.get("inequations", []))
    selection = tuple(int(i) for i in doc.get("coframe_selection", []))
    samples = []
    for sample in doc.get("samples", []):
        if ambient == "Z1":
            samples.append(load_covector(sample, dist))
        else:
            p = _scalar_list(sample, f"stratum {name!r} sample")
            if len(p) != dist.dim:
                raise InputError(f"stratum {name!r}: sample of length {len(p)}")
            samples.append(p)
    spec = StratumSpec(name=name, ambient=ambient, level=level,
                       equations=equations, inequations=inequations,
                       coframe_selection=selection, samples=tuple(samples))
    spec.validate_for(dist)
    for s in spec.samples:
        point = s.point if ambient == "Z1" else s
        if not spec.contains(point):
            raise InputError(f"stratum {name!r}: sample {point} is not on "
                             "the stratum")
    return spec


# ---------------------------------------------------------------------------
# Curves, covectors, jets


def load_curve(doc: dict, dist: Distribution) -> tuple:
    """Returns (ControlCurve, basepoint tuple of Fractions)."""
    basepoint = _scalar_list(_require(doc, "basepoint", "curve"), "curve basepoint")
    if len(basepoint) != dist.dim:
        raise InputError(f"curve basepoint has length {len(basepoint)}, "
                         f"expected {dist.dim}")
    controls = _require(doc, "controls", "curve")
    if isinstance(controls, dict):
        times = [float(t) for t in _require(controls, "times", "curve controls")]
        values = [[float(v) for v in row]
                  for row in _require(controls, "values", "curve controls")]
        if len(values) != dist.rank:
            raise InputError(f"{len(values)} control channels for rank {dist.rank}")
        curve = ControlCurve("sampled", times=times, values=values)
    else:
        if len(controls) != dist.rank:
            raise InputError(f"{len(controls)} control strings for rank {dist.rank}")
        polys = [poly_parse(s, ("t",)) for s in controls]
        curve = ControlCurve.from_polynomials(polys)
    if curve.kind == "polynomial":
        mismatch = any(row[0] != b for row, b in zip(curve.polys, basepoint))
    else:
        mismatch = any(abs(v - float(b)) > 1e-9
                       for v, b in zip(curve.initial_value(), basepoint))
    if mismatch:
        raise InputError(
            f"controls start at {curve.initial_value()} but the basepoint "
            f"horizontal part is {tuple(float(b) for b in basepoint[:dist.rank])}")
    return curve, basepoint


def load_covector(doc, dist: Distribution) -> CovectorPoint:
    if isinstance(doc, dict):
        base = _scalar_list(_require(doc, "base", "covector"), "covector base")
        fiber = _scalar_list(_require(doc, "fiber", "covector"), "covector fiber")
    else:
        raise InputError("covector document must be {base: [...], fiber: [...]}")
    if len(base) != dist.dim or len(fiber) != dist.corank:
        raise InputError(
            f"covector dimensions ({len(base)}, {len(fiber)}) do not match "
            f"({dist.dim}, {dist.corank})")
    return CovectorPoint(base, fiber)


def load_jet(doc: dict, dist: Distribution | None = None) -> CurveJet:
    ambient = _require(doc, "ambient", "jet")
    if ambient not in AMBIENTS:
        raise InputError(f"jet ambient must be one of {AMBIENTS}")
    order = int(_require(doc, "order", "jet"))
    base = _scalar_list(_require(doc, "base", "jet"), "jet base")
    taylor = tuple(_scalar_list(row, "jet taylor")
                   for row in _require(doc, "taylor", "jet"))
    jet = CurveJet(ambient, order, base, taylor)
    if dist is not None:
        expected = {"M": dist.dim, "Z1": dist.dim + dist.corank,
                    "controls": dist.rank}[ambient]
        if jet.dim != expected:
            raise InputError(f"jet dimension {jet.dim} does not match "
                             f"{ambient} dimension {expected}")
    return jet


def dump_jet(jet: CurveJet) -> dict:
    enc = lambda v: format_fraction(v) if isinstance(v, Fraction) else float(v)
    return {"ambient": jet.ambient, "order": jet.order,
            "base": [enc(v) for v in jet.base],
            "taylor": [[enc(v) for v in row] for row in jet.taylor]}


def parse_document(text: str, context: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{context}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{context}: expected a JSON object")
    return doc
