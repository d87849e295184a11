import json
from fractions import Fraction

import numpy as np

from hlift.report import Report, canonical_json, digest


def test_fraction_encoding():
    payload = {"a": Fraction(1, 2), "b": Fraction(3), "c": [Fraction(-5, 7)]}
    assert canonical_json(payload) == '{"a":"1/2","b":"3","c":["-5/7"]}'


def test_numpy_encoding():
    payload = {"x": np.float64(0.5), "v": np.array([1.0, 2.0]),
               "n": np.int64(3)}
    decoded = json.loads(canonical_json(payload))
    assert decoded == {"x": 0.5, "v": [1.0, 2.0], "n": 3}


def test_digest_stable_and_input_sensitive():
    a = {"model": "martinet", "point": "0,0,0"}
    assert digest(a) == digest(dict(reversed(list(a.items()))))
    assert digest(a) != digest({"model": "martinet", "point": "0,0,1"})


def test_report_roundtrip():
    report = Report("dist info", {"model": "martinet"},
                    {"growth_vector": [2, 2, 3]}, "exact")
    body = json.loads(report.to_json())
    assert body["command"] == "dist info"
    assert body["results"]["growth_vector"] == [2, 2, 3]
    assert body["inputs_digest"] == digest({"model": "martinet"})
    assert body["version"]
    # serialization is deterministic
    assert report.to_json() == report.to_json()
