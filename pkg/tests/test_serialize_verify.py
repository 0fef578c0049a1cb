import json
import warnings

import pytest
from gmpy2 import mpq

from pencillab import verify
from pencillab.errors import ParseError
from pencillab.pencil import generate_test_pencil, hyperbolic_reduce
from pencillab.serialize import (
    dumps,
    load_pencil,
    load_subspace,
    pencil_from_json,
    pencil_to_json,
    reduced_to_json,
    subspace_to_json,
)


def test_pencil_round_trip_is_exact():
    p, ell = generate_test_pencil(6, 4, 1)
    obj = pencil_to_json(p)
    assert pencil_from_json(json.loads(dumps(obj))) == p
    again, digest = load_pencil(dumps(obj).encode())
    assert again == p and len(digest) == 64
    assert load_subspace(subspace_to_json(ell)) == ell


def test_rationals_written_as_strings():
    obj = {"N": 3, "q0": [[1, 0, 0, 0], [0, "1/2", 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]],
           "q1": [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, "-2/4", 0], [0, 0, 0, 1]]}
    p = pencil_from_json(obj)
    assert p.q0[1, 1] == mpq(1, 2) and p.q1[2, 2] == mpq(-1, 2)
    assert pencil_to_json(p)["q1"][2][2] == "-1/2"


@pytest.mark.parametrize(
    "obj",
    [
        {"q0": [[1]], "q1": [[1]]},
        {"N": "3", "q0": [], "q1": []},
        {"N": 3, "q0": [[1, 0], [0, 1]], "q1": [[1, 0], [0, 1]]},
        {"N": 2, "q0": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "q1": [[1, 0, 0], [0, 2, 0], [0, 0]]},
        {"N": 2, "q0": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "q1": [[1, 0, 0], [0, 2, 0], [0, 0, "x"]]},
    ],
)
def test_malformed_pencils_raise_parse_errors(obj):
    with pytest.raises(ParseError):
        pencil_from_json(obj)


def test_load_errors():
    with pytest.raises(ParseError):
        load_pencil(b"[1, 2]")
    with pytest.raises(ParseError):
        load_pencil(b"\xff\xfe")
    with pytest.raises(ParseError):
        load_subspace({"basis": [[1, 0]]})


def test_reduced_json_shape():
    p, ell = generate_test_pencil(5, 2, 1)
    obj = reduced_to_json(hyperbolic_reduce(p, ell))
    assert obj["variables"] == ["s", "t", "y2", "y3", "y4", "y5"]
    assert len(obj["equations"]) == 3
    json.dumps(obj)


def test_battery_passes_and_is_reproducible():
    a = verify.run_battery(seed=1, trials=3)
    b = verify.run_battery(seed=1, trials=3)
    assert a.ok and a.to_json() == b.to_json()
    assert set(a.results) == set(verify.PROPERTIES)


def test_battery_parallel_matches_serial():
    only = ["signature-law", "walk-invariants", "gaussian-binomial"]
    serial = verify.run_battery(seed=2, trials=2, only=only)
    parallel = verify.run_battery(seed=2, trials=2, jobs=2, only=only)
    assert serial.to_json() == parallel.to_json()


def test_zero_trials_warns():
    with pytest.warns(UserWarning, match="vacuously"):
        rep = verify.run_battery(trials=0)
    assert rep.ok and rep.warnings


def test_unknown_property_rejected():
    with pytest.raises(KeyError):
        verify.run_battery(only=["nope"])


def test_failures_name_the_property(monkeypatch):
    from pencillab import krasnov

    monkeypatch.setattr(krasnov, "antipodal_ok", lambda walk: False)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = verify.run_battery(seed=0, trials=2, only=["walk-invariants", "reconstruction-fidelity"])
    assert not rep.ok
    assert set(rep.failed_properties) == {"walk-invariants", "reconstruction-fidelity"}


def test_diagonal_step_oracle():
    # diag(1, 1), diag(1, 2): roots at [-1:1] and [-2:1]
    steps = verify.diagonal_steps([1, 1], [1, 2])
    assert sorted(steps) == ["+", "+", "-", "-"]
    assert steps in "++--++--"
