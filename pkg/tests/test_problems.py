import json

import pytest

from copos.problems import (
    FIXTURES,
    ProblemFileError,
    builtin,
    comb_conditions_pop,
    fixture_path,
    load_problem,
    pop_from_json,
    pop_to_json,
    problem_from_json,
    save_problem,
)
from copos.qop import QopModel


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_files_match_builtins(name):
    loaded, built = load_problem(fixture_path(name)), builtin(name)
    if isinstance(built, QopModel):
        assert loaded.to_json() == built.to_json()
    else:
        assert pop_to_json(loaded) == pop_to_json(built)


def test_pop_roundtrip(tmp_path):
    model = comb_conditions_pop()
    path = tmp_path / "comb.json"
    save_problem(model, path)
    again = load_problem(path)
    assert pop_to_json(again) == pop_to_json(model)
    assert load_problem(path, omega=2).omega == 2


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"kind": "lp"},
        {"kind": "qop"},
        {"kind": "qop", "C": [[0, 1], [0, 0]], "c": [0, 0]},
        {"kind": "pop", "n": 1},
        {"kind": "pop", "n": 1, "objective": [{"exps": [1], "coef": 1}], "omega": 0},
    ],
)
def test_bad_descriptions(data):
    with pytest.raises(ProblemFileError):
        problem_from_json(data)


def test_qop_omega_restriction():
    data = builtin("simplex_qop").to_json()
    with pytest.raises(ProblemFileError):
        problem_from_json(data, omega=2)


def test_unreadable_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ProblemFileError):
        load_problem(bad)
    with pytest.raises(ProblemFileError):
        load_problem(tmp_path / "missing.json")


def test_hint_survives_files(tmp_path):
    path = tmp_path / "m.json"
    save_problem(comb_conditions_pop(), path)
    data = json.loads(path.read_text())
    assert data["constraints"][0]["hint"]["type"] == "SumOfEvenPowers"
    model = pop_from_json(data)
    assert model.hints[1].is_sum_of_even_powers
