"""Problem files and the built-in models.

QOP files::

    {"kind": "qop", "C": [[..]], "c": [..], "A": [[..]], "b": [..],
     "bin": [1, ...], "comp": [[j, k], ...]}

POP files::

    {"kind": "pop", "n": 2, "omega": 1,
     "objective": [{"exps": [1, 0], "coef": 1.0}, ...],
     "constraints": [{"poly": [...], "hint": {"type": ...}}, ...]}

Indices are 1-based in files.  Hints follow ``Hint.to_json``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .hierarchy import Hint, HintInvalid, ModelError, PopModel
from .poly import Polynomial, variables
from .qop import QopError, QopModel


class ProblemFileError(ValueError):
    pass


FIXTURES = ("simplex_qop", "unit_binary_qop", "complementarity_qop", "comb_conditions")


# ---------------------------------------------------------------------------
# built-in models


def simplex_qop() -> QopModel:
    """``min -w1  s.t.  w1 + w2 = 1, w >= 0, w1 binary``; optimum -1."""
    return QopModel(np.zeros((2, 2)), [-0.5, 0.0], [[1.0, 1.0]], [1.0], bin=(0,), name="simplex-binary")


def unit_binary_qop() -> QopModel:
    """``min -w  s.t.  w (1 - w) = 0`` with no linear rows; optimum -1."""
    return QopModel(np.zeros((1, 1)), [-0.5], np.zeros((0, 1)), [], bin=(0,), name="unit-binary")


def complementarity_qop() -> QopModel:
    """Three variables on a simplex, one binary, one complementarity pair."""
    C = np.array([[1.0, -1.0, 0.5], [-1.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
    return QopModel(C, [0.0, -0.25, 0.1], [[1.0, 1.0, 1.0]], [1.0], bin=(0,), comp=((1, 2),), name="simplex-complementarity")


def comb_conditions_pop(omega: int = 1, objective: Polynomial | None = None) -> PopModel:
    """Combinatorial conditions on ``w1..w4`` encoded with slacks ``w5..w8``.

    ``0 <= w_j <= 1``, ``w4`` binary, ``w1 = 1 or w2 = 1``,
    ``w3 = 0 or w3 = w1 + w2``, ``w4 = 0 or w1 + w2 + w3 = 2``.
    The default objective is ``w1 + w2 + w3 + w4``.
    """
    n = 8
    w = variables(n)
    f0 = objective if objective is not None else w[0] + w[1] + w[2] + w[3]
    bases = [w[k] + w[k + 4] - 1 for k in range(4)]
    f1 = sum((g ** (2 * omega) for g in bases), Polynomial.zero(n))
    f2 = w[3] * (1 - w[3]) + (1 - w[0]) * (1 - w[1])
    f3 = w[2] * (w[0] + w[1] - w[2])
    f4 = w[3] * (2 - w[0] - w[1] - w[2])
    hints = [
        None,
        Hint.sum_of_even_powers(bases, 2 * omega),
        Hint.product_form([(1, [w[3], 1 - w[3]]), (1, [1 - w[0], 1 - w[1]])]),
        Hint.product_form([(1, [w[2], w[0] + w[1] - w[2]])]),
        Hint.product_form([(1, [w[3], 2 - w[0] - w[1] - w[2]])]),
    ]
    return PopModel([f0, f1, f2, f3, f4], omega=omega, hints=hints, name="comb-conditions")


def random_binary_qop(rng: np.random.Generator, comp: bool = True) -> QopModel:
    """``n = 3``: two binaries and one continuous variable on one positive row.

    Coefficients of the binaries dominate ``b``, so both binary coordinates
    are bounded by 1 on the linear set; the recession cone is ``{0}``.
    """
    b = float(rng.integers(1, 4))
    a = [b + float(rng.integers(0, 3)), b + float(rng.integers(0, 3)), float(rng.integers(1, 4))]
    M = rng.integers(-3, 4, (3, 3)).astype(float)
    C = (M + M.T) / 2
    c = rng.integers(-3, 4, 3).astype(float) / 2
    pairs = ((0, 2),) if comp and rng.random() < 0.5 else ()
    return QopModel(C, c, [a], [b], bin=(0, 1), comp=pairs, name="random-binary")


# ---------------------------------------------------------------------------
# files


def pop_to_json(model: PopModel) -> dict:
    return {
        "kind": "pop",
        "name": model.name,
        "n": model.n,
        "omega": model.omega,
        "objective": model.f[0].to_json(),
        "constraints": [{"poly": fp.to_json(), "hint": h.to_json()} for fp, h in zip(model.f[1:], model.hints[1:])],
    }


def pop_from_json(data: dict, omega: int | None = None) -> PopModel:
    try:
        n = int(data["n"])
        f0 = Polynomial.from_json(data["objective"], n)
        fs, hints = [f0], [None]
        for con in data.get("constraints", []):
            fp = Polynomial.from_json(con["poly"], n)
            fs.append(fp)
            hints.append(Hint.from_json(con["hint"], fp) if con.get("hint") else None)
    except (KeyError, TypeError) as exc:
        raise ProblemFileError(f"malformed POP description: {exc!r}") from exc
    return PopModel(fs, omega=omega or data.get("omega"), hints=hints, name=data.get("name", ""))


def problem_from_json(data: dict, omega: int | None = None):
    """A ``QopModel`` or ``PopModel`` from a parsed problem file."""
    if not isinstance(data, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    kind = data.get("kind")
    try:
        if kind == "qop":
            if omega not in (None, 1):
                raise ProblemFileError("QOP models use omega = 1")
            return QopModel.from_json(data)
        if kind == "pop":
            return pop_from_json(data, omega)
    except (QopError, ModelError, HintInvalid, ValueError, KeyError, TypeError, IndexError) as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(f"malformed problem description: {exc!r}") from exc
    raise ProblemFileError(f"unknown problem kind {kind!r}")


def load_problem(path, omega: int | None = None):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    return problem_from_json(data, omega)


def save_problem(model, path) -> None:
    data = model.to_json() if isinstance(model, QopModel) else pop_to_json(model)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(name)
    return Path(str(resources.files("copos") / "fixtures" / f"{name}.json"))


def builtin(name: str):
    return {
        "simplex_qop": simplex_qop,
        "unit_binary_qop": unit_binary_qop,
        "complementarity_qop": complementarity_qop,
        "comb_conditions": comb_conditions_pop,
    }[name]()
