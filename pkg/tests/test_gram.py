import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copos.basis import covering_basis, full_basis
from copos.gram import SymMatrix, UncoveredMonomial, gram_matrix, h0, moment_matrix, moment_vector
from copos.poly import Polynomial, variables


def _form(terms):
    return Polynomial(2, terms)


def test_moment_vector_examples():
    assert np.array_equal(moment_vector(full_basis(1, 1), (1, 3)), [1, 3])
    assert np.array_equal(moment_vector(full_basis(1, 2), (2, 1)), [4, 2, 1])
    assert not moment_vector(full_basis(2, 1), (0, 0, 0)).any()
    with pytest.raises(ValueError):
        moment_vector(full_basis(1, 1), (1, 2, 3))


def test_moment_matrix_examples():
    A = full_basis(1, 1)
    assert np.array_equal(moment_matrix(A, (1, 1)).entries, np.ones((2, 2)))
    assert np.array_equal(moment_matrix(A, (1, 0)).entries, [[1, 0], [0, 0]])


@pytest.mark.parametrize(
    "terms, expected",
    [
        ({(1, 1): 1}, [[0, 0.5], [0.5, 0]]),
        ({(2, 0): 1}, [[1, 0], [0, 0]]),
        ({(1, 1): 1, (0, 2): -1}, [[0, 0.5], [0.5, -1]]),
    ],
)
def test_gram_matrix_examples(terms, expected, rng):
    A = full_basis(1, 1)
    fbar = _form(terms)
    Q = gram_matrix(fbar, A)
    assert np.array_equal(Q.entries, expected)
    # independent check: direct quadratic form at random points
    for x in rng.uniform(0, 3, (100, 2)):
        u = np.array([x[0], x[1]])
        assert abs(u @ np.array(expected) @ u - float(fbar.evaluate(x))) <= 1e-12 * (1 + abs(u @ u))


def test_uncovered_monomial():
    A = covering_basis({(2, 0)}, 1, 1)
    with pytest.raises(UncoveredMonomial):
        gram_matrix(_form({(0, 2): 1}), A)


def test_h0_single_entry():
    for A in (full_basis(2, 1), full_basis(3, 2)):
        H = h0(A).entries
        assert np.count_nonzero(H) == 1 and H[0, 0] == 1


def test_sym_matrix_requires_symmetry():
    with pytest.raises(ValueError):
        SymMatrix(full_basis(1, 1), np.array([[0.0, 1.0], [0.0, 0.0]]))


@st.composite
def forms(draw):
    n = draw(st.integers(1, 3))
    omega = draw(st.integers(1, 2))
    exps = list(full_basis(n, 2 * omega))
    chosen = draw(st.lists(st.sampled_from(exps), min_size=1, max_size=8, unique=True))
    coefs = draw(st.lists(st.integers(-9, 9).filter(bool), min_size=len(chosen), max_size=len(chosen)))
    return n, omega, Polynomial(n + 1, dict(zip(chosen, coefs)))


@given(forms(), st.sampled_from(["even", "single"]), st.sampled_from(["cover", "full"]))
def test_gram_roundtrip(data, mode, kind):
    n, omega, fbar = data
    A = full_basis(n, omega) if kind == "full" else covering_basis(fbar.monomials(), n, omega)
    Q = gram_matrix(fbar, A, mode)
    rng = np.random.default_rng(len(fbar))
    for x in rng.uniform(0, 3, (100, n + 1)):
        want = float(fbar.evaluate(x))
        got = Q.inner(moment_matrix(A, x))
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
        # H0 pairs with the moment matrix to x0^(2 omega) >= 0
        assert h0(A).inner(moment_matrix(A, x)) == pytest.approx(x[0] ** (2 * omega), rel=1e-12)


def test_qop_specialization_matches_quadratic_form(rng):
    w1, w2 = variables(2)
    f = (w1 + w2 - 1) ** 2 + 3 * w1 * w2 - w2
    fbar = f.homogenize(2)
    A = full_basis(2, 1)
    Q = gram_matrix(fbar, A).entries
    for x in rng.uniform(0, 3, (100, 3)):
        assert abs(x @ Q @ x - float(fbar.evaluate(x))) <= 1e-9 * (1 + x @ x)
