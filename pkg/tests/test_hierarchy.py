from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copos.basis import full_basis
from copos.dnn import ConicProblem
from copos.gram import UncoveredMonomial, moment_matrix
from copos.hierarchy import (
    FEAS_TOL,
    CertKind,
    ChainAnalyzer,
    Hint,
    HintInvalid,
    ModelError,
    PopModel,
    Status,
    Verdict,
    build_face_chain,
    check_cond_1_1,
    check_cond_1_2,
    check_cond_2,
    check_nonneg_on_orthant,
    propagate_envelope,
    reformulation_verdict,
)
from copos.poly import Polynomial, variables
from copos.problems import comb_conditions_pop


@pytest.fixture(scope="module")
def comb():
    model = comb_conditions_pop()
    return model, build_face_chain(model)


# -- orthant nonnegativity ---------------------------------------------------


def test_nonneg_coeffs():
    w1, w2 = variables(2)
    v = check_nonneg_on_orthant(w1**2 + 3 * w1 * w2)
    assert v.verified and v.kind is CertKind.NONNEG_COEFFS


def test_even_power_hint():
    w = variables(8)
    bases = [w[k] + w[k + 4] - 1 for k in range(4)]
    f = sum((g**2 for g in bases), Polynomial.zero(8))
    v = check_nonneg_on_orthant(f, Hint.sum_of_even_powers(bases, 2))
    assert v.verified and v.kind is CertKind.SUM_OF_EVEN_POWERS


def test_negative_constant_falsified_at_origin():
    w1, _ = variables(2)
    v = check_nonneg_on_orthant(w1 - 1)
    assert v.falsified and v.value < 0
    assert (w1 - 1).evaluate(v.witness) < 0


def test_hint_mismatch_rejected():
    w1, w2 = variables(2)
    with pytest.raises(HintInvalid):
        Hint.sum_of_even_powers([w1 - 1], 2).validate(w1**2 + 1)
    with pytest.raises(HintInvalid):
        PopModel([w1, w1 * w2], hints=[None, Hint.product_form([(1, [w1, w1])])])


def test_model_validation():
    w1, w2 = variables(2)
    with pytest.raises(ModelError):
        PopModel([w1, w1**4], omega=1)
    assert PopModel([w1, w1**3]).omega == 2
    with pytest.raises(ModelError):
        PopModel([w1, variables(3)[0]])


def test_hint_json_roundtrip():
    w1, w2 = variables(2)
    f = w1 * (1 - w1) + w2 * (2 - w1)
    h = Hint.product_form([(1, [w1, 1 - w1]), (1, [w2, 2 - w1])])
    g = Hint.from_json(h.to_json(), f)
    assert g.expand(2).approx_equal(f)


# -- the combinatorial model -------------------------------------------------


def test_comb_envelope_after_first_constraint(comb):
    model, cert = comb
    env = cert.envelopes[1]
    assert [(iv.lo, iv.hi) for iv in env.box] == [(0, 1)] * 8
    eqs = {(c, r) for c, r in env.linear_eqs}
    for k in range(4):
        row = tuple(Fraction(int(i in (k, k + 4))) for i in range(8))
        assert (row, Fraction(1)) in eqs


def test_comb_recession_is_origin(comb):
    model, _ = comb
    an = ChainAnalyzer(model)
    assert an.recession_envelope(1).is_origin
    assert not propagate_envelope(model, 4).is_empty


def test_comb_certificate_kinds(comb):
    model, cert = comb
    s1 = cert.steps[0]
    assert s1.cond_1_1.kind is CertKind.SUM_OF_EVEN_POWERS
    assert s1.cond_1_2.kind is CertKind.SUM_OF_EVEN_POWERS
    for s in cert.steps[1:]:
        assert s.status is Status.VERIFIED
        assert s.cond_1_1.kind is CertKind.INTERVAL_BOUND
        assert s.cond_1_2.kind is CertKind.ZERO_TILDE_SET
    assert cert.cond2.kind is CertKind.ZERO_TILDE_SET
    assert cert.chain_ok and reformulation_verdict(model, cert) is Verdict.EXACT
    assert check_cond_1_1(model, 2).kind is CertKind.INTERVAL_BOUND
    assert check_cond_1_2(model, 3).kind is CertKind.ZERO_TILDE_SET
    assert check_cond_2(model).verified


def test_comb_feasible_point(comb):
    model, cert = comb
    w = cert.feasible_point
    assert w is not None and min(w) >= 0
    for g in model.f[1:]:
        assert abs(g.evaluate(w)) <= 1e-8


# -- small models --------------------------------------------------------------


def test_first_constraint_negative_at_origin():
    w1, w2 = variables(2)
    cert = build_face_chain(PopModel([w1 + w2, w1 - 1]))
    assert cert.steps[0].status is Status.FALSIFIED and cert.failing_step == 1
    assert reformulation_verdict(PopModel([w1 + w2, w1 - 1]), cert) is Verdict.UNKNOWN


def test_negative_constraint_on_unit_box():
    w1, w2 = variables(2)
    model = PopModel([w1, (w1 + w2 - 1) ** 2, -w1], hints=[None, Hint.sum_of_even_powers([w1 + w2 - 1], 2), None])
    v = ChainAnalyzer(model).cond_1_1(2)
    assert v.falsified and v.witness[0] > 0
    assert abs(sum(v.witness) - 1) <= 1e-9


def test_degree_shortcut_for_linear_objective():
    w1, w2 = variables(2)
    model = PopModel([w1 - w2, w1 * w2], hints=[None, Hint.product_form([(1, [w1, w2])])])
    cert = build_face_chain(model)
    assert not ChainAnalyzer(model).recession_envelope(1).is_origin
    assert cert.cond2.verified and cert.cond2.kind is CertKind.DEG_SHORTCUT
    assert reformulation_verdict(model, cert) is Verdict.EXACT


def test_not_exact_when_objective_descends():
    w1, w2 = variables(2)
    # w1 w2 = 0 keeps the ray (0, t); the objective -w2^2 falls along it
    model = PopModel([-(w2**2), w1 * w2], hints=[None, Hint.product_form([(1, [w1, w2])])])
    cert = build_face_chain(model)
    assert cert.chain_ok and cert.cond2.falsified
    assert reformulation_verdict(model, cert) is Verdict.UNKNOWN
    assert reformulation_verdict(model, cert, oracle_value=-np.inf) is Verdict.EXACT_BECAUSE_UNBOUNDED
    assert reformulation_verdict(model, cert, oracle_value=3.0) is Verdict.NOT_EXACT


def test_basis_coverage_checked():
    w1, _ = variables(2)
    with pytest.raises(UncoveredMonomial):
        build_face_chain(PopModel([w1, w1**2]), basis=full_basis(2, 1).__class__(2, 1, ((1, 0, 0),)))


def test_certificate_json_is_deterministic(comb):
    model, cert = comb
    again = build_face_chain(model)
    assert cert.to_json() == again.to_json()


# -- properties over random hinted models ----------------------------------------


@st.composite
def hinted_models(draw):
    n = draw(st.integers(2, 3))
    w = variables(n)
    fs, hints = [], []
    for _ in range(draw(st.integers(1, 3))):
        kind = draw(st.sampled_from(["row", "bin", "comp", "neg", "lin"]))
        i, j = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
        if kind == "row":
            a = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n).filter(any))
            g = Polynomial.linear(a, -draw(st.integers(1, 2)))
            fs.append(g * g)
            hints.append(Hint.sum_of_even_powers([g], 2))
        elif kind == "bin":
            fs.append(w[i] * (1 - w[i]))
            hints.append(Hint.product_form([(1, [w[i], 1 - w[i]])]))
        elif kind == "comp":
            fs.append(w[i] * w[j])
            hints.append(Hint.product_form([(1, [w[i], w[j]])]))
        elif kind == "neg":
            fs.append(-w[i])
            hints.append(None)
        else:
            fs.append(w[i] - draw(st.integers(0, 1)))
            hints.append(None)
    obj = Polynomial.linear(draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n)))
    if draw(st.booleans()):
        obj = obj - w[0] * w[-1]
    return PopModel([obj, *fs], omega=1, hints=[None, *hints])


def _on_level(model, W, upto, tilde=False):
    ok = np.ones(len(W), dtype=bool)
    scale = 1 + np.max(np.abs(W), axis=1) if len(W) else np.ones(0)
    for q in range(1, upto + 1):
        g = model.tilde(q) if tilde else model.f[q]
        if not g.is_zero():
            ok &= np.abs(g.evaluate_many(W)) <= FEAS_TOL * scale**2
    return W[ok]


@settings(max_examples=25)
@given(hinted_models())
def test_verified_steps_survive_sampling(model):
    an = ChainAnalyzer(model)
    rng = np.random.default_rng(5)
    for p in range(1, model.m + 1):
        v = an.cond_1_1(p)
        if v.verified:
            W = an.envelope(p - 1).sample(rng, 10_000)
            if len(W):
                assert model.f[p].evaluate_many(W).min() >= -1e-7
        v = an.cond_1_2(p)
        if v.verified:
            W = an.recession_envelope(p - 1).sample(rng, 10_000)
            if len(W):
                assert model.tilde(p).evaluate_many(W).min() >= -1e-7
    if an.cond_2().verified:
        W = an.recession_envelope(model.m).sample(rng, 10_000)
        if len(W):
            assert model.tilde(0).evaluate_many(W).min() >= -1e-7


@settings(max_examples=25)
@given(hinted_models())
def test_falsified_witnesses_reproduce(model):
    an = ChainAnalyzer(model)
    checks = [(an.cond_1_0(p), model.f[p], 0, False) for p in range(1, model.m + 1)]
    checks += [(an.cond_1_1(p), model.f[p], p - 1, False) for p in range(1, model.m + 1)]
    checks += [(an.cond_1_2(p), model.tilde(p), p - 1, True) for p in range(1, model.m + 1)]
    checks.append((an.cond_2(), model.tilde(0), model.m, True))
    for v, target, upto, tilde in checks:
        if not v.falsified:
            continue
        w = np.array(v.witness)
        assert w.min() >= 0
        assert float(target.evaluate(list(w))) < 0
        assert len(_on_level(model, w[None, :], upto, tilde)) == 1


@settings(max_examples=25)
@given(hinted_models())
def test_envelopes_are_nested(model):
    an = ChainAnalyzer(model)
    rng = np.random.default_rng(9)
    for p in range(1, model.m + 1):
        inner, outer = an.envelope(p), an.envelope(p - 1)
        for w in _on_level(model, inner.sample(rng, 500), p)[:50]:
            assert outer.contains(w, tol=1e-7)


def test_moment_consistency_on_sampled_levels(comb):
    """Cone and polynomial sides agree pointwise on sampled feasible points."""
    model, _ = comb
    cp = ConicProblem.from_pop(model)
    an = ChainAnalyzer(model)
    rng = np.random.default_rng(1)
    fbars = model.homogenized()
    for p in range(1, model.m + 1):
        W = _on_level(model, an.envelope(p - 1).sample(rng, 400), p - 1)[:100]
        assert len(W)
        for w in W:
            x = np.concatenate([[rng.uniform(0.1, 2.0)], w * rng.uniform(0.1, 2.0)])
            M = moment_matrix(cp.basis, x)
            want = float(fbars[p].evaluate(x))
            assert abs(cp.Qp[p - 1].inner(M) - want) <= 1e-9 * max(1.0, abs(want))


def test_chain_monotone_on_feasible_points(comb):
    """A rank-one moment matrix feasible at level p satisfies every earlier constraint."""
    model, _ = comb
    cp = ConicProblem.from_pop(model)
    an = ChainAnalyzer(model)
    rng = np.random.default_rng(2)
    for p in range(1, model.m + 1):
        for w in _on_level(model, an.envelope(p).sample(rng, 300), p)[:30]:
            M = moment_matrix(cp.basis, np.concatenate([[1.0], w]))
            for q in range(1, p + 1):
                assert abs(cp.Qp[q - 1].inner(M)) <= 1e-9
