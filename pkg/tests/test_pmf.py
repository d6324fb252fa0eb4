"""Probability evaluation: log terms, stable summation, method
dispatch and cross-method agreement, generating function."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

import linpois as lp
from linpois import MethodTag
from linpois.errors import InputError, InternalInvariantError, MethodNotApplicableError
from linpois.pmf import _summed

from conftest import EXAMPLE1, EXAMPLE3

REL = 1e-12  # cross-method agreement tolerance


def rel_close(x, y, tol=REL):
    if x == y:
        return True
    return abs(x - y) <= tol * max(abs(x), abs(y))


# --------------------------------------------------------- log_term

def test_log_term_known_values():
    assert lp.log_term([0, 0, 0], [1.0, 1.0, 1.0]) == -3.0
    got = lp.log_term([2, 1, 0], [1.0, 1.0, 1.0])
    assert math.isclose(got, math.log(0.5) - 3.0, rel_tol=1e-15)
    got = lp.log_term([0, 5], [0.0, 2.0])
    assert math.isclose(got, 5 * math.log(2) - 2 - math.log(120), rel_tol=1e-14)


def test_log_term_zero_rate_point_mass():
    assert lp.log_term([1], [0.0]) == float("-inf")
    assert lp.log_term([0], [0.0]) == 0.0


def test_log_term_validation():
    with pytest.raises(InputError):
        lp.log_term([-1], [1.0])
    with pytest.raises(InputError):
        lp.log_term([1], [-1.0])
    with pytest.raises(InputError):
        lp.log_term([1, 2], [1.0])
    with pytest.raises(InputError):
        lp.log_term([0.5], [1.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20),
                          st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1),
                                           Fraction(3, 2), Fraction(2), Fraction(4)])),
                min_size=1, max_size=5))
def test_log_term_matches_exact_rational(pairs):
    """Oracle: lambda^k / k! as an exact Fraction, log via big-int
    math.log; the e^-lambda part is exact because every rate is dyadic."""
    ks = [k for k, _ in pairs]
    lams = [lam for _, lam in pairs]
    frac = Fraction(1)
    for k, lam in pairs:
        frac *= lam**k / math.factorial(k)
    expect = math.log(frac.numerator) - math.log(frac.denominator) - float(sum(lams))
    got = lp.log_term(ks, [float(x) for x in lams])
    assert math.isclose(got, expect, rel_tol=1e-13, abs_tol=1e-13)


# -------------------------------------------------------- logsumexp

def test_logsumexp_edges():
    assert lp.logsumexp([]) == float("-inf")
    assert lp.logsumexp([float("-inf")] * 3) == float("-inf")
    assert lp.logsumexp([0.0]) == 0.0
    # huge shifts must not overflow
    assert math.isclose(lp.logsumexp([-1000.0, -1000.0]), -1000.0 + math.log(2), rel_tol=1e-15)


@settings(max_examples=150)
@given(st.lists(st.floats(-30, 30), min_size=1, max_size=40), st.randoms())
def test_logsumexp_accuracy_and_order_independence(ts, rnd):
    expect = math.log(math.fsum(math.exp(t) for t in ts))
    got = lp.logsumexp(ts)
    # abs_tol covers results near 0, where the exp/log oracle itself is noisy
    assert math.isclose(got, expect, rel_tol=1e-13, abs_tol=1e-12)
    shuffled = list(ts)
    rnd.shuffle(shuffled)
    assert lp.logsumexp(shuffled) == got


# ----------------------------------------------------- pmf dispatch

def test_pmf_worked_example(model1):
    res = lp.pmf(model1, [2, 2])
    assert res.method is MethodTag.SINGLE_INDEX
    assert res.terms == 2
    assert rel_close(res.prob, math.exp(-3))
    assert math.isclose(res.log_prob, -3.0, rel_tol=1e-14)


def test_pmf_invertible_closed_form():
    lam = (0.7, 1.3, 0.2)
    model = lp.PoissonModel(EXAMPLE3, lam)
    k = [1, 2, 0]
    b = [int(x) for x in lp.int_matrix(EXAMPLE3) @ lp.int_vector(k)]
    res = lp.pmf(model, b)
    assert res.method is MethodTag.INVERTIBLE
    assert res.terms == 1
    expect = (lam[0] * math.exp(-lam[0])
              * lam[1] ** 2 / 2 * math.exp(-lam[1])
              * math.exp(-lam[2]))
    assert rel_close(res.prob, expect)


def test_pmf_zero_results(model1):
    for b in ([0, 1], [-1, 0], [0, -2]):
        res = lp.pmf(model1, b)
        assert res.prob == 0.0
        assert res.log_prob == float("-inf")
        assert res.terms == 0


def test_pmf_b_zero(model3):
    res = lp.pmf(model3, [0, 0, 0])
    assert res.terms == 1
    assert rel_close(res.prob, math.exp(-3))


def test_pmf_dimension_mismatch(model1):
    with pytest.raises(InputError):
        lp.pmf(model1, [1, 2, 3])


def test_pmf_method_forcing(model1, model3):
    assert lp.pmf_enumerate(model1, [2, 2]).method is MethodTag.ENUMERATE
    with pytest.raises(MethodNotApplicableError):
        lp.pmf_invertible(model1, [2, 2])
    with pytest.raises(MethodNotApplicableError):
        lp.pmf_single_index(model3, [1, 1, 1])
    with pytest.raises(InputError):
        lp.pmf(model1, [2, 2], method="fancy")


def test_pmf_dependent_rows_checked_against_original_b():
    model = lp.PoissonModel([[1, 2], [2, 4]], [1.0, 1.0])
    base = lp.PoissonModel([[1, 2]], [1.0, 1.0])
    for b0 in range(8):
        consistent = lp.pmf(model, [b0, 2 * b0])
        assert rel_close(consistent.prob, lp.pmf(base, [b0]).prob)
        assert lp.pmf(model, [b0, 2 * b0 + 1]).prob == 0.0


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_method_agreement_with_enumeration(data):
    """Whatever route classify picks must agree with brute force."""
    m = data.draw(st.integers(1, 3))
    n = data.draw(st.integers(1, 4))
    rows = [[data.draw(st.integers(0, 3)) for _ in range(n)] for _ in range(m)]
    lam = [data.draw(st.sampled_from([0.5, 1.0, 2.0])) for _ in range(n)]
    model = lp.PoissonModel(rows, lam)
    b = [data.draw(st.integers(0, 8)) for _ in range(m)]
    auto = lp.pmf(model, b)
    ref = lp.pmf_enumerate(model, b)
    assert rel_close(auto.prob, ref.prob)
    assert auto.terms == ref.terms
    if model.method is MethodTag.SINGLE_INDEX:
        assert rel_close(lp.pmf_single_index(model, b).prob, ref.prob)
    if model.method is MethodTag.INVERTIBLE:
        assert rel_close(lp.pmf_invertible(model, b).prob, ref.prob)


def test_preprocess_is_probability_preserving():
    # zero column + dependent row vs the hand-reduced model
    noisy = lp.PoissonModel([[1, 0, 1], [0, 0, 2], [1, 0, 3]], [1.0, 5.0, 0.5])
    clean = lp.PoissonModel([[1, 1], [0, 2]], [1.0, 0.5])
    for b1 in range(6):
        for b2 in range(0, 6, 2):
            # third row is row1 + row2, so consistent b needs b3 = b1 + b2
            got = lp.pmf(noisy, [b1, b2, b1 + b2])
            want = lp.pmf(clean, [b1, b2])
            assert rel_close(got.prob, want.prob)


def test_marginal_collapse_matches_poisson_sum():
    cases = [
        ([0.5], MethodTag.INVERTIBLE),
        ([0.5, 1.5], MethodTag.SINGLE_INDEX),
        ([2.0, 0.25, 1.0], MethodTag.ENUMERATE),
        ([1.0, 1.0, 0.5, 2.0], MethodTag.ENUMERATE),
    ]
    for lam, tag in cases:
        model = lp.PoissonModel([[1] * len(lam)], lam)
        assert model.method is tag
        total = sum(lam)
        for b in range(21):
            got = lp.pmf(model, [b]).prob
            assert rel_close(got, poisson.pmf(b, total))


def test_normalization_partial_sum(model1):
    # group all k with sum(k) <= 20 through their Y values
    seen = set()
    a = model1.a_full
    for k1 in range(21):
        for k2 in range(21 - k1):
            for k3 in range(21 - k1 - k2):
                kv = lp.int_vector([k1, k2, k3])
                seen.add(tuple(int(x) for x in a @ kv))
    total = math.fsum(lp.pmf(model1, list(b)).prob for b in seen)
    assert 1 - 1e-6 <= total <= 1 + 1e-12


# ----------------------------------------------------- result shape

def test_prob_zero_iff_log_inf(model1):
    hit = lp.pmf(model1, [2, 2])
    assert hit.prob > 0 and hit.log_prob > float("-inf")
    miss = lp.pmf(model1, [0, 1])
    assert miss.prob == 0.0 and miss.log_prob == float("-inf")


def test_prob_clamp():
    res = _summed([0.0, math.log(1e-13)], MethodTag.ENUMERATE)
    assert res.prob == 1.0
    assert res.clamped
    with pytest.raises(InternalInvariantError):
        _summed([math.log(0.6), math.log(0.6)], MethodTag.ENUMERATE)


def test_prob_matches_exp_log_prob(model2):
    b = [int(x) for x in model2.a_full @ lp.int_vector([1, 1, 1, 1])]
    res = lp.pmf(model2, b)
    assert res.prob == pytest.approx(math.exp(res.log_prob), rel=1e-15)


# ----------------------------------------------- generating function

def test_gf_at_one_is_total_probability():
    models = [
        lp.PoissonModel(EXAMPLE1, [1.0, 1.0, 1.0]),
        lp.PoissonModel([[1, 0, 1], [0, 0, 2]], [0.5, 3.0, 1.5]),  # zero column
        lp.PoissonModel([[1, 2], [2, 4]], [0.7, 0.3]),  # dependent row
    ]
    for model in models:
        assert math.isclose(lp.gf_eval(model, [1.0] * model.m_full), 1.0, rel_tol=1e-15)


def test_gf_at_zero_is_constant_term(model1):
    assert rel_close(lp.gf_eval(model1, [0.0, 0.0]), lp.pmf(model1, [0, 0]).prob)
    withzero = lp.PoissonModel([[1, 0], [0, 0]], [1.0, 4.0])
    assert rel_close(lp.gf_eval(withzero, [0.0, 0.0]), lp.pmf(withzero, [0, 0]).prob)


def test_gf_validation(model1):
    for bad in ([0.5], [0.5, 1.5], [-0.1, 0.5], [0.2, float("nan")]):
        with pytest.raises(InputError):
            lp.gf_eval(model1, bad)
        with pytest.raises(InputError):
            lp.gf_eval_series(model1, bad, 10)


def test_gf_series_close_on_awkward_models():
    models = [
        lp.PoissonModel(EXAMPLE1, [1.0, 1.0, 1.0]),
        lp.PoissonModel([[1, 0, 2], [0, 0, 1]], [2.0, 1.0, 0.5]),
        lp.PoissonModel([[1, 1], [2, 2]], [1.5, 0.25]),
        lp.PoissonModel([[3, 1, 0, 2]], [0.5, 2.0, 1.0, 0.0]),
    ]
    for model in models:
        for z in ([0.5] * model.m_full, [0.1] * model.m_full):
            direct = lp.gf_eval(model, z)
            series = lp.gf_eval_series(model, z, 40)
            assert abs(direct - series) <= 1e-9
            assert series <= direct + 1e-15  # dropped tail is nonnegative


def test_pmf_table_matches_pmf(model1):
    table = lp.pmf_table(model1, 6)
    assert table.shape == (7, 7)
    for b1 in range(7):
        for b2 in range(7):
            assert rel_close(table[b1, b2], lp.pmf(model1, [b1, b2]).prob)


def test_pmf_table_guards(model1):
    with pytest.raises(InputError):
        lp.pmf_table(model1, -1)
    with pytest.raises(InputError):
        lp.pmf_table(model1, 100_000)


# ------------------------------------------------- model validation

def test_model_validation_errors():
    with pytest.raises(InputError):
        lp.PoissonModel([[1.5, 2]], [1.0, 1.0])
    with pytest.raises(InputError):
        lp.PoissonModel([[1, 2]], [1.0])
    with pytest.raises(InputError):
        lp.PoissonModel([[1, 2]], [1.0, -1.0])
    with pytest.raises(InputError):
        lp.PoissonModel([[1, 2]], ["a", "b"])
    with pytest.raises(InputError):
        lp.PoissonModel([[-1, 2]], [1.0, 1.0])


def test_model_from_dict_validation():
    good = {"a": [[1, 0, 1], [0, 2, 1]], "lambda": [1, 1, 1], "name": "x"}
    model = lp.model_from_dict(good)
    assert model.name == "x"
    assert model.m_full == 2
    with pytest.raises(InputError):
        lp.model_from_dict({"a": [[1]]})
    with pytest.raises(InputError):
        lp.model_from_dict({"a": [[1]], "lambda": [1], "extra": 1})
    with pytest.raises(InputError):
        lp.model_from_dict({"a": [[1]], "lambda": [1], "name": 7})
    with pytest.raises(InputError):
        lp.model_from_dict([1, 2])


def test_load_model_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"a": [[1, 1]], "lambda": [1.0, 2.0]}')
    model = lp.load_model_file(path)
    assert model.n_full == 2
    with pytest.raises(InputError):
        lp.load_model_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        lp.load_model_file(bad)
