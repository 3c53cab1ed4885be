import json
import math

import numpy as np
import pytest
import scipy.special as sp

from mellin_saddle import (BuildError, FunctionSpec, SpecError,
                           audit_admissibility, build, build_positive_type,
                           build_theorem3, ell_exp_sqrt_log, ell_power,
                           exp_scale, gamma_shift, iterated_log, log_of_scale,
                           monomial_exponent, positive_type_degenerate,
                           positive_type_factorial, positive_type_iterated_log,
                           power, product, quotient, shift_normalize)
from mellin_saddle.catalog import SlowlyVaryingEll


def _random_sector_points(f, n=100, rho_hi=100.0, seed=11):
    rng = np.random.default_rng(seed)
    rho = np.exp(rng.uniform(0.0, math.log(rho_hi), n))
    theta = rng.uniform(-(f.alpha0 - 0.3), f.alpha0 - 0.3, n)
    return rho * np.exp(1j * theta)


def all_catalog_weights():
    g = gamma_shift(0.0)
    return [
        gamma_shift(0.0),
        gamma_shift(1.0),
        iterated_log(1.0, 1.0, 1, math.e),
        iterated_log(0.5, 0.7, 2, 20.0),
        exp_scale(gamma_shift(1.0), 0.8),
        shift_normalize(gamma_shift(0.0), 2.0),
        power(gamma_shift(1.0), 1.5),
        product(gamma_shift(1.0), iterated_log(1.0, 1.0, 1, math.e)),
        build_theorem3(ell_power(1.0, 1.0)),
        build_positive_type(positive_type_factorial()),
    ]


# ---------------------------------------------------------------------------
# factorial shifts
# ---------------------------------------------------------------------------

def test_gamma_shift_factorials(gamma1):
    for n in range(6):
        got = math.exp(float(np.real(gamma1.log_gamma(n + 1.0 + 0j))))
        assert got == pytest.approx(math.factorial(n + 1), rel=1e-12)


def test_plain_gamma_prototype(gamma0):
    for n in range(1, 7):
        got = math.exp(float(np.real(gamma0.log_gamma(n + 1.0 + 0j))))
        assert got == pytest.approx(math.factorial(n), rel=1e-12)
    assert gamma0.one_over_gamma0 == 0.0


def test_one_over_gamma0_conventions(gamma1, iterlog):
    assert gamma1.one_over_gamma0 == pytest.approx(1.0, rel=1e-5)
    assert iterlog.one_over_gamma0 == pytest.approx(1.0, rel=1e-5)
    g3 = gamma_shift(3.0)
    assert g3.one_over_gamma0 == pytest.approx(1.0 / math.gamma(3.0), rel=1e-5)


# ---------------------------------------------------------------------------
# iterated-log weights
# ---------------------------------------------------------------------------

def test_iterated_log_closed_form(iterlog):
    s = 3.0 + 0j
    want = 3.0 * math.log(math.log(3.0 + math.e))
    assert complex(iterlog.log_gamma(s)) == pytest.approx(want, rel=1e-13)
    assert iterlog.c_gamma == pytest.approx(math.e - 1.0)


def test_iterated_log_epsilon_decay(iterlog):
    # eps ~ 1/log rho for the log scale
    for rho in [1e3, 1e5]:
        eps = complex(iterlog.epsilon(np.complex128(rho))).real
        assert eps == pytest.approx(1.0 / math.log(rho), rel=0.05)


def test_iterated_log_rejects_small_c():
    with pytest.raises(BuildError):
        iterated_log(1.0, 1.0, 1, 2.0)      # log(2) < 1
    with pytest.raises(BuildError):
        iterated_log(1.0, 1.0, 2, 5.0)      # loglog(5) < 1
    with pytest.raises(BuildError):
        iterated_log(-1.0, 1.0, 1, math.e)
    # the boundary case log_1(e) = 1 is the standard example and must build
    iterated_log(1.0, 1.0, 1, math.e)


# ---------------------------------------------------------------------------
# closure rules
# ---------------------------------------------------------------------------

def test_exp_scale_shifts_phi(gamma1):
    f = exp_scale(gamma1, 0.7)
    s = 4.0 + 1.0j
    assert complex(f.dlog_gamma(s)) == pytest.approx(
        complex(gamma1.dlog_gamma(s)) + 0.7, rel=1e-13)


def test_shift_normalize_value(gamma0):
    f = shift_normalize(gamma0, 2.0)
    # gamma(s+2)/gamma(2): at s = 3 this is Gamma(5)/Gamma(2) = 24
    got = math.exp(float(np.real(f.log_gamma(3.0 + 0j))))
    assert got == pytest.approx(24.0, rel=1e-12)
    assert f.c_gamma == pytest.approx(gamma0.c_gamma + 2.0)


def test_product_is_sum_of_log_gammas(gamma1, iterlog):
    f = product(gamma1, iterlog)
    s = _random_sector_points(f, 10)
    lhs = f.log_gamma(s)
    rhs = gamma1.log_gamma(s) + iterlog.log_gamma(s)
    assert np.allclose(lhs, rhs, rtol=0, atol=0)   # composition-level identity


def test_power_scales_log_gamma(gamma1):
    f = power(gamma1, 2.5)
    s = 3.3 + 0.4j
    assert complex(f.log_gamma(s)) == pytest.approx(
        2.5 * complex(gamma1.log_gamma(s)), rel=1e-14)


def test_quotient_accepts_valid_pair(gamma1):
    sq = product(gamma1, gamma1)
    f = quotient(sq, gamma1)
    s = 5.0 + 0j
    assert complex(f.log_gamma(s)) == pytest.approx(
        complex(gamma1.log_gamma(s)), rel=1e-13)


def test_quotient_rejects_decreasing_ratio(gamma1):
    small = exp_scale(gamma1, -5.0)   # gamma1 * e^{-5s} < gamma1
    with pytest.raises(BuildError, match="rho"):
        quotient(small, gamma1)


def test_log_of_scale_matches_deeper_log(iterlog):
    # from L = log(s+e): (log L(s+1))^s = exp(s log_3(s+1+e))
    f = log_of_scale(iterlog)
    s = np.array([2.0 + 0j, 10.0 + 3j])
    w = s + 1.0 + math.e
    want = s * np.log(np.log(np.log(w)))
    assert np.allclose(f.log_gamma(s), want, rtol=1e-12)


def test_log_of_scale_rejects_small_scale(gamma0):
    # the factorial prototype has L near 1, log L(s+1) dips negative
    with pytest.raises(BuildError, match="log L"):
        log_of_scale(gamma0)


# ---------------------------------------------------------------------------
# slowly-varying constructor
# ---------------------------------------------------------------------------

def test_theorem3_closed_form(theorem3_power):
    # ell = 1+rho, c = 1: int_1^inf du/((1+u)(s+u)) = log((s+1)/2)/(s-1)
    for s in [3.0 + 0j, 7.5 + 2.5j, 0.5 + 0j, 12.0 - 4.0j]:
        want = s * s * np.log((s + 1.0) / 2.0) / (s - 1.0)
        assert complex(theorem3_power.log_gamma(s)) == pytest.approx(
            complex(want), rel=1e-12)


def test_theorem3_derivatives_consistent(theorem3_power):
    s0 = 4.0 + 1.5j
    h = 1e-5
    fd = (theorem3_power.log_gamma(s0 + h) - theorem3_power.log_gamma(s0 - h)) / (2 * h)
    assert complex(theorem3_power.dlog_gamma(s0)) == pytest.approx(fd, rel=1e-8)
    fd2 = (theorem3_power.dlog_gamma(s0 + h) - theorem3_power.dlog_gamma(s0 - h)) / (2 * h)
    assert complex(theorem3_power.d2log_gamma(s0)) == pytest.approx(fd2, rel=1e-7)


def test_theorem3_epsilon_matches_scale_oracle(theorem3_power):
    # if rho ell'/ell has a limit, eps inherits it: here rho/(1+rho) -> 1
    for rho in [1e4, 1e5, 1e6]:
        eps = complex(theorem3_power.epsilon(np.complex128(rho))).real
        oracle = rho / (1.0 + rho)
        assert abs(eps / oracle - 1.0) < 0.02


def test_theorem3_rejects_constant_scale():
    with pytest.raises(BuildError, match="constant or decreasing"):
        SlowlyVaryingEll(log_ell=lambda u: np.ones_like(u),
                         dlog_ell=lambda u: np.zeros_like(u), c=1.0)


def test_exp_sqrt_log_scale_builds():
    f = build_theorem3(ell_exp_sqrt_log(1.0))
    eps = complex(f.epsilon(np.complex128(1e6))).real
    # rho ell'/ell = rho/(2 sqrt(log(1+rho)) (1+rho)) -> 0
    assert 0 < eps < 0.2


# ---------------------------------------------------------------------------
# positive-type representations
# ---------------------------------------------------------------------------

def test_factorial_measure_matches_loggamma(factorial_measure):
    sig = np.array([1.0, 2.0, 5.0, 11.0, 17.0, 29.0, 50.0])
    got = factorial_measure.log_gamma(sig + 0j)
    want = sp.loggamma(sig + 1.0)
    err = np.abs(got - want) / np.maximum(np.abs(want), 1.0)
    assert float(np.max(err)) < 1e-8
    assert factorial_measure.positive_type


def test_jump_measure_matches_iterated_log():
    pt = build_positive_type(positive_type_iterated_log(beta=1.0, k=1, c=10.0))
    direct = iterated_log(1.0, 1.0, 1, 10.0)
    sig = np.array([1.0, 4.0, 9.0, 25.0, 50.0])
    got = pt.log_gamma(sig + 0j)
    want = direct.log_gamma(sig + 0j)
    assert np.max(np.abs(got - want) / np.abs(want)) < 2e-4
    assert pt.positive_type and not pt.degenerate


def test_degenerate_measure_flagged():
    f = build_positive_type(positive_type_degenerate(0.7))
    assert f.degenerate
    assert complex(f.log_gamma(3.0 + 0j)) == pytest.approx(2.1, rel=1e-12)


def test_negative_density_rejected():
    from mellin_saddle import PositiveTypeSpec
    spec = PositiveTypeSpec(A=0.0, B=0.0, a=0.0,
                            measure_density=lambda u: np.sin(u),
                            support_cut=10.0, label="bad")
    with pytest.raises(BuildError, match="negative"):
        build_positive_type(spec)


# ---------------------------------------------------------------------------
# shared invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("f", all_catalog_weights(),
                         ids=lambda f: f.label)
def test_real_positive_on_ray(f):
    sigma = np.geomspace(max(0.02, -(-f.c_gamma) + 0.01) if f.c_gamma == 0
                         else 0.05, 1e3, 40)
    lg = f.log_gamma(sigma + 0j)
    assert float(np.max(np.abs(np.imag(lg)))) < 1e-10
    # and the imaginary part stays identically zero along the ray: its
    # sigma-derivative (the imag part of Phi) vanishes too
    assert float(np.max(np.abs(np.imag(f.dlog_gamma(sigma + 0j))))) < 1e-10


@pytest.mark.parametrize("f", all_catalog_weights(),
                         ids=lambda f: f.label)
def test_schwarz_symmetry(f):
    s = _random_sector_points(f, 25)
    a = f.log_gamma(np.conj(s))
    b = np.conj(f.log_gamma(s))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("f", all_catalog_weights(),
                         ids=lambda f: f.label)
def test_derivative_vs_central_difference(f):
    s = _random_sector_points(f, 100)
    h = 1e-5 * np.abs(s)
    fd = (f.log_gamma(s + h) - f.log_gamma(s - h)) / (2 * h)
    d = f.dlog_gamma(s)
    assert float(np.max(np.abs(d - fd) / np.abs(d))) < 1e-6


@pytest.mark.parametrize("f", all_catalog_weights(),
                         ids=lambda f: f.label)
def test_epsilon_positive_bounded_on_probe(f):
    rho = np.geomspace(1.0, 1e6, 30)
    eps = np.real(f.epsilon(rho + 0j))
    if f.label == "gamma(s)":
        rho = rho[rho > 2.0]
        eps = np.real(f.epsilon(rho + 0j))
    assert np.all(eps > 0)
    assert np.max(eps) < 10.0


# ---------------------------------------------------------------------------
# admissibility audit
# ---------------------------------------------------------------------------

def test_audit_passes_shifted_factorial(gamma1):
    rep = audit_admissibility(gamma1)
    assert rep.passed, rep.to_dict()
    assert rep.epsilon_sup == pytest.approx(1.0, abs=0.05)


def test_audit_passes_iterated_log(iterlog):
    rep = audit_admissibility(iterlog)
    assert rep.passed, rep.to_dict()


def test_audit_fails_square_exponent():
    rep = audit_admissibility(monomial_exponent(2.0))
    by_name = {c.name: c for c in rep.conditions}
    assert not by_name["B: rho|eps'|/eps small on tail"].passed
    assert not rep.passed


def test_audit_flags_plain_gamma_near_origin(gamma0):
    # eps(rho) < 0 on (0, ~1.46): the unshifted prototype fails the
    # ray-positivity condition even though it is fine asymptotically
    rep = audit_admissibility(gamma0, grid=np.geomspace(1.0, 1e7, 61))
    assert rep.epsilon_min < 0


# ---------------------------------------------------------------------------
# serializable specs
# ---------------------------------------------------------------------------

def test_spec_round_trip():
    spec = FunctionSpec("product", children=[
        FunctionSpec("gamma_shift", {"c": 1.0}),
        FunctionSpec("iterated_log", {"a": 1.0, "b": 1.0, "k": 1, "c": math.e}),
    ])
    text = spec.to_json()
    back = FunctionSpec.from_json(text)
    assert back.to_dict() == spec.to_dict()
    f = build(back)
    s = 4.0 + 0.5j
    want = complex(gamma_shift(1.0).log_gamma(s)) + \
        complex(iterated_log(1, 1, 1, math.e).log_gamma(s))
    assert complex(f.log_gamma(s)) == pytest.approx(want, rel=1e-13)


def test_spec_validation_errors():
    with pytest.raises(SpecError):
        FunctionSpec("unknown_kind")
    with pytest.raises(SpecError):
        FunctionSpec("product", children=[FunctionSpec("gamma_shift")])
    with pytest.raises(SpecError):
        FunctionSpec.from_json("{not json")
    with pytest.raises(SpecError):
        build(FunctionSpec("exp_tau_scale",
                           children=[FunctionSpec("gamma_shift")]))


def test_spec_presets_build():
    for text in [
        '{"kind": "theorem3", "params": {"ell": "power", "a": 1.0, "c": 1.0}}',
        '{"kind": "theorem3", "params": {"ell": "exp_sqrt_log", "c": 1.0}}',
        '{"kind": "positive_type", "params": {"preset": "factorial"}}',
        '{"kind": "positive_type", "params": {"preset": "iterated_log_jump", '
        '"beta": 1.0, "k": 1, "c": 10.0}}',
        '{"kind": "positive_type", "params": {"preset": "degenerate", "tau": 1.0}}',
    ]:
        f = build(FunctionSpec.from_json(text))
        assert np.isfinite(complex(f.log_gamma(2.0 + 0j)).real)
