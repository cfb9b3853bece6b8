import json

import numpy as np
import pytest
from scipy import stats

from gtdlab import densities as dn
from gtdlab import functionals as fn
from gtdlab import momentlab as ml
from gtdlab.densities import Density
from gtdlab.errors import DomainError, InfeasibleError, ParameterError
from gtdlab.transform import differential_escort
from oracles import euler_table, quad


def test_euler_numbers_against_table():
    E = ml.euler_numbers(8)  # E_0, E_2, ..., E_16
    assert [abs(e) for e in E] == euler_table()
    assert all(ml.euler_number(k) == 0 for k in range(1, 17, 2))
    assert ml.euler_number(8) == 1385 and ml.euler_number(4) == 5
    assert ml.euler_number(2) == -1  # signs alternate


def test_euler_guard():
    with pytest.raises(ParameterError):
        ml.euler_numbers(31)
    assert len(ml.euler_numbers(30)) == 31


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_cauchy_moments_two_routes(i):
    closed = ml.cauchy_cumulative_moment(2 * i)
    assert closed == pytest.approx((np.pi / 4) ** i * euler_table()[i], rel=1e-14)
    q = ml.cauchy_cumulative_moment_quadrature(2 * i)
    assert q.value == pytest.approx(closed, rel=1e-6)


def test_cauchy_moment_examples():
    assert ml.cauchy_cumulative_moment(2) == pytest.approx(0.7853981634, rel=1e-10)
    assert ml.cauchy_cumulative_moment(4) == pytest.approx(3.0842514, rel=1e-7)
    assert ml.cauchy_cumulative_moment(3) == 0.0
    assert ml.cauchy_cumulative_moment_quadrature(3).value == pytest.approx(0.0, abs=1e-10)


def test_moment_sequence_json():
    s = ml.MomentSequence.cauchy([1, 2, 3, 4])
    assert s.odd_vanish and s.gamma == 0.5
    t = ml.MomentSequence.from_json(s.to_json())
    assert t.orders == s.orders and t.values == s.values and t.label == "cauchy"
    with pytest.raises(ParameterError):
        ml.MomentSequence.from_json(json.dumps({"gamma": 1, "orders": [1]}))
    with pytest.raises(ParameterError):
        ml.MomentSequence(1.0, [1, 2], [1.0])
    with pytest.raises(ParameterError):
        ml.MomentSequence(1.0, [0], [1.0])


def test_carleman():
    s = ml.MomentSequence.cauchy(range(1, 21))
    c = ml.carleman_diagnostic(s, 10)
    inc = np.diff(c)
    assert np.all(inc > 0) and np.all(np.diff(inc) < 0)
    # increments decay like 1/i, not geometrically
    assert inc[-1] > 0.5 * inc[-2]
    ones = ml.MomentSequence(1.0, list(range(1, 21)), [1.0] * 20)
    assert np.allclose(ml.carleman_diagnostic(ones, 10), np.arange(1, 11))
    from math import factorial
    big = ml.MomentSequence(1.0, [2 * i for i in range(1, 11)],
                            [float(factorial(2 * i)) ** 2 for i in range(1, 11)])
    cb = ml.carleman_diagnostic(big, 10)
    ib = np.diff(cb)
    i = np.arange(2, 11)
    # terms ~ e^2 / (4 i^2) by Stirling: summable, unlike the 1/i decay above
    assert np.all(np.diff(ib * i) < 0)
    assert np.all(ib * i ** 2 < 2.5)
    bad = ml.MomentSequence(1.0, [2], [-1.0])
    with pytest.raises(DomainError):
        ml.carleman_diagnostic(bad, 1)


def test_maxent_exponential():
    f = ml.maxent_reconstruct(ml.MomentSequence(1.0, [1], [1.0]), support="positive")
    xs = np.linspace(0, 20, 41)
    assert np.allclose(f.pdf(xs), np.exp(-xs), rtol=1e-9, atol=1e-15)


def test_maxent_gamma_two():
    h = ml.maxent_reconstruct(ml.MomentSequence(2.0, [1], [1.0]), support="positive")
    # D_{1/2} of the unit exponential: 1 - y/2 on [0, 2]
    assert h.support[1] == pytest.approx(2.0, rel=1e-10)
    ys = np.linspace(0, 2, 41)[:-1]
    assert np.max(np.abs(h.pdf(ys) - (1 - ys / 2))) < 1e-8
    assert fn.signed_cumulative_moment(h, 1, 2.0).value == pytest.approx(1.0, rel=1e-6)


# the L1 integrand sits at rounding level, which QUADPACK reports
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_maxent_gaussian():
    f = ml.maxent_reconstruct(ml.MomentSequence(1.0, [1, 2], [0.0, 0.5]))
    # mass beyond |x| = 12 is below exp(-144)
    l1 = quad(lambda x: abs(float(f.pdf(x)) - np.exp(-x * x) / np.sqrt(np.pi)), -12, 12)
    assert l1 < 1e-4
    assert fn.moment(f, 2).value == pytest.approx(0.5, rel=1e-6)


def test_maxent_four_moments():
    # moments of exp(-x^4) / (2 Gamma(5/4)) are recovered with theta_4 = -1
    from scipy.special import gamma as G
    m2 = G(3 / 4) / G(1 / 4)
    m4 = 0.25
    sol = ml.maxent_standard([0.0, m2, 0.0, m4])
    assert sol.theta[-1] == pytest.approx(-1.0, rel=1e-6)
    assert abs(sol.theta[1]) < 1e-6


def test_maxent_errors():
    with pytest.raises(InfeasibleError):
        ml.maxent_standard([0.0])  # odd leading order on the real line
    with pytest.raises(InfeasibleError):
        ml.maxent_standard([1.0, 3.0], support=(0.0, np.inf))  # needs a positive x^2 coefficient
    with pytest.raises(InfeasibleError):
        ml.maxent_standard([0.0, -1.0])
    with pytest.raises(ParameterError):
        ml.maxent_standard([0.0] * 7 + [1.0])
    with pytest.raises(ParameterError):
        ml.maxent_reconstruct(ml.MomentSequence(1.0, [2], [1.0]))
    with pytest.raises(ParameterError):
        ml.maxent_reconstruct(ml.MomentSequence(0.0, [1, 2], [0.0, 1.0]))


def _entropy(pdf, lo, hi):
    def h(x):
        v = float(pdf(x))
        return -v * np.log(v) if v > 0 else 0.0
    return quad(h, lo, hi)


@pytest.mark.parametrize("omega", [1.0, 2.5])
def test_maxent_optimality_perturbation(omega):
    f = ml.maxent_reconstruct(ml.MomentSequence(1.0, [1, 2], [0.0, 0.5]))
    pdf = lambda x: float(f.pdf(x))
    # psi = cos(omega x) minus its projection on span{1, x, x^2} in L2(f)
    basis = [lambda x: 1.0, lambda x: x, lambda x: x * x]
    R = 12.0  # f < exp(-144) beyond
    G = np.array([[quad(lambda x: a(x) * b(x) * pdf(x), -R, R, epsabs=1e-14) for b in basis] for a in basis])
    r = np.array([quad(lambda x: np.cos(omega * x) * a(x) * pdf(x), -R, R, epsabs=1e-14) for a in basis])
    c = np.linalg.solve(G, r)

    def psi(x):
        return np.cos(omega * x) - c[0] - c[1] * x - c[2] * x * x
    for a in basis:
        assert abs(quad(lambda x: psi(x) * a(x) * pdf(x), -R, R, epsabs=1e-13)) < 1e-10
    S0 = _entropy(pdf, -R, R)
    for eps in (1e-4, -1e-4):
        # 1 + eps psi stays positive on [-R, R]
        S = _entropy(lambda x: pdf(x) * (1 + eps * psi(x)), -R, R)
        assert S <= S0 + 1e-12


def _positive(name, pdf, scale):
    return Density(pdf, (0.0, np.inf), name, scale=scale)


COMPETITORS = [
    _positive("gamma2", lambda x: stats.gamma.pdf(x, 2, scale=0.5), 0.5),
    Density(lambda x: np.full(np.shape(x), 0.5), (0.0, 2.0), "uniform(0,2)", scale=2.0),
    _positive("half-normal", lambda x: stats.halfnorm.pdf(x, scale=np.sqrt(np.pi / 2)), 1.0),
    _positive("weibull2", lambda x: stats.weibull_min.pdf(x, 2, scale=2 / np.sqrt(np.pi)), 1.0),
    _positive("mixture", lambda x: np.exp(-2 * x) + np.exp(-x / 1.5) / 3, 1.0),
]


def test_cumulative_maxent_beats_competitors():
    gamma = 2.0
    best = ml.maxent_reconstruct(ml.MomentSequence(gamma, [1], [1.0]), support="positive")
    S_best = fn.shannon(best).value
    for g in COMPETITORS:
        assert quad(lambda x: x * float(g.pdf(x)), *g.support) == pytest.approx(1.0, rel=1e-9)
        h = differential_escort(g, 1 / gamma, method="numeric")
        assert fn.signed_cumulative_moment(h, 1, gamma).value == pytest.approx(1.0, rel=1e-6)
        assert fn.shannon(h).value < S_best


def test_roundtrip_cauchy():
    r = ml.characterize_roundtrip(dn.cauchy(), 0.5, 4)
    table = [0.0, np.pi / 4, 0.0, 5 * (np.pi / 4) ** 2]
    assert np.allclose(r.cumulative, table, rtol=1e-6, atol=1e-9)
    assert r.max_rel_error < 1e-6 and r.identity_error < 1e-6


def test_roundtrip_identity_order_one():
    r = ml.characterize_roundtrip(dn.logistic(), 1.0, 3)
    assert r.max_rel_error < 1e-9 and r.identity_error == 0.0


def test_roundtrip_sech():
    r = ml.characterize_roundtrip(dn.hyperbolic_secant(), 2.0, 3, mode="standard")
    assert r.max_rel_error < 1e-6 and r.identity_error < 1e-6
    # sech^(1-2) grows exponentially: the cumulative moments of sech itself diverge
    with pytest.raises(DomainError):
        ml.characterize_roundtrip(dn.hyperbolic_secant(), 2.0, 3)


@pytest.mark.parametrize("p,lam", [(2, 0.0), (3, 0.5), (2, 0.5)])
def test_auxiliary_exponential_family(p, lam):
    ps = p / (p - 1)
    alpha = 1 + (lam - 1) / ps
    d = differential_escort(dn.stretched_gaussian(p, lam), alpha)
    ys = np.array([4.0, 6.0, 8.0]) * d.scale
    lg = np.log(d.pdf(ys))
    assert lg[2] - lg[1] == pytest.approx(lg[1] - lg[0], rel=0.02)  # exponential decay
    assert fn.moment(d, 12).finite
