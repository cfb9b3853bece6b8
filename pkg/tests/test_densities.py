import warnings

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from gtdlab import densities as dn
from gtdlab import gtf
from gtdlab.errors import DispatchError, ParameterError
from oracles import quad, stretched_gaussian_pdf


def mass(d):
    lo, hi = d.support
    return quad(lambda x: float(d.pdf(x)), lo, hi)


def test_gaussian_member():
    g = dn.stretched_gaussian(2, 1)
    xs = np.linspace(-3, 3, 13)
    assert np.allclose(g.pdf(xs), np.exp(-xs ** 2) / np.sqrt(np.pi), rtol=1e-14, atol=0)
    assert dn.stretched_gaussian_norm(2, 1) == pytest.approx(0.5641895835, rel=1e-10)


def test_cauchy_member():
    g = dn.stretched_gaussian(2, 0)
    xs = np.linspace(-5, 5, 11)
    assert np.allclose(g.pdf(xs), 1 / (np.pi * (1 + xs ** 2)), rtol=1e-14, atol=0)
    assert dn.stretched_gaussian_norm(2, 0) == pytest.approx(1 / np.pi, rel=1e-14)


def test_compact_member():
    g = dn.stretched_gaussian(2, 2)
    assert g.support == pytest.approx((-1.0, 1.0))
    assert g.pdf(1.0) == 0.0 and g.pdf(0.999) > 0
    assert mass(g) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("p,lam", [(2, 2), (2, 0.8), (3, 1.5), (1.5, 0.5), (4, 1.0)])
def test_norm_against_direct_formula(p, lam):
    pdf, z = stretched_gaussian_pdf(p, lam)
    g = dn.stretched_gaussian(p, lam)
    xs = np.linspace(-0.9, 0.9, 7) * min(1.0, g.support[1])
    assert np.allclose(g.pdf(xs), [pdf(x) for x in xs], rtol=1e-9)


def test_gauss_params_validation():
    with pytest.raises(ParameterError):
        dn.GaussParams(2, -1.5)  # lambda <= 1 - p*
    with pytest.raises(ParameterError):
        dn.GaussParams(1, 1)


def test_hyperbolic_secant():
    f = dn.hyperbolic_secant()
    ys = np.linspace(-6, 6, 25)
    assert np.allclose(f.pdf(ys), 1 / (np.pi * np.cosh(ys)), rtol=1e-12, atol=0)
    assert dn.GtdParams(2, 0, -1).kappa == pytest.approx(1.0)


def test_logistic_shape():
    f = dn.logistic()
    k = np.sqrt(2 / 3)
    assert dn.GtdParams(2, 0.5, 0).kappa == pytest.approx(k, rel=1e-14)
    ys = np.linspace(-8, 8, 33)
    a = k / 2  # int sech^2(k y) dy = 2 / k
    assert np.allclose(f.pdf(ys), a / np.cosh(k * ys) ** 2, rtol=1e-11, atol=0)


def test_raised_cosine_shape():
    f = dn.raised_cosine()
    k = np.sqrt(2)
    assert dn.GtdParams(2, 1.5, 2).kappa == pytest.approx(k, rel=1e-14)
    R = np.pi / (2 * k)
    assert f.support[1] == pytest.approx(R, rel=1e-12)
    ys = np.linspace(-R, R, 33)[1:-1]
    a = 1 / R  # int cos^2 over the support is R
    assert np.allclose(f.pdf(ys), a * np.cos(k * ys) ** 2, rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("args", [(2, 1, 1), (2, 2, 2), (3, 0.5, 1.0)])
def test_gtd_dispatch_errors(args):
    with pytest.raises(DispatchError):
        dn.gtd(*args)


def test_g_frak_dispatch():
    with pytest.raises(DispatchError):
        dn.g_frak(2, 1)


@pytest.mark.parametrize("beta", [1 - 1e-3, 1 + 1e-3])
def test_g_frak_limit(beta):
    g, G = dn.g_frak(2, beta), dn.stretched_gaussian(2, 1)
    xs = np.linspace(-2, 2, 41)
    assert np.max(np.abs(g.pdf(xs) - G.pdf(xs))) < 1e-2


def test_g_frak_supports():
    # compact for beta > 1 (radius Gamma(1/p*)/(p* c^(1/p*)), c = 1 - 1/beta), R for 0 < beta < 1
    g = dn.g_frak(2, 2)
    R = dn.g_frak_radius(2, 2)
    assert R == pytest.approx(np.sqrt(np.pi) / (2 * np.sqrt(0.5)), rel=1e-14)
    assert g.support[1] == pytest.approx(R, rel=1e-10)
    assert mass(g) == pytest.approx(1.0, abs=1e-8)
    h = dn.g_frak(2, 0.5)
    assert np.isinf(h.support[1])
    assert mass(h) == pytest.approx(1.0, abs=1e-8)


def test_minimizer_dispatch():
    assert dn.minimizer(2, 1, 1).meta["family"] == "stretched_gaussian"
    assert dn.minimizer(2, 0, -1).meta["family"] == "gtd"
    assert dn.minimizer(2, 2, 1).meta["family"] == "g_frak"


def test_tail_and_critical_gamma():
    c = dn.GtdParams(2, 0, 0)
    assert dn.tail_exponent(c) == 2 and dn.critical_gamma(c) == 0.5
    assert np.isinf(dn.tail_exponent(dn.GtdParams(2, 0, -1)))
    assert dn.critical_gamma(dn.GtdParams(2, 1.5, 2)) == 1.5


@pytest.mark.parametrize("q,gamma,expected", [(2, 1, False), (17, 0.5, True), (1, 0.75, True),
                                              (2.5, 0.75, False)])
def test_moment_finiteness_cauchy(q, gamma, expected):
    assert dn.moment_finiteness(dn.GtdParams(2, 0, 0), q, gamma) is expected


@pytest.mark.parametrize("p,beta,lam", [(2, 0.25, 0.0), (3, 0.2, 0.5), (2, 0.5, 1.2)])
def test_tail_slope(p, beta, lam):
    gp = dn.GtdParams(p, beta, lam)
    f = dn.gtd(p, beta, lam)
    slope = np.log(f.pdf(1e4) / f.pdf(1e2)) / np.log(100.0)
    assert slope == pytest.approx(-gp.eta, rel=0.02)


def _rho_power_normalized(f, lam):
    lo, hi = f.support
    z = quad(lambda x: float(f.pdf(x)) ** lam, lo, hi)
    return lambda x: f.pdf(x) ** lam / z


@pytest.mark.parametrize("p,beta,lam", [(2, 1.5, 2.0), (3, 1.2, 1.5), (2, 0.9, 0.5)])
def test_symmetry_relation(p, beta, lam):
    ps = p / (p - 1)
    f = dn.minimizer(p, beta, lam)
    u = _rho_power_normalized(f, lam)
    g = dn.minimizer(p, (beta * ps + lam - 1) / (lam * ps), 1 / lam)
    k = u(0.0) / g.pdf(0.0)  # the relation holds up to a scaling
    R = min(f.support[1], g.support[1] / k, 4.0)
    xs = np.linspace(-R, R, 41)[1:-1]
    assert np.max(np.abs(u(xs) - k * g.pdf(k * xs))) < 1e-6


@pytest.mark.parametrize("p,beta,lam", [(2, 0.5, 0.0), (2, 0.0, -1.0), (3, 0.8, 0.4)])
def test_cosh_branch_dual_representation(p, beta, lam):
    f = dn.gtd(p, beta, lam)
    m = f.meta
    v, w, k, A, E = m["v"], m["w"], m["k"], m["A"], m["E"]
    r = gtf.TrigParams(v, w).r
    dual = gtf.TrigParams(r, w)
    lim = dual.half_pi / k if np.isfinite(dual.half_pi) else 5.0
    ys = np.linspace(-0.95 * lim, 0.95 * lim, 31)
    # cosh_{v,w} = cos_{r,w}^(-r/v) and the pdf is A cosh^(-v E)
    alt = A * np.abs(gtf.cos_vw(dual, k * np.abs(ys))) ** (r * E)
    assert np.allclose(f.pdf(ys), alt, rtol=1e-8, atol=1e-300)


valid_gtd = st.tuples(st.sampled_from([1.5, 2.0, 3.0]), st.floats(0.05, 2.5), st.floats(-1.5, 2.5))


@given(valid_gtd)
def test_normalization_and_compactness(t):
    p, beta, lam = t
    assume(abs(lam - 1) > 0.05 and abs(beta - lam) > 0.05)
    try:
        gp = dn.GtdParams(p, beta, lam)
    except ParameterError:
        assume(False)
    assume(gp.bounded)
    if lam < 1:
        compact = beta > 1 + (lam - 1) / p
        assume(abs(beta - (1 + (lam - 1) / p)) > 0.05)
    else:
        compact = beta > 1
        assume(abs(beta - 1) > 0.05)
    # slow power tails need too much quadrature for a property run
    assume(compact or gp.eta > 1.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        f = dn.gtd(p, beta, lam)
    assert np.isfinite(f.support[1]) == compact
    assert mass(f) == pytest.approx(1.0, abs=1e-8)


def test_from_grid():
    xs = np.linspace(-4, 4, 401)
    f = dn.from_grid(xs, 3 * np.exp(-xs ** 2))
    # piecewise cubic: integrate knot to knot
    total = sum(quad(lambda x: float(f.pdf(x)), a, b) for a, b in zip(xs[:-1], xs[1:]))
    assert total == pytest.approx(1.0, abs=1e-10)
    assert f.cdf(4.0) == pytest.approx(1.0, abs=1e-12)
    assert f.pdf(0.0) == pytest.approx(1 / np.sqrt(np.pi), rel=1e-4)
    with pytest.raises(ParameterError):
        dn.from_grid(xs[::-1], np.ones_like(xs))


@pytest.mark.parametrize("spec,label", [("stretched-gaussian:2,1", "g[2,1]"), ("gtd:2,1.5,2", "gtd[2,1.5,2]"),
                                        ("cauchy", "cauchy"), ("uniform:0,1", "uniform(0,1)"),
                                        ("normal", "normal(1)"), ("normal:2", "normal(2)")])
def test_parse_density(spec, label):
    assert dn.parse_density(spec).label == label


@pytest.mark.parametrize("spec", ["nope:1", "gtd:2,1", "cauchy:3", "gtd:a,b,c", "gtd", "normal:1,2"])
def test_parse_density_errors(spec):
    with pytest.raises(ParameterError):
        dn.parse_density(spec)
