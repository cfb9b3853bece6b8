"""Generalized (v, w) trigonometric and hyperbolic functions.

Both inverse functions reduce to the incomplete integral

    J(a, b; X) = int_0^X s^(a-1) (1-s)^(b-1) ds,

with ``arcsin_{v,w}(y) = J(1/w, 1-1/v; |y|^w) / w`` and
``arsinh_{v,w}(y) = J(1/w, 1/v-1/w; |y|^w/(1+|y|^w)) / w``. The upper limit
is carried through its log-complement ``t = log(1 - X)`` so that values close
to the endpoint keep full precision. For b > 0 the integral is an incomplete
Beta function; for b <= 0 it is summed from two convergent series, or
integrated numerically in t when the series would need too many terms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError
from .numerics import integrate, newton_bisect


@dataclass(frozen=True)
class TrigParams:
    """Parameters (v, w) of the generalized trigonometric functions."""
    v: float
    w: float

    def __post_init__(self):
        if not (np.isfinite(self.v) and self.v != 0):
            raise ParameterError(f"v must be a nonzero real, got {self.v}")
        if not (np.isfinite(self.w) and self.w > 0):
            raise ParameterError(f"w must be positive, got {self.w}")

    @property
    def r(self) -> float:
        """Dual parameter solving 1/v + 1/r = 1 + 1/w (inf when undefined)."""
        d = 1.0 + 1.0 / self.w - 1.0 / self.v
        if d == 0:
            return np.inf
        r = 1.0 / d
        return 1.0 if abs(r - 1.0) < 1e-12 else r  # v == w up to rounding

    @property
    def half_pi(self) -> float:
        if 0 < self.v <= 1:
            return np.inf
        return special.beta(1.0 / self.w, 1.0 - 1.0 / self.v) / self.w

    @property
    def pi(self) -> float:
        return 2.0 * self.half_pi

    @property
    def hyperbolic_half_width(self) -> float:
        """Half-width of the range of arsinh, i.e. of the domain of sinh/cosh."""
        b = hyperbolic_b(self.v, self.w)
        if b <= 0:
            return np.inf
        return special.beta(1.0 / self.w, b) / self.w


def hyperbolic_b(v, w):
    """1/v - 1/w, with rounding noise around v == w snapped to 0."""
    b = 1.0 / v - 1.0 / w
    return 0.0 if abs(b) < 1e-12 else b


def _series_head(a, b, m, terms):
    """int_0^m s^(a-1)(1-s)^(b-1) ds by the binomial series in s (m <= m_split)."""
    acc = np.zeros_like(m)
    c = 1.0
    coefs = []
    for k in range(terms):
        coefs.append(c / (a + k))
        c *= (1.0 - b + k) / (k + 1.0)
    for ck in reversed(coefs):
        acc = acc * m + ck
    return acc * m ** a


def _series_tail(a, b, z1, z2, terms):
    """int over s in [1-e^z2, 1-e^z1] in the variable z = log(1-s).

    Expands (1-e^z)^(a-1) = sum_k d_k e^(kz), integrated term by term.
    """
    d = z2 - z1
    acc = np.zeros_like(z1)
    dk = 1.0
    for k in range(terms):
        c = k + b
        if c == 0:
            ek = d
        else:
            ek = np.exp(c * z2) * (-np.expm1(-c * d)) / c
        acc = acc + dk * ek
        dk *= (k + 1.0 - a) / (k + 1.0)
        if dk == 0:
            break
    return acc


def _split_point(a):
    return 0.5 if a <= 1 else 1.0 - 1.0 / (a + 1.0)


def _nterms(b, m):
    return int((40.0 + abs(b) * np.log(200.0 + abs(b))) / -np.log(m)) + 10


SERIES_MAX_TERMS = 4000
TINY = 1e-200


def _beta_quad(a, b, t):
    """J by quadrature of (1 - e^z)^(a-1) e^(b z) over z in [t, 0]."""
    def h(z):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp((a - 1.0) * np.log(-np.expm1(z)) + b * z)
    out = np.zeros_like(t)
    for i, ti in enumerate(t.flat):
        if ti < 0:
            out.flat[i] = integrate(h, ti, 0.0, rel_tol=1e-14, abs_tol=0.0,
                                    scale=min(1.0, -ti)).value
    return out


def _tiny(x, w):
    """Arguments where the small-x series replaces root finding."""
    with np.errstate(under="ignore"):
        return (np.abs(x) ** w < TINY) | (np.abs(x) < 1e-290)


def beta_integral(a, b, t):
    """J(a, b; X) with X = 1 - exp(t), t <= 0 (array)."""
    t = np.asarray(t, dtype=float)
    X = -np.expm1(t)
    if b > 0:
        B = special.beta(a, b)
        low = X <= 0.5
        out = np.empty_like(t)
        out[low] = B * special.betainc(a, b, X[low])
        out[~low] = B - B * special.betainc(b, a, np.exp(t[~low]))
        # exp(t) underflows here; int_0^y s^(b-1)(1-s)^(a-1) ds = y^b/b (1 + O(y))
        deep = t < -700.0
        out[deep] = B - np.exp(b * t[deep]) / b
        return out
    m = _split_point(a)
    if max(_nterms(b, m), _nterms(a, 1.0 - m)) > SERIES_MAX_TERMS:
        return _beta_quad(a, b, t)
    head = _series_head(a, b, np.minimum(X, m), _nterms(b, m))
    far = X > m
    out = head
    if np.any(far):
        z2 = np.log1p(-m)
        out = out.copy()
        out[far] += _series_tail(a, b, t[far], z2, _nterms(a, 1.0 - m))
    return out


def beta_integral_slope(a, b, t):
    """dJ/dt for X = 1 - exp(t)."""
    t = np.asarray(t, dtype=float)
    X = -np.expm1(t)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return -(X ** (a - 1.0)) * np.exp(t * b)


def solve_state(a, b, w, x):
    """Solve J(a, b; t)/w = x for t <= 0, x >= 0 (array).

    Points beyond the finite total (b > 0) return -inf.
    """
    x = np.asarray(x, dtype=float)
    t = np.zeros_like(x)
    total = special.beta(a, b) / w if b > 0 else np.inf
    beyond = x >= total
    t[beyond] = -np.inf
    # series J/w = X^(1/w) (1 + c1 X + ...) inverted to first order
    tiny = (x > 0) & _tiny(x, w)
    X = x[tiny] ** w
    t[tiny] = np.log1p(-X * (1.0 - w * a * (1.0 - b) / (a + 1.0) * X))
    todo = (x > 0) & ~beyond & ~tiny
    if not np.any(todo):
        return t
    xs = x[todo]
    # starting guesses: small-argument power law, large-argument asymptote
    guess = np.where(xs ** w < 0.5, np.log1p(-np.minimum(xs ** w, 0.5)), np.nan)
    if b < 0:
        big = np.log(-b * w * xs) / b
    elif b == 0:
        big = -w * xs
    else:
        big = np.full_like(xs, np.nan)
    guess = np.where(np.isnan(guess), big, guess)
    lo = np.where(np.isfinite(guess), np.minimum(2.0 * guess, -1.0), -1.0)
    for _ in range(14):
        val = beta_integral(a, b, lo) / w
        need = val < xs
        if not need.any():
            break
        lo = np.where(need, 2.0 * lo, lo)
    else:
        if (beta_integral(a, b, lo) / w < xs).any():
            raise DomainError("argument beyond the range of the generalized inverse function")

    def fdf(tt, sel):
        return beta_integral(a, b, tt) / w, beta_integral_slope(a, b, tt) / w

    t[todo] = newton_bisect(fdf, xs, lo, np.zeros_like(xs), guess,
                            increasing=False, indexed=True)
    return t


def _scalar_or_array(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def pi_vw(params: TrigParams) -> float:
    """pi_{v,w}; +inf for v in (0, 1]."""
    return params.pi


def arcsin_vw(params: TrigParams, y):
    """int_0^y (1-|t|^w)^(-1/v) dt for |y| < 1 (|y| = 1 allowed when finite)."""
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    if np.any(ay > 1) or np.any(np.isnan(y)):
        raise DomainError("arcsin_vw requires |y| <= 1")
    half = params.half_pi
    if np.any(ay == 1) and not np.isfinite(half):
        raise DomainError("arcsin_vw(+-1) diverges for v in (0, 1]")
    a = 1.0 / params.w
    b = 1.0 - 1.0 / params.v
    with np.errstate(divide="ignore"):
        t = np.log1p(-ay ** params.w)
    val = np.where(ay == 1, half, 0.0)
    inner = ay < 1
    val = np.array(val, dtype=float)
    val[inner] = beta_integral(a, b, t[inner]) / params.w
    return _scalar_or_array(y, np.sign(y) * val)


def _reduce(params, x):
    """Fold x onto the primary branch; returns (x_primary, cos_sign)."""
    half = params.half_pi
    x = np.asarray(x, dtype=float)
    if not np.isfinite(half):
        return x, np.ones_like(x)
    P = 2.0 * half
    xr = x - 2.0 * P * np.floor((x + 0.5 * P) / (2.0 * P))
    flip = xr > half
    xr = np.where(flip, P - xr, xr)
    return xr, np.where(flip, -1.0, 1.0)


def _sin_state(params, x):
    a = 1.0 / params.w
    b = 1.0 - 1.0 / params.v
    ax = np.minimum(np.abs(x), params.half_pi)
    return solve_state(a, b, params.w, ax)


def sincos_vw(params: TrigParams, x):
    """(sin_{v,w}(x), cos_{v,w}(x)) with periodic extension of period 2*pi_{v,w}."""
    xr, sgn = _reduce(params, x)
    t = _sin_state(params, xr)
    s = np.sign(xr) * (-np.expm1(t)) ** (1.0 / params.w)
    s = np.where(_tiny(xr, params.w), xr, s)
    with np.errstate(over="ignore", divide="ignore"):
        c = sgn * np.exp(t / params.v)
    return _scalar_or_array(x, s), _scalar_or_array(x, c)


def sin_vw(params: TrigParams, x):
    return sincos_vw(params, x)[0]


def cos_vw(params: TrigParams, x):
    """Derivative of sin_{v,w}; satisfies |cos|^v + |sin|^w = 1."""
    return sincos_vw(params, x)[1]


def arsinh_vw(params: TrigParams, y):
    """int_0^y (1+|t|^w)^(-1/v) dt for any real y."""
    y = np.asarray(y, dtype=float)
    if np.any(np.isnan(y)):
        raise DomainError("arsinh_vw received NaN")
    a = 1.0 / params.w
    b = hyperbolic_b(params.v, params.w)
    ay = np.abs(y)
    t = -np.log1p(ay ** params.w)
    val = np.where(np.isinf(ay), params.hyperbolic_half_width, 0.0)
    fin = np.isfinite(ay)
    val[fin] = beta_integral(a, b, t[fin]) / params.w
    return _scalar_or_array(y, np.sign(y) * val)


def _sinh_state(params, x, check=True):
    x = np.asarray(x, dtype=float)
    half = params.hyperbolic_half_width
    if check and np.any(np.abs(x) >= half):
        raise DomainError(f"sinh_vw/cosh_vw defined only for |x| < {half}")
    a = 1.0 / params.w
    b = hyperbolic_b(params.v, params.w)
    return solve_state(a, b, params.w, np.abs(x))


def sinhcosh_vw(params: TrigParams, x):
    """(sinh_{v,w}(x), cosh_{v,w}(x)) on |x| < pi_{r,w}/2."""
    t = _sinh_state(params, x)
    with np.errstate(over="ignore", divide="ignore"):
        # log(e^(-t) - 1) = -t + log(1 - e^t), safe for extreme 1/w
        s = np.sign(x) * np.exp((np.log(-np.expm1(t)) - t) / params.w) + 0.0
        s = np.where(_tiny(x, params.w), x, s)
        c = np.exp(-t / params.v)
    return _scalar_or_array(x, s), _scalar_or_array(x, c)


def sinh_vw(params: TrigParams, x):
    return sinhcosh_vw(params, x)[0]


def cosh_vw(params: TrigParams, x):
    return sinhcosh_vw(params, x)[1]


def duality_check(params: TrigParams, x):
    """Residuals of sinh_{v,w} = sin_{r,w}/cos_{r,w}^(r/w) and
    cosh_{v,w} = cos_{r,w}^(-r/v); requires w > 1."""
    if params.w <= 1:
        raise ParameterError("duality relations are only checked for w > 1")
    r = params.r
    if not np.isfinite(r):
        raise ParameterError("dual parameter r is undefined for 1 + 1/w = 1/v")
    dual = TrigParams(r, params.w)
    sh, ch = sinhcosh_vw(params, x)
    s, c = sincos_vw(dual, x)
    res1 = sh - s / c ** (r / params.w)
    res2 = ch - c ** (-r / params.v)
    return res1, res2


def ode_residual(params: TrigParams, x, h=1e-4):
    """Central-difference residual of (|u'|^(v-2) u')' + ((v-1)w/v)|u|^(w-2) u."""
    v, w = params.v, params.w
    x = np.asarray(x, dtype=float)

    def flux(z):
        c = np.asarray(cos_vw(params, z))
        return np.abs(c) ** (v - 2.0) * c

    u = np.asarray(sin_vw(params, x))
    lhs = (flux(x + h) - flux(x - h)) / (2.0 * h)
    return lhs + (v - 1.0) * w / v * np.abs(u) ** (w - 2.0) * u
