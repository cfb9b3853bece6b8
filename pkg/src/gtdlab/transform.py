"""Differential-escort and usual escort transforms.

D_alpha f(y) = f(x(y))^alpha with y(x) = int_0^x f^(1-alpha). Numerically the
map y(x) is a :class:`~gtdlab.numerics.CumulativeIntegral` and x(y) is found by
Newton iteration on its piecewise interpolant. Members of the closed-form
families are routed through their exact escorts unless ``method='numeric'``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import Density, GaussParams, _escort_tail, uniform
from .densities import escort_of_stretched_gaussian_closed_form as _closed_g
from .errors import DomainError, ParameterError
from .numerics import CumulativeIntegral, integrate

H_CAP = 1e250
CUT_CAP = 1e40


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Tabulated differential escort: nodes x_i, images y(x_i) and D(y(x_i))."""
    xs: np.ndarray
    ys: np.ndarray
    fvals: np.ndarray
    alpha: float
    source_label: str


def escort_of_stretched_gaussian_closed_form(params: GaussParams, alpha: float) -> Density:
    """D_alpha g_{p,lambda} through generalized cosines (lambda != 1)."""
    return _closed_g(params, alpha)


def _weight(f: Density, alpha: float):
    e = 1.0 - alpha

    lo, hi = f.support
    mid = 0.5 * (lo + hi) if np.isfinite(lo) and np.isfinite(hi) else 0.0

    def h(x):
        x = np.asarray(x, dtype=float)
        fx = f.pdf(x)
        # a zero toward an infinite end is underflow (f^(1-alpha) is huge there for
        # alpha > 1); toward a finite end it is a node rounding onto the border
        under = ((x > mid) & np.isinf(hi)) | ((x < mid) & np.isinf(lo))
        zero = np.where(under, H_CAP if e < 0 else 0.0, 0.0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.where(fx > 0, fx ** e, zero)
        return np.minimum(out, H_CAP)
    return h


def _effective_range(f: Density, h, alpha, cap=CUT_CAP):
    """Cut infinite ends where f^(1-alpha) overflows (alpha > 1); flags cut ends."""
    lo, hi = f.support
    cut = {"lo": False, "hi": False}
    if alpha <= 1:
        return lo, hi, cut
    anchor = 0.0 if lo < 0 < hi else (lo if np.isfinite(lo) else hi)
    s = f.scale
    ends = []
    for key, end, sgn in (("lo", lo, -1.0), ("hi", hi, 1.0)):
        if np.isfinite(end):
            ends.append(end)
            continue
        xs = anchor + sgn * s * 2.0 ** np.arange(0, 65)
        hv = h(xs)
        bad = (hv >= cap) | ~np.isfinite(hv) | (f.pdf(xs) <= 0)
        if bad.any():
            i = int(np.argmax(bad))
            if i == 0:
                # refine toward the anchor
                sub = anchor + sgn * s * np.linspace(0, 1, 65)[1:]
                bs = (h(sub) >= cap) | (f.pdf(sub) <= 0)
                j = int(np.argmax(bs))
                ends.append(sub[max(j - 1, 0)])
            else:
                # bisect between the last good and first bad point
                a, b = xs[i - 1], xs[i]
                for _ in range(60):
                    m = 0.5 * (a + b)
                    hm = h(np.array([m]))[0]
                    if hm >= cap or f.pdf(m) <= 0:
                        b = m
                    else:
                        a = m
                ends.append(a)
            cut[key] = True
        else:
            ends.append(end)
    return ends[0], ends[1], cut


def differential_escort(f: Density, alpha: float, *, method: str = "auto",
                        allow_unbounded: bool = False, rel_tol: float = 1e-12,
                        grid_nodes: int = 4096) -> Density:
    """The alpha-order differential-escort transform of ``f``.

    ``method`` is 'auto' (closed form when the family is recognized), 'closed'
    or 'numeric'. Negative orders produce densities that diverge at the
    borders of their support and require ``allow_unbounded``.
    """
    alpha = float(alpha)
    if method not in ("auto", "closed", "numeric"):
        raise ParameterError(f"unknown method {method!r}")
    if alpha < 0 and not allow_unbounded:
        raise ParameterError("alpha < 0 yields densities diverging at the support borders; "
                             "pass allow_unbounded=True to proceed")
    if not f.bounded and not allow_unbounded:
        raise ParameterError(f"{f.label} is unbounded; pass allow_unbounded=True to proceed")
    if alpha == 1.0:
        return f
    if alpha == 0.0:
        F0 = float(f.cdf(np.clip(0.0, *f.support)))
        u = uniform(-F0, 1.0 - F0)
        u.meta.update({"alpha": 0.0, "source": f.label})
        return u
    if method != "numeric" and f.closed_escort is not None:
        return f.closed_escort(alpha)
    if method == "closed":
        raise ParameterError(f"no closed-form escort known for {f.label}")
    return _numeric_escort(f, alpha, rel_tol, grid_nodes)


def _numeric_escort(f: Density, alpha: float, rel_tol: float, grid_nodes: int) -> Density:
    h = _weight(f, alpha)
    lo, hi, cut = _effective_range(f, h, alpha)
    origin = float(np.clip(0.0, lo, hi))
    cum = CumulativeIntegral(h, lo, hi, origin, rel_tol=rel_tol, scale=f.scale, points=f.points)
    ylo, yhi = cum.range
    if cut["lo"]:
        ylo = -np.inf
    if cut["hi"]:
        yhi = np.inf
    if origin > lo and not np.isfinite(cum.left[0]) or origin < hi and not np.isfinite(cum.right[-1]):
        raise DomainError("weighted cumulative integral does not converge near the origin")
    xmin, xmax = cum.a[0], cum.b[-1]
    ymin, ymax = cum.left[0], cum.right[-1]

    def pdf(y):
        y = np.asarray(y, dtype=float)
        x = cum.inverse(y)
        fx = f.pdf(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.where(fx > 0, fx ** alpha, 0.0 if alpha > 0 else np.inf)
        return np.where((y < ymin) | (y > ymax), 0.0, out)

    dpdf = None
    if f.has_derivative:
        def dpdf(y):
            y = np.asarray(y, dtype=float)
            x = cum.inverse(y)
            fx = f.pdf(x)
            with np.errstate(all="ignore"):
                d = alpha * fx ** (2.0 * alpha - 2.0) * f.dpdf(x)
            d = np.where(fx > 0, d, 0.0)
            return np.where((y < ymin) | (y > ymax), 0.0, np.nan_to_num(d, nan=0.0))

    # the bulk of D_alpha f sits around the image of the mode of f
    s = f.scale
    probe = np.concatenate([np.linspace(max(xmin, origin - 64 * s), min(xmax, origin + 64 * s), 2049),
                            [p for p in f.points if xmin <= p <= xmax]])
    mode = float(probe[np.argmax(f.pdf(probe))])
    pts = tuple(sorted({float(cum(np.array(p))) for p in f.points + (mode,) if lo <= p <= hi}))
    wide = cum(np.clip(np.array([mode - s, mode + s]), xmin, xmax))
    scale = 0.5 * float(wide[1] - wide[0])
    if not (np.isfinite(scale) and scale > 0):
        scale = 1.0
    tail = None
    if f.tail_exponent is not None and np.isfinite(f.tail_exponent):
        tail = _escort_tail(f.tail_exponent, alpha)

    def grid():
        # half the nodes follow the quadrature partition, half are uniform in y
        edges = np.concatenate([cum.a, cum.b[-1:]])
        n1 = grid_nodes // 2
        xs = np.interp(np.linspace(0, edges.size - 1, n1), np.arange(edges.size), edges)
        ya, yb = float(cum.left[0]), float(cum.right[-1])
        xs = np.unique(np.concatenate([xs, cum.inverse(np.linspace(ya, yb, grid_nodes - n1)), [origin]]))
        ys = np.where(xs == origin, 0.0, cum(xs))
        # far-tail nodes whose images coincide in double precision are dropped
        keep = np.concatenate([[True], np.diff(ys) > 0])
        xs, ys = xs[keep], ys[keep]
        fx = f.pdf(xs)
        with np.errstate(all="ignore"):
            fv = np.where(fx > 0, fx ** alpha, 0.0 if alpha > 0 else np.inf)
        return GridDensity(xs, ys, fv, alpha, f.label)

    src = f

    def closed(a2):
        return differential_escort(src, alpha * a2, method="numeric", allow_unbounded=True)

    meta = {"alpha": alpha, "source": f.label, "cumulative": cum, "grid": grid,
            "x_of_y": cum.inverse, "y_of_x": cum, "cut": cut, "converged": cum.converged}
    return Density(pdf, (ylo, yhi), f"D[{alpha:g}]({f.label})", dpdf, None, tail,
                   alpha >= 0 and f.bounded, scale, pts, closed, meta)


def escort_grid(d: Density) -> GridDensity:
    """Grid table of a numerically transformed density."""
    g = d.meta.get("grid")
    if g is None:
        raise ParameterError(f"{d.label} was not produced by the numeric transform")
    return g()


def support_length_integral(f: Density, alpha: float, rel_tol: float = 1e-11):
    """int f^(1-alpha) over the support (the length of the support of D_alpha f)."""
    h = _weight(f, alpha)
    lo, hi = f.support
    return integrate(h, lo, hi, points=f.points, scale=f.scale, rel_tol=rel_tol)


def tail_prediction(eta: float, alpha: float) -> tuple[str, float]:
    """Tail of D_alpha f for f ~ |x|^(-eta): ('compact', inf), ('exponential', inf)
    or ('power', exponent)."""
    d = 1.0 + eta * (alpha - 1.0)
    if abs(d) < 1e-12:
        return "exponential", np.inf
    if d < 0:
        return "compact", np.inf
    return "power", alpha * eta / d


def usual_escort(f: Density, alpha: float) -> Density:
    """f^alpha / int f^alpha on the support of f."""
    alpha = float(alpha)
    if alpha == 1.0:
        return f
    lo, hi = f.support

    def h(x):
        fx = f.pdf(x)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(fx > 0, fx ** alpha, 0.0)
    res = integrate(h, lo, hi, points=f.points, scale=f.scale)
    if not res.finite:
        raise DomainError(f"int f^{alpha:g} diverges: {res.reason}")
    Z = res.value
    dp = None
    if f.has_derivative:
        def dp(x):
            fx = f.pdf(x)
            with np.errstate(all="ignore"):
                return np.where(fx > 0, alpha * fx ** (alpha - 1.0) * f.dpdf(x) / Z, 0.0)
    tail = None if f.tail_exponent is None else alpha * f.tail_exponent
    return Density(lambda x: h(x) / Z, (lo, hi), f"E[{alpha:g}]({f.label})", dp, None, tail,
                   f.bounded, f.scale, f.points, None, {"normalizer": Z, "alpha": alpha})
