"""Numerical core: vectorized adaptive Gauss-Kronrod quadrature, cumulative
integrals with piecewise polynomial interpolants, and a bracketed
Newton/bisection root finder.

Infinite ends are covered by geometric shells ``A + s*[2^(k-1), 2^k]`` and
finite ends by shells shrinking toward the endpoint. Shell contributions drive
divergence detection and a geometric tail correction.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError

EPS = np.finfo(float).eps

# relative tolerance for functional-level integrals; see quad_tolerance()
_QUAD_TOL = [1e-11]


def quad_tol() -> float:
    return _QUAD_TOL[0]


@contextmanager
def quad_tolerance(tol: float):
    """Temporarily set the relative tolerance used by functional integrals."""
    old = _QUAD_TOL[0]
    _QUAD_TOL[0] = float(tol)
    try:
        yield
    finally:
        _QUAD_TOL[0] = old

# 21-point Kronrod rule and its embedded 10-point Gauss rule (QUADPACK qk21)
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452190,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
W_GAUSS = np.zeros(21)
for _j, _i in enumerate((1, 3, 5, 7, 9)):
    W_GAUSS[_i] = W_GAUSS[20 - _i] = _WG[_j]
NPTS = NODES.size

N_INF_SHELLS = 64
DIVERGENCE_FRACTION = 1e-3


def legendre_table(xi, deg):
    """Legendre polynomials P_0..P_deg at xi; shape (len(xi), deg+1)."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape + (deg + 1,))
    out[..., 0] = 1.0
    if deg > 0:
        out[..., 1] = xi
    for n in range(1, deg):
        out[..., n + 1] = ((2 * n + 1) * xi * out[..., n] - n * out[..., n - 1]) / (n + 1)
    return out


def legendre_antiderivative(xi, deg):
    """Integrals of P_0..P_deg from -1 to xi."""
    P = legendre_table(xi, deg + 1)
    Q = np.empty(P.shape[:-1] + (deg + 1,))
    Q[..., 0] = np.asarray(xi) + 1.0
    for j in range(1, deg + 1):
        Q[..., j] = (P[..., j + 1] - P[..., j - 1]) / (2 * j + 1)
    return Q


# nodal values -> Legendre coefficients of the degree-20 interpolant
_VANDER = legendre_table(NODES, NPTS - 1)
NODES_TO_LEGENDRE = np.linalg.inv(_VANDER)


@dataclass(frozen=True)
class QuadResult:
    value: float | np.ndarray
    error: float | np.ndarray
    finite: bool | np.ndarray = True
    reason: str = ""
    n_intervals: int = 0
    converged: bool = True


@dataclass
class Partition:
    """Accepted intervals of an adaptive run, sorted by left edge."""
    a: np.ndarray
    b: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    fnodes: np.ndarray
    shell: np.ndarray
    ends: dict = field(default_factory=dict)


def _eval_gk(func, a, b, ends=()):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * NODES[None, :]
    fx = np.asarray(func(x.ravel()), dtype=float)
    fx = fx.reshape((a.size, NPTS) + fx.shape[1:])
    # nodes that rounded onto a finite end of the range carry no resolvable mass
    for e in ends:
        on = x == e
        if on.any():
            fx = np.array(fx)
            sel = on.reshape(on.shape + (1,) * (fx.ndim - 2)) & ~np.isfinite(fx)
            fx[sel] = 0.0
    if np.isnan(fx).any():
        bad = x.ravel()[np.isnan(fx.reshape(a.size * NPTS, -1)).any(axis=1)]
        raise FloatingPointError(f"integrand returned NaN at x={bad[:3]}")
    with np.errstate(invalid="ignore", over="ignore"):
        K = np.einsum("i...,i->...", np.moveaxis(fx, 1, 0), W_KRONROD)
        G = np.einsum("i...,i->...", np.moveaxis(fx, 1, 0), W_GAUSS)
        hh = h.reshape((-1,) + (1,) * (fx.ndim - 2))
        K = hh * K
        err = np.abs(hh * G - K)
    return K, err, fx


def _shell_edges(lo, hi, points, scale):
    """Initial intervals with shell ids and per-end ordered shell lists."""
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ValueError("integration interval must satisfy lo < hi")
    scale = float(scale) if scale > 0 else 1.0
    pts = sorted({float(p) for p in points if lo < p < hi and np.isfinite(p)})
    if not pts:
        if np.isfinite(lo) and np.isfinite(hi):
            pts = [0.5 * (lo + hi)]
        elif lo < 0.0 < hi:
            pts = [0.0]
        elif np.isfinite(lo):
            pts = [lo + scale]
        else:
            pts = [hi - scale]
    segs = []  # (a, b, end_key or None, order)
    ends = {}
    core = list(zip(pts[:-1], pts[1:]))
    for a, b in core:
        segs.append((a, b, None))
    # left end
    first = pts[0]
    if np.isfinite(lo):
        first = _geometric_core(first, lo, scale, segs)
        segs += _finite_shells(lo, first, "lo", ends)
    else:
        segs += _infinite_shells(first, -1.0, scale, "lo", ends)
    last = pts[-1]
    if np.isfinite(hi):
        last = _geometric_core(last, hi, scale, segs)
        segs += _finite_shells(hi, last, "hi", ends)
    else:
        segs += _infinite_shells(last, 1.0, scale, "hi", ends)
    a = np.array([s[0] for s in segs])
    b = np.array([s[1] for s in segs])
    shell = np.arange(len(segs))
    for k in ends:
        ends[k] = [i for i, s in enumerate(segs) if s[2] == k]
    return a, b, shell, ends


def _geometric_core(start, end, scale, segs):
    """Doubling intervals from ``start`` toward a distant finite ``end``."""
    sgn = 1.0 if end > start else -1.0
    prev = start
    k = 0
    while scale * 2.0 ** (k + 1) < abs(end - start) and k < 1100:
        nxt = start + sgn * scale * 2.0 ** k
        segs.append((min(prev, nxt), max(prev, nxt), None))
        prev = nxt
        k += 1
    return prev


def _finite_shells(e, inner, key, ends):
    width = abs(inner - e)
    sgn = 1.0 if inner > e else -1.0
    floor = 4096.0 * EPS * max(abs(e), width)
    K = max(1, int(np.floor(np.log2(width / floor))))
    K = min(K, 60)
    out = []
    for k in range(1, K + 1):
        p = e + sgn * width * 2.0 ** (-k + 1)
        q = e + sgn * width * 2.0 ** (-k)
        out.append((min(p, q), max(p, q), key))
    q = e + sgn * width * 2.0 ** (-K)
    out.append((min(e, q), max(e, q), key))
    ends[key] = None
    return out


def _infinite_shells(anchor, sgn, scale, key, ends):
    out = []
    prev = anchor
    for k in range(N_INF_SHELLS + 1):
        nxt = anchor + sgn * scale * 2.0 ** k
        out.append((min(prev, nxt), max(prev, nxt), key))
        prev = nxt
    ends[key] = None
    return out


STALL_LIMIT = 3
STALL_RATIO = 0.5


def adaptive_partition(func, lo, hi, *, points=(), rel_tol=1e-11, abs_tol=0.0,
                       scale=1.0, max_intervals=40000, max_rounds=80, local_origin=None):
    """Globally adaptive GK21 on a shell-augmented partition of [lo, hi].

    Returns (Partition, converged). ``func`` maps a 1-D array to an array of
    shape (n,) or (n, m). With ``local_origin`` set (scalar integrands only),
    every interval must meet a relative tolerance on its own contribution, so
    that the running integral from the origin is accurate pointwise.
    """
    a, b, shell, ends = _shell_edges(lo, hi, points, scale)
    fin_ends = tuple(float(e) for e in (lo, hi) if np.isfinite(e))
    K, err, fx = _eval_gk(func, a, b, fin_ends)
    # bisections that stop reducing the error estimate mark integrand noise;
    # such intervals are frozen after STALL_LIMIT stalls
    stall = np.zeros(a.size, dtype=int)
    converged = False
    for _ in range(max_rounds):
        with np.errstate(invalid="ignore", over="ignore"):
            total = K.sum(axis=0)
            absum = np.abs(K).sum(axis=0)
        if not np.all(np.isfinite(total)):
            break
        if local_origin is not None:
            o = np.argsort(a)
            cb = np.concatenate([[0.0], np.cumsum(K[o])])
            off = cb[np.searchsorted(a[o], local_origin)]
            near = np.minimum(np.abs(cb[:-1] - off), np.abs(cb[1:] - off))
            thr = rel_tol * (np.abs(K[o]) + 1e-6 * near) + abs_tol + 1e-300
            bad = err[o] > thr
            if not bad.any():
                converged = True
                break
            if a.size >= max_intervals:
                break
            pick = o[bad & (stall[o] < STALL_LIMIT)][: max(1, max_intervals - a.size)]
            if pick.size == 0:
                break
        else:
            tol = np.maximum(abs_tol, rel_tol * np.maximum(np.abs(total), 1e-2 * absum))
            tol = np.maximum(tol, 1e-300)
            scaled = err / tol
            if scaled.ndim > 1:
                scaled = scaled.max(axis=1)
            # normalized error per interval, compared to the per-component budget
            if scaled.sum() <= 1.0:
                converged = True
                break
            if a.size >= max_intervals:
                break
            scaled = np.where(stall < STALL_LIMIT, scaled, 0.0)
            if not scaled.any():
                break
            order = np.argsort(scaled)[::-1]
            remaining = scaled.sum() - np.cumsum(scaled[order])
            nsplit = int(np.searchsorted(-remaining, -0.5)) + 1
            nsplit = min(nsplit, order.size, max_intervals - a.size + 1)
            pick = order[:nsplit]
        keep = np.ones(a.size, dtype=bool)
        keep[pick] = False
        mid = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        nshell = np.concatenate([shell[pick], shell[pick]])
        # intervals too narrow to split are frozen
        ok = (nb - na) > 8 * EPS * np.maximum(np.abs(na), np.abs(nb))
        if not ok.any():
            break
        if not ok.all():
            keep[pick[~ok[:pick.size] | ~ok[pick.size:]]] = True
            both = ok[:pick.size] & ok[pick.size:]
            pick = pick[both]
            if pick.size == 0:
                break
            mid = 0.5 * (a[pick] + b[pick])
            na = np.concatenate([a[pick], mid])
            nb = np.concatenate([mid, b[pick]])
            nshell = np.concatenate([shell[pick], shell[pick]])
        nK, nerr, nfx = _eval_gk(func, na, nb, fin_ends)
        m = pick.size
        pe = err[pick] if err.ndim == 1 else err[pick].max(axis=1)
        ce = nerr if nerr.ndim == 1 else nerr.max(axis=1)
        stalled = (ce[:m] + ce[m:] > STALL_RATIO * pe) & (na[:m] != lo) & (nb[m:] != hi)
        nstall = stall[pick] + stalled
        stall = np.concatenate([stall[keep], nstall, nstall])
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        shell = np.concatenate([shell[keep], nshell])
        K = np.concatenate([K[keep], nK])
        err = np.concatenate([err[keep], nerr])
        fx = np.concatenate([fx[keep], nfx])
    idx = np.argsort(a, kind="stable")
    part = Partition(a[idx], b[idx], K[idx], err[idx], fx[idx], shell[idx], ends)
    return part, converged


def _tail_correction(contrib):
    """Geometric extrapolation of the shells beyond the last one."""
    s1, s2, s3 = contrib[-1], contrib[-2], contrib[-3]
    with np.errstate(invalid="ignore", divide="ignore"):
        r1 = s1 / s2
        r2 = s2 / s3
        geo = (s1 != 0) & (r1 > 0) & (r1 < 0.999) & (np.abs(r1 - r2) <= 0.05 * np.abs(r1))
        rem = np.where(geo, s1 * r1 / (1.0 - r1), 0.0)
    return rem


def integrate(func, lo, hi, *, points=(), rel_tol=1e-11, abs_tol=1e-14, scale=1.0,
              max_intervals=40000, detect_divergence=True, full_output=False):
    """Integrate ``func`` over [lo, hi] (ends may be infinite).

    Divergence is declared when the four outermost shells at an end carry more
    than 1e-3 of the integral. Divergent components are returned as +-inf with
    ``finite`` False and a reason naming the offending end.
    """
    part, converged = adaptive_partition(func, lo, hi, points=points, rel_tol=rel_tol,
                                         abs_tol=abs_tol, scale=scale,
                                         max_intervals=max_intervals)
    with np.errstate(invalid="ignore", over="ignore"):
        value = part.values.sum(axis=0)
        error = part.errors.sum(axis=0)
    finite = np.isfinite(value)
    reasons = []
    if not np.all(finite):
        reasons.append("integrand not finite")
    elif detect_divergence:
        absum = np.abs(part.values).sum(axis=0)
        base = np.maximum(np.abs(value), 1e-2 * absum)
        value = np.array(value, dtype=float)
        error = np.array(error, dtype=float)
        for key, ids in part.ends.items():
            contrib = np.stack([part.values[part.shell == i].sum(axis=0) for i in ids])
            last4 = np.abs(contrib[-4:]).sum(axis=0)
            div = last4 > DIVERGENCE_FRACTION * np.maximum(base, 1e-300)
            side = "right" if key == "hi" else "left"
            infinite_end = not np.isfinite(hi if key == "hi" else lo)
            if np.any(div):
                reasons.append(f"divergent at the {side} {'tail' if infinite_end else 'endpoint'}")
                sgn = np.sign(contrib[-4:].sum(axis=0))
                value = np.where(div, np.where(sgn == 0, np.inf, sgn * np.inf), value)
                finite = finite & ~div
            if infinite_end:
                rem = _tail_correction(contrib)
                rem = np.where(div, 0.0, rem)
                value = value + rem
                error = error + 0.05 * np.abs(rem)
    if value.ndim == 0:
        value = float(value)
        error = float(error)
        finite = bool(finite)
    res = QuadResult(value, error, finite, "; ".join(reasons), part.a.size, converged)
    if full_output:
        return res, part
    return res


class CumulativeIntegral:
    """x -> integral of a nonnegative h from ``origin`` to x.

    The adaptive partition stores the 21 nodal values of every accepted
    interval; partial integrals come from the degree-20 interpolant, so no new
    integrand evaluations are needed after construction.
    """

    def __init__(self, h, lo, hi, origin=0.0, *, rel_tol=1e-12, scale=1.0, points=()):
        self.lo = float(lo)
        self.hi = float(hi)
        origin = float(np.clip(origin, lo, hi))
        pts = set(points)
        if self.lo < origin < self.hi:
            pts.add(origin)
        part, self.converged = adaptive_partition(h, lo, hi, points=tuple(pts),
                                                  rel_tol=rel_tol, abs_tol=0.0, scale=scale,
                                                  local_origin=origin)
        self.a = part.a
        self.b = part.b
        self.coef = part.fnodes @ NODES_TO_LEGENDRE.T
        vals = part.values
        # accumulate outward from the origin so that values near it do not
        # cancel against large tail contributions
        if origin <= self.lo:
            i0 = 0
        elif origin >= self.hi:
            i0 = vals.size
        else:
            i0 = int(np.searchsorted(self.a, origin))
        left = np.empty_like(vals)
        right = np.empty_like(vals)
        up = np.cumsum(vals[i0:])
        right[i0:] = up
        left[i0:] = up - vals[i0:]
        down = -np.cumsum(vals[:i0][::-1])[::-1]
        left[:i0] = down
        right[:i0] = down + vals[:i0]
        self.left = left
        self.right = right
        self.origin = origin
        # end values, with divergence detection and tail correction
        self.end_values = {}
        absum = np.abs(vals).sum()
        base = max(absum, 1e-300)
        for key, ids in part.ends.items():
            contrib = np.array([vals[part.shell == i].sum() for i in ids])
            div = np.abs(contrib[-4:]).sum() > DIVERGENCE_FRACTION * base
            infinite_end = not np.isfinite(self.hi if key == "hi" else self.lo)
            if key == "hi":
                v = np.inf if div else self.right[-1] + (
                    float(_tail_correction(contrib)) if infinite_end else 0.0)
            else:
                v = -np.inf if div else self.left[0] - (
                    float(_tail_correction(contrib)) if infinite_end else 0.0)
            self.end_values[key] = v

    @property
    def range(self):
        return self.end_values["lo"], self.end_values["hi"]

    def _locate(self, x):
        idx = np.searchsorted(self.b, x, side="left")
        return np.clip(idx, 0, self.a.size - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xf = np.clip(x, self.a[0], self.b[-1])
        idx = self._locate(xf)
        a, b = self.a[idx], self.b[idx]
        half = 0.5 * (b - a)
        xi = np.clip((xf - a) / half - 1.0, -1.0, 1.0)
        Q = legendre_antiderivative(xi, NPTS - 1)
        out = self.left[idx] + half * np.einsum("...j,...j->...", Q, self.coef[idx])
        out = np.where(x > self.b[-1], self.end_values["hi"], out)
        out = np.where(x < self.a[0], self.end_values["lo"], out)
        return out

    def integrand(self, x):
        """Interpolated integrand."""
        x = np.asarray(x, dtype=float)
        idx = self._locate(np.clip(x, self.a[0], self.b[-1]))
        a, b = self.a[idx], self.b[idx]
        xi = np.clip(2.0 * (x - a) / (b - a) - 1.0, -1.0, 1.0)
        P = legendre_table(xi, NPTS - 1)
        return np.einsum("...j,...j->...", P, self.coef[idx])

    def inverse(self, y):
        """Solve C(x) = y for x; values outside the covered range map to the ends."""
        y = np.asarray(y, dtype=float)
        shape = y.shape
        y = y.ravel()
        out = np.empty_like(y)
        lo_mask = y <= self.left[0]
        hi_mask = y >= self.right[-1]
        out[lo_mask] = self.a[0]
        out[hi_mask] = self.b[-1]
        mid = ~(lo_mask | hi_mask)
        if mid.any():
            ym = y[mid]
            idx = np.clip(np.searchsorted(self.right, ym, side="left"), 0, self.a.size - 1)
            a, b = self.a[idx], self.b[idx]
            half = 0.5 * (b - a)
            coef = self.coef[idx]
            base = self.left[idx]

            def fdf(xi, sel):
                Q = legendre_antiderivative(xi, NPTS - 1)
                P = legendre_table(xi, NPTS - 1)
                F = base[sel] + half[sel] * np.einsum("ij,ij->i", Q, coef[sel])
                dF = half[sel] * np.einsum("ij,ij->i", P, coef[sel])
                return F, dF

            width = self.right[idx] - self.left[idx]
            with np.errstate(invalid="ignore", divide="ignore"):
                x0 = np.where(width > 0, 2.0 * (ym - base) / width - 1.0, 0.0)
            xi = newton_bisect(fdf, ym, -np.ones_like(ym), np.ones_like(ym), x0,
                               increasing=True, indexed=True)
            out[mid] = a + half * (xi + 1.0)
        return out.reshape(shape)


def newton_bisect(fdf, target, lo, hi, x0=None, *, increasing=True, xtol=4 * EPS,
                  ftol=4 * EPS, maxiter=200, indexed=False):
    """Vectorized safeguarded Newton iteration for monotone f(x) = target.

    ``fdf(x)`` returns (f, df); with ``indexed`` it is called as ``fdf(x, sel)``
    where ``sel`` indexes the still-active entries. The root must be bracketed
    by [lo, hi] (finite).
    """
    target = np.asarray(target, dtype=float).copy()
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    if x0 is None:
        x = 0.5 * (lo + hi)
    else:
        x = np.broadcast_to(np.asarray(x0, dtype=float), target.shape).copy()
        bad = ~((x > lo) & (x < hi))
        x[bad] = 0.5 * (lo[bad] + hi[bad])
    active = np.arange(target.size)
    x = x.ravel()
    lo = lo.ravel()
    hi = hi.ravel()
    t = target.ravel()
    sgn = 1.0 if increasing else -1.0
    for _ in range(maxiter):
        if active.size == 0:
            break
        xa = x[active]
        if indexed:
            f, df = fdf(xa, active)
        else:
            f, df = fdf(xa)
        g = sgn * (np.asarray(f) - t[active])
        dg = sgn * np.asarray(df)
        below = g < 0
        lo[active[below]] = xa[below]
        above = g > 0
        hi[active[above]] = xa[above]
        la, ha = lo[active], hi[active]
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            xn = xa - g / dg
        ok = np.isfinite(xn) & (xn > la) & (xn < ha)
        xn = np.where(ok, xn, 0.5 * (la + ha))
        done = (g == 0) | (np.abs(g) <= ftol * np.abs(t[active]))
        done |= (ha - la) <= xtol * np.maximum(np.abs(la), np.abs(ha))
        done |= ok & (np.abs(xn - xa) <= xtol * np.abs(xa))
        x[active] = np.where(done & ~(ok & (np.abs(xn - xa) <= xtol * np.abs(xa))), xa, xn)
        active = active[~done]
    if active.size:
        raise ConvergenceError(
            f"Newton/bisection failed for {active.size} of {t.size} points",
            {"x": x[active][:5], "lo": lo[active][:5], "hi": hi[active][:5],
             "target": t[active][:5]})
    return x.reshape(target.shape)
