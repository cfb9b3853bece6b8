"""Information functionals of univariate densities.

Entropies, entropy powers, (p, lambda)-Fisher information, moments, cumulative
moments (weighted by f^(1-gamma)), their central variants and the cumulative
residual entropy. Every quantity is a :class:`FunctionalResult`; divergent
integrals are reported as infinite with a reason instead of raising.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .densities import Density
from .errors import DomainError, ParameterError
from .numerics import CumulativeIntegral, integrate, quad_tol

LAMBDA_ONE_TOL = 1e-12
JUMP_FRACTION = 1e-8
H_CUT = 1e40


@dataclass(frozen=True)
class FunctionalResult:
    value: float
    error: float
    method: str
    finite: bool = True
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        d = asdict(self)
        d["value"] = float(self.value)
        return d


def _quad(f: Density, h, method, rel_tol=None, lo=None, hi=None, points=None):
    lo = f.support[0] if lo is None else lo
    hi = f.support[1] if hi is None else hi
    pts = f.points if points is None else points
    rel_tol = quad_tol() if rel_tol is None else rel_tol
    res = integrate(h, lo, hi, points=tuple(p for p in pts if lo < p < hi),
                    scale=f.scale, rel_tol=rel_tol, abs_tol=0.0)
    return res


def _result(res, method, transform=None, **extra):
    """Wrap a QuadResult, optionally mapping (value, error) -> (value, error)."""
    if not res.finite:
        v = res.value if np.isinf(res.value) else np.inf
        if transform is not None:
            v, _ = transform(v, 0.0)
        return FunctionalResult(float(v), np.inf, method, False, res.reason or "divergent", extra)
    v, e = (res.value, res.error) if transform is None else transform(res.value, res.error)
    fin = bool(np.isfinite(v))
    return FunctionalResult(float(v), float(e), method, fin, "" if fin else "infinite value", extra)



# ---------------------------------------------------------------- entropies

def power_integral(f: Density, lam: float) -> FunctionalResult:
    """int f^lambda over the support."""
    lam = float(lam)

    def h(x):
        fx = f.pdf(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(fx > 0, fx ** lam, 0.0)
    return _result(_quad(f, h, "power"), "quad")


def renyi(f: Density, lam: float) -> FunctionalResult:
    """R_lambda = log(int f^lambda) / (1 - lambda); Shannon entropy at lambda = 1."""
    lam = float(lam)
    if abs(lam - 1.0) < LAMBDA_ONE_TOL:
        return shannon(f)
    I = power_integral(f, lam)
    if not I.finite:
        # int f^lam = inf: +inf for lam < 1, -inf for lam > 1
        v = np.inf if lam < 1 else -np.inf
        return FunctionalResult(v, np.inf, "renyi", False, I.reason)
    if not I.value > 0:
        raise DomainError(f"{f.label}: int f^{lam:g} vanished")
    return FunctionalResult(np.log(I.value) / (1.0 - lam),
                            I.error / (abs(1.0 - lam) * I.value), "renyi")


def tsallis(f: Density, lam: float) -> FunctionalResult:
    """T_lambda = (exp((1-lambda) R_lambda) - 1)/(1 - lambda)."""
    lam = float(lam)
    R = renyi(f, lam)
    if abs(lam - 1.0) < LAMBDA_ONE_TOL:
        return FunctionalResult(R.value, R.error, "tsallis", R.finite, R.reason)
    if not R.finite:
        v = np.inf if lam < 1 else -1.0 / (1.0 - lam)
        return FunctionalResult(v, np.inf, "tsallis", lam > 1, R.reason)
    u = (1.0 - lam) * R.value
    return FunctionalResult(np.expm1(u) / (1.0 - lam), np.exp(u) * R.error, "tsallis")


def shannon(f: Density) -> FunctionalResult:
    """S = -int f log f."""
    def h(x):
        fx = f.pdf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(fx > 0, -fx * np.log(np.where(fx > 0, fx, 1.0)), 0.0)
    return _result(_quad(f, h, "shannon"), "shannon")


def entropy_power(f: Density, lam: float = 1.0) -> FunctionalResult:
    """N_lambda = exp(R_lambda)."""
    R = renyi(f, lam)
    with np.errstate(over="ignore"):
        v = np.exp(R.value)
    return FunctionalResult(float(v), float(v * R.error) if R.finite else np.inf,
                            "entropy-power", R.finite and np.isfinite(v), R.reason)


# ---------------------------------------------------------------- Fisher information

def _edge_jump(f: Density):
    """Name of a finite support end where f does not vanish, if any."""
    lo, hi = f.support
    probe = []
    if np.isfinite(lo):
        probe.append(("left", lo))
    if np.isfinite(hi):
        probe.append(("right", hi))
    if not probe:
        return None
    xs = np.linspace(lo if np.isfinite(lo) else -4 * f.scale,
                     hi if np.isfinite(hi) else 4 * f.scale, 257)[1:-1]
    fmax = float(np.max(f.pdf(xs)))
    for side, end in probe:
        step = (1e-9 if side == "left" else -1e-9) * max(abs(end), f.scale)
        near, nearer = f.pdf(end + step), f.pdf(end + 1e-3 * step)
        # a jump stays flat toward the end; f ~ |x - end|^a with a > 0.1 drops by > 2
        if near > JUMP_FRACTION * fmax and nearer > 0.5 * near:
            return side
    return None


def fisher(f: Density, p: float, lam: float) -> FunctionalResult:
    """(p, lambda)-Fisher information F = int |f^(lambda-2) f'|^p f.

    ``extra['phi']`` holds phi_{p,lambda} = F^(1/(p lambda)). Densities that
    jump at a finite support end, or have no derivative, get F = inf.
    """
    p = float(p)
    lam = float(lam)
    if not p > 0:
        raise ParameterError("p must be positive")

    def phi(F):
        with np.errstate(divide="ignore", over="ignore"):
            return float(F ** (1.0 / (p * lam))) if np.isfinite(F) else (
                np.inf if p * lam > 0 else 0.0)

    if not f.has_derivative:
        return FunctionalResult(np.inf, np.inf, "fisher", False,
                                "density is not differentiable", {"phi": phi(np.inf)})
    side = _edge_jump(f)
    if side is not None:
        return FunctionalResult(np.inf, np.inf, "fisher", False,
                                f"density jumps at the {side} support end", {"phi": phi(np.inf)})
    ex = (lam - 2.0) * p + 1.0

    def h(x):
        fx = f.pdf(x)
        d = np.abs(f.dpdf(x))
        ok = (fx > 0) & (d > 0)
        with np.errstate(all="ignore"):
            lf = np.log(np.where(ok, fx, 1.0))
            ld = np.log(np.where(ok, d, 1.0))
            return np.where(ok, np.exp(p * ld + ex * lf), 0.0)
    res = _quad(f, h, "fisher")
    r = _result(res, "fisher")
    return FunctionalResult(r.value, r.error, "fisher", r.finite, r.reason, {"phi": phi(r.value)})


def fisher_phi(f: Density, p: float, lam: float) -> float:
    return fisher(f, p, lam).extra["phi"]


# ---------------------------------------------------------------- moments

def moment(f: Density, p: float) -> FunctionalResult:
    """Absolute moment mu_p = int |x|^p f."""
    p = float(p)
    if p < 0:
        raise ParameterError("moment order must be nonnegative")
    if p == 0:
        return FunctionalResult(1.0, 0.0, "moment")

    def h(x):
        return np.abs(x) ** p * f.pdf(x)
    pts = tuple(f.points) + (0.0,)
    return _result(_quad(f, h, "moment", points=pts), "moment")


def typical_deviation(f: Density, p: float) -> FunctionalResult:
    """sigma_p = mu_p^(1/p); sigma_0 = exp(int f log|x|)."""
    p = float(p)
    if p == 0:
        def h(x):
            fx = f.pdf(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(fx > 0, fx * np.log(np.abs(x)), 0.0)
        pts = tuple(f.points) + (0.0,)
        r = _result(_quad(f, h, "log-moment", points=pts), "log-moment")
        if not r.finite:
            return FunctionalResult(np.inf if r.value > 0 else 0.0, np.inf, "sigma0", False, r.reason)
        v = np.exp(r.value)
        return FunctionalResult(v, v * r.error, "sigma0")
    m = moment(f, p)
    if not m.finite:
        return FunctionalResult(np.inf, np.inf, "sigma", False, m.reason)
    v = m.value ** (1.0 / p)
    return FunctionalResult(v, v * m.error / (p * m.value), "sigma")


# ---------------------------------------------------------------- cumulative moments

def _cum_weight(f: Density, gamma: float):
    e = 1.0 - gamma

    def h(x):
        fx = f.pdf(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.where(fx > 0, fx ** e, 0.0)
        return np.minimum(out, 1e250)
    return h


def _origin(f: Density):
    lo, hi = f.support
    return float(np.clip(0.0, lo, hi))


def _cut_range(f: Density, gamma: float):
    """Finite range where f^(1-gamma) stays below H_CUT (gamma > 1)."""
    from .transform import _effective_range
    return _effective_range(f, _cum_weight(f, gamma), gamma, cap=H_CUT)


def _check_bounded(f: Density, gamma: float):
    if gamma > 1 and not f.bounded:
        raise DomainError(f"{f.label} is unbounded; f^(1-gamma) is not integrable for gamma > 1")


def weighted_cumulative(f: Density, gamma: float, x):
    """F^(gamma)(x) - F^(gamma)(0) = int_0^x f^(1-gamma) over the support."""
    gamma = float(gamma)
    _check_bounded(f, gamma)
    x = np.asarray(x, dtype=float)
    lo, hi = f.support
    if gamma > 1:
        lo, hi, _ = _cut_range(f, gamma)
    cum = CumulativeIntegral(_cum_weight(f, gamma), lo, hi, _origin(f), rel_tol=1e-12,
                             scale=f.scale, points=f.points)
    out = cum(x)
    return float(out) if out.ndim == 0 else out


class _Cumulative:
    """Weighted cumulative map of f with its x-range; flags a truncated range."""

    def __init__(self, f: Density, gamma: float, rel_tol=1e-12):
        _check_bounded(f, gamma)
        lo, hi = f.support
        self.cut = {"lo": False, "hi": False}
        if gamma > 1:
            lo, hi, self.cut = _cut_range(f, gamma)
        self.lo, self.hi = lo, hi
        self.origin = _origin(f)
        self.cum = CumulativeIntegral(_cum_weight(f, gamma), lo, hi, self.origin, rel_tol=rel_tol,
                                      scale=f.scale, points=f.points)

    @property
    def truncated(self):
        return self.cut["lo"] or self.cut["hi"]


def _cum_moment(f: Density, p: float, gamma: float, signed: bool, center=None):
    p = float(p)
    gamma = float(gamma)
    if gamma == 0 and center is None and not signed:
        return FunctionalResult(mu_p0_closed_form(f, p), 1e-15, "cumulative-closed")
    cm = _Cumulative(f, gamma)
    c0 = 0.0 if center is None else center

    def power(u):
        if signed:
            return u ** int(p)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(u == 0, 0.0 if p > 0 else 1.0, np.abs(u) ** p)

    if cm.truncated:
        # x-range truncated where f^(1-gamma) overflows: integrate in y = C(x)
        from .transform import differential_escort
        d = differential_escort(f, gamma, method="numeric", allow_unbounded=True)
        pts = tuple(d.points) + (0.0,)

        def hy(y):
            return power(y - c0) * d.pdf(y)
        res = integrate(hy, d.support[0], d.support[1], points=pts, scale=d.scale, rel_tol=quad_tol())
        return _result(res, "cumulative-y")

    def hx(x):
        return power(cm.cum(x) - c0) * f.pdf(x)
    pts = tuple(f.points) + ((cm.origin,) if cm.lo < cm.origin < cm.hi else ())
    res = integrate(hx, cm.lo, cm.hi, points=pts, scale=f.scale, rel_tol=quad_tol())
    return _result(res, "cumulative-x")


def cumulative_moment(f: Density, p: float, gamma: float) -> FunctionalResult:
    """mu_{p,gamma} = < |F^(gamma)(x) - F^(gamma)(0)|^p >_f."""
    if not p > 0:
        raise ParameterError("cumulative moment order must be positive")
    return _cum_moment(f, p, gamma, signed=False)


def signed_cumulative_moment(f: Density, i: int, gamma: float) -> FunctionalResult:
    """< (F^(gamma)(x) - F^(gamma)(0))^i >_f for natural i."""
    if int(i) != i or i < 1:
        raise ParameterError("signed cumulative moments need a natural order")
    if gamma == 0:
        return _signed_gamma0(f, int(i))
    return _cum_moment(f, int(i), gamma, signed=True)


def _signed_gamma0(f: Density, i: int) -> FunctionalResult:
    # F^(0)(x) - F^(0)(0) = F(x) - F(0); <(F - F0)^i> = ((1-F0)^(i+1) - (-F0)^(i+1))/(i+1)
    F0 = float(f.cdf(_origin(f)))
    v = ((1.0 - F0) ** (i + 1) - (-F0) ** (i + 1)) / (i + 1)
    return FunctionalResult(v, 1e-15, "cumulative-closed")


def cumulative_deviation(f: Density, p: float, gamma: float) -> FunctionalResult:
    """sigma_{p,gamma} = mu_{p,gamma}^(1/(p gamma))."""
    m = cumulative_moment(f, p, gamma)
    e = 1.0 / (float(p) * float(gamma))
    if not m.finite:
        return FunctionalResult(np.inf if e > 0 else 0.0, np.inf, "cumulative-deviation", False, m.reason)
    v = m.value ** e
    return FunctionalResult(v, abs(e) * v * m.error / m.value, "cumulative-deviation")


def mu_p0_closed_form(f: Density, p: float) -> float:
    """mu_{p,0} = (Fbar(0)^(p+1) + F(0)^(p+1)) / (p+1)."""
    p = float(p)
    F0 = float(f.cdf(_origin(f)))
    return ((1.0 - F0) ** (p + 1.0) + F0 ** (p + 1.0)) / (p + 1.0)


def central_cumulative_moment(f: Density, p: float, lam: float) -> FunctionalResult:
    """< |F^(lambda)(x) - <F^(lambda)>_f|^p >_f, invariant under translations."""
    lam = float(lam)
    mean = signed_cumulative_moment(f, 1, lam) if lam != 0 else _signed_gamma0(f, 1)
    if not mean.finite:
        return FunctionalResult(np.inf, np.inf, "central-cumulative", False,
                                "mean of the weighted cumulative diverges")
    if lam == 0:
        # F - <F> with <F> = 1/2: closed form 2 (1/2)^(p+1)/(p+1)
        return FunctionalResult(2.0 * 0.5 ** (p + 1.0) / (p + 1.0), 1e-15, "central-closed")
    r = _cum_moment(f, p, lam, signed=False, center=mean.value)
    return FunctionalResult(r.value, r.error + p * mean.error, "central-cumulative", r.finite, r.reason)


def central_cumulative_deviation(f: Density, p: float, gamma: float) -> FunctionalResult:
    m = central_cumulative_moment(f, p, gamma)
    e = 1.0 / (float(p) * float(gamma))
    if not m.finite:
        return FunctionalResult(np.inf, np.inf, "central-deviation", False, m.reason)
    v = m.value ** e
    return FunctionalResult(v, abs(e) * v * m.error / m.value, "central-deviation")


def survival(f: Density):
    """x -> 1 - F(x), accurate in the right tail."""
    lo, hi = f.support
    cum = CumulativeIntegral(f.pdf, lo, hi, origin=hi, scale=f.scale, points=f.points)
    return lambda x: np.clip(-cum(x), 0.0, 1.0)


def cumulative_residual_entropy(f: Density) -> FunctionalResult:
    """-int Fbar log Fbar over the support."""
    sf = survival(f)

    def h(x):
        s = sf(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((s > 0) & (s < 1), -s * np.log(np.where(s > 0, s, 1.0)), 0.0)
    return _result(_quad(f, h, "cre"), "cre")
