"""Moment sequences: Euler-number cumulative moments of the Cauchy law,
Carleman partial sums and cumulative maximum-entropy reconstruction.

A cumulative-moment problem of order gamma is reduced to a standard one: if f
maximizes Shannon entropy under standard moments m_i, then D_{1/gamma} f
maximizes it under cumulative moments mu~_{i,gamma} = m_i.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from . import functionals as fn
from .densities import Density
from .errors import DomainError, InfeasibleError, ParameterError
from .numerics import integrate
from .transform import differential_escort

EULER_MAX = 30
MAX_CONSTRAINTS = 6
MAXENT_ITER = 500


def euler_numbers(n: int) -> list[int]:
    """Signed Euler numbers E_0, E_2, ..., E_2n (secant-series recurrence)."""
    n = int(n)
    if n < 0:
        raise ParameterError("n must be nonnegative")
    if n > EULER_MAX:
        raise ParameterError(f"euler_numbers is guarded to n <= {EULER_MAX}")
    E = [1]
    for m in range(1, n + 1):
        # sum_k C(2m, 2k) E_2k = 0
        E.append(-sum(comb(2 * m, 2 * k) * E[k] for k in range(m)))
    return E


def euler_number(k: int) -> int:
    """E_k for any k >= 0 (zero for odd k)."""
    if k % 2:
        return 0
    return euler_numbers(k // 2)[-1]


def cauchy_cumulative_moment(order: int) -> float:
    """Signed cumulative moment of order ``order`` of the Cauchy law at gamma = 1/2.

    Even orders 2i give (pi/4)^i |E_2i|; odd orders vanish by parity.
    """
    order = int(order)
    if order < 1:
        raise ParameterError("order must be a positive integer")
    if order % 2:
        return 0.0
    i = order // 2
    return (np.pi / 4.0) ** i * abs(euler_number(order))


def cauchy_cumulative_moment_quadrature(order: int, rel_tol: float = 1e-12) -> fn.FunctionalResult:
    """Same moment by quadrature of the arsinh form <(arsinh(x)/sqrt(pi))^order>_Cauchy."""
    order = int(order)

    def h(x):
        return (np.arcsinh(x) / np.sqrt(np.pi)) ** order / (np.pi * (1.0 + x * x))
    res = integrate(h, -np.inf, np.inf, points=(0.0,), rel_tol=rel_tol)
    return fn.FunctionalResult(res.value, res.error, "arsinh-quadrature", res.finite, res.reason)


@dataclass
class MomentSequence:
    """Cumulative moments mu~_{i,gamma} for the listed orders."""
    gamma: float
    orders: list
    values: list
    label: str = "moments"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.orders = [int(o) for o in self.orders]
        self.values = [float(v) for v in self.values]
        if len(self.orders) != len(self.values):
            raise ParameterError("orders and values differ in length")
        if not all(np.isfinite(self.values)):
            raise ParameterError("moment values must be finite")
        if any(o < 1 for o in self.orders):
            raise ParameterError("orders must be positive integers")

    def value(self, order):
        return self.values[self.orders.index(order)]

    @property
    def odd_vanish(self) -> bool:
        """True when every odd-order value is zero (symmetric source)."""
        return all(v == 0 for o, v in zip(self.orders, self.values) if o % 2)

    def to_json(self) -> str:
        return json.dumps({"gamma": self.gamma, "orders": self.orders, "values": self.values,
                           "label": self.label})

    @classmethod
    def from_json(cls, text: str) -> "MomentSequence":
        d = json.loads(text)
        try:
            return cls(d["gamma"], d["orders"], d["values"], d.get("label", "moments"))
        except KeyError as exc:
            raise ParameterError(f"moment file misses field {exc}") from exc

    @classmethod
    def cauchy(cls, orders) -> "MomentSequence":
        orders = list(orders)
        return cls(0.5, orders, [cauchy_cumulative_moment(o) for o in orders], "cauchy")


def carleman_diagnostic(seq: MomentSequence, N: int) -> np.ndarray:
    """Partial sums of sum_i m_2i^(-1/(2i)), i = 1..N."""
    out = []
    acc = 0.0
    for i in range(1, int(N) + 1):
        if 2 * i not in seq.orders:
            raise ParameterError(f"order {2 * i} is missing from the sequence")
        m = seq.value(2 * i)
        if not m > 0:
            raise DomainError(f"even moment of order {2 * i} must be positive, got {m}")
        acc += m ** (-1.0 / (2 * i))
        out.append(acc)
    return np.array(out)


# ---------------------------------------------------------------- MaxEnt

@dataclass(frozen=True)
class MaxEntSolution:
    theta: np.ndarray
    log_z: float
    support: tuple
    iterations: int
    residual: float
    density: Density


class _Family:
    """Exponential family exp(sum_k theta_k x^k) on a half-line or the line."""

    def __init__(self, N, support, scale, center):
        self.N = N
        self.support = support
        self.scale = scale
        self.center = center

    def poly(self, theta, x):
        return np.polynomial.polynomial.polyval(x, np.concatenate([[0.0], theta]))

    def peak(self, theta):
        lo, hi = self.support
        a = lo if np.isfinite(lo) else self.center - 40 * self.scale
        xs = np.linspace(a, self.center + 40 * self.scale, 4001)
        return float(np.max(self.poly(theta, xs)))

    def stats(self, theta, kmax):
        """(log Z, [E x^k for k = 1..kmax]) by quadrature."""
        shift = self.peak(theta)
        ks = np.arange(0, kmax + 1)

        def h(x):
            w = np.exp(self.poly(theta, x) - shift)
            return w[:, None] * x[:, None] ** ks[None, :]
        lo, hi = self.support
        pts = (self.center,) if lo < self.center < hi else ()
        res = integrate(h, lo, hi, points=pts, scale=self.scale, rel_tol=1e-13)
        v = np.asarray(res.value)
        if not np.all(np.isfinite(v)) or not v[0] > 0:
            return np.inf, None
        return float(np.log(v[0]) + shift), v[1:] / v[0]


def _admissible(theta, support):
    lead = theta[-1]
    if np.isfinite(support[0]):
        return lead < 0 or (lead == 0 and len(theta) > 1 and _admissible(theta[:-1], support))
    return lead < 0 and len(theta) % 2 == 0


def maxent_standard(values, support=(-np.inf, np.inf), *, max_iter=MAXENT_ITER,
                    tol=1e-13) -> MaxEntSolution:
    """Classical MaxEnt with E[x^k] = values[k-1], k = 1..N, by damped Newton on the dual."""
    m = np.asarray(values, dtype=float)
    N = m.size
    if N < 1 or N > MAX_CONSTRAINTS:
        raise ParameterError(f"between 1 and {MAX_CONSTRAINTS} moment constraints are supported")
    support = (float(support[0]), float(support[1]))
    real_line = not np.isfinite(support[0])
    if real_line and N % 2:
        raise InfeasibleError("on the real line the leading constraint order must be even "
                              "(odd leading power gives a non-normalizable family)")
    if not real_line and support[0] != 0.0:
        raise ParameterError("supported domains are the real line and [0, inf)")
    if not real_line and not m[0] > 0:
        raise InfeasibleError("first moment must be positive on [0, inf)")
    # analytic start: Gaussian on the line, exponential on the half-line
    theta = np.zeros(N)
    if real_line:
        var = m[1] - m[0] ** 2
        if not var > 0:
            raise InfeasibleError("second moment must exceed the squared mean")
        theta[0] = m[0] / var
        theta[1] = -0.5 / var
        scale, center = np.sqrt(var), m[0]
    else:
        theta[0] = -1.0 / m[0]
        scale, center = m[0], m[0]
        if N >= 2:
            theta[-1] = -1e-3 / scale ** N
    fam = _Family(N, support, scale, center)
    logz, mom = fam.stats(theta, 2 * N)
    dual = logz - theta @ m
    resid = np.inf
    for it in range(1, max_iter + 1):
        grad = mom[:N] - m
        resid = float(np.max(np.abs(grad) / np.maximum(np.abs(m), scale ** np.arange(1, N + 1))))
        if resid < tol:
            break
        idx = np.arange(1, N + 1)
        H = mom[idx[:, None] + idx[None, :] - 1] - np.outer(mom[:N], mom[:N])
        try:
            step = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        while t > 1e-12:
            cand = theta + t * step
            if _admissible(cand, support):
                lz, mo = fam.stats(cand, 2 * N)
                if np.isfinite(lz) and lz - cand @ m <= dual + 1e-4 * t * (grad @ step):
                    break
            t *= 0.5
        else:
            break
        theta, logz, mom = cand, lz, mo
        dual = logz - theta @ m
    if not resid < tol * 1e3:
        raise InfeasibleError(f"MaxEnt dual did not converge after {max_iter} iterations; "
                              f"moment residuals {np.array2string(mom[:N] - m, precision=3)}")
    density = _family_density(theta, logz, support, scale)
    return MaxEntSolution(theta, logz, support, it, resid, density)


def _family_density(theta, logz, support, scale):
    coef = np.concatenate([[-logz], theta])
    dcoef = np.polynomial.polynomial.polyder(np.concatenate([[0.0], theta]))
    P = np.polynomial.polynomial

    def pdf(x):
        return np.exp(P.polyval(x, coef))

    def dpdf(x):
        return P.polyval(x, dcoef) * pdf(x)

    label = "maxent[" + ",".join(f"{t:.6g}" for t in theta) + "]"
    return Density(pdf, support, label, dpdf, None, None, True, scale,
                   (0.0,) if support[0] < 0 < support[1] else (),
                   meta={"theta": theta.tolist(), "log_z": logz})


def maxent_reconstruct(moments: MomentSequence, support="real", **kw) -> Density:
    """Shannon-MaxEnt density with cumulative moments mu~_{i,gamma} = m_i.

    ``support`` is 'real' or 'positive'. Orders must be 1..N consecutive.
    """
    gamma = float(moments.gamma)
    if gamma == 0:
        raise ParameterError("gamma must be nonzero")
    N = len(moments.orders)
    if sorted(moments.orders) != list(range(1, N + 1)):
        raise ParameterError("orders must be 1..N")
    vals = [moments.value(i) for i in range(1, N + 1)]
    sup = {"real": (-np.inf, np.inf), "positive": (0.0, np.inf)}.get(support)
    if sup is None:
        raise ParameterError("support must be 'real' or 'positive'")
    sol = maxent_standard(vals, sup, **kw)
    f = sol.density
    f.meta.update({"maxent_iterations": sol.iterations, "maxent_residual": sol.residual})
    if gamma == 1.0:
        return f
    h = differential_escort(f, 1.0 / gamma, method="numeric", allow_unbounded=gamma < 0)
    h.meta.update({"base": f, "gamma": gamma, "theta": sol.theta.tolist()})
    return h


# ---------------------------------------------------------------- characterization

@dataclass
class RoundTripReport:
    gamma: float
    orders: list
    cumulative: list
    standard: list
    max_rel_error: float
    identity_error: float
    label: str

    def to_dict(self):
        return asdict(self)


def _standard_moment(g: Density, i: int) -> fn.FunctionalResult:
    if i % 2 == 0:
        return fn.moment(g, i)

    def h(y):
        return y ** i * g.pdf(y)
    res = integrate(h, g.support[0], g.support[1], points=g.points + (0.0,), scale=g.scale)
    return fn.FunctionalResult(res.value, res.error, "moment", res.finite, res.reason)


def _cumulative_signed(h: Density, i: int, gamma: float) -> fn.FunctionalResult:
    if i % 2:
        return fn.signed_cumulative_moment(h, i, gamma)
    return fn.cumulative_moment(h, i, gamma)


def characterize_roundtrip(f: Density, gamma: float, N: int, *, mode="cumulative",
                           probe=257) -> RoundTripReport:
    """Check the cumulative/standard moment correspondence up to order N.

    mode='cumulative': f is the characterized density; compare mu~_{i,gamma}[f]
    with mu~_i[D_gamma f] and check D_{1/gamma} D_gamma f = f.
    mode='standard': f carries the standard moments; with h = D_{1/gamma} f compare
    mu~_{i,gamma}[h] with mu~_i[f] and check D_gamma h = f.
    """
    gamma = float(gamma)
    if gamma == 0:
        raise ParameterError("gamma must be nonzero")
    if mode == "cumulative":
        h, g = f, differential_escort(f, gamma, method="numeric")
    elif mode == "standard":
        h, g = differential_escort(f, 1.0 / gamma, method="numeric"), f
    else:
        raise ParameterError("mode must be 'cumulative' or 'standard'")
    orders = list(range(1, int(N) + 1))
    cum, std = [], []
    for i in orders:
        r = _cumulative_signed(h, i, gamma)
        if not r.finite:
            raise DomainError(f"cumulative moment of order {i} (gamma={gamma:g}) diverges: "
                              f"{r.reason}")
        cum.append(r.value)
        r = _standard_moment(g, i)
        if not r.finite:
            raise DomainError(f"standard moment of order {i} diverges: {r.reason}")
        std.append(r.value)
    cum_a, std_a = np.array(cum), np.array(std)
    err = np.abs(cum_a - std_a)
    # odd moments of symmetric laws vanish; compare them on the absolute scale
    rel = np.where(np.abs(cum_a) < 1e-12, err, err / np.maximum(np.abs(cum_a), 1e-300))
    back = differential_escort(g, 1.0 / gamma, method="numeric") if mode == "cumulative" \
        else differential_escort(h, gamma, method="numeric")
    lo, hi = f.support
    a = lo if np.isfinite(lo) else -6 * f.scale
    b = hi if np.isfinite(hi) else 6 * f.scale
    xs = np.linspace(a, b, probe)[1:-1]
    ident = float(np.max(np.abs(back.pdf(xs) - f.pdf(xs))))
    return RoundTripReport(gamma, orders, cum, std, float(np.max(rel)), ident, f.label)
