"""Sharp informational inequalities and their numeric verification.

Five families are covered: the two-parameter Stam, entropy-moment and
Cramer-Rao inequalities (minimizer g_{p,lambda}), the three-parameter Stam
inequality, and the cumulative entropy-moment / Cramer-Rao inequalities
(minimizer rho_{p,beta,lambda}). Every optimal bound is evaluated from its
closed form and, independently, by quadrature on the minimizing density; the
two must agree to ``CONSISTENCY_TOL`` or a :class:`ConsistencyError` is raised.
"""
from __future__ import annotations

import functools
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from . import functionals as fn
from .densities import Density, minimizer, stretched_gaussian, stretched_gaussian_norm
from .errors import ConsistencyError, ParameterError

SATURATION_TOL = 1e-4
CONSISTENCY_TOL = 1e-5
KINDS = ("stam2", "em2", "cr2", "stam3", "cumulative-em", "cumulative-cr")
ALIASES = {"entropyMoment2": "em2", "cramerRao2": "cr2", "cumulativeEM": "cumulative-em",
           "cumulativeCR": "cumulative-cr"}


@dataclass(frozen=True)
class InequalityReport:
    kind: str
    params: dict
    density: str
    lhs: float
    bound: float
    slack: float
    saturated: bool
    vacuous: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.vacuous or self.slack >= -1e-6 * abs(self.bound)

    def row(self):
        p = self.params
        return (self.kind, p.get("p"), p.get("beta"), p.get("lambda"), self.density,
                self.lhs, self.bound, self.slack, self.saturated)

    def to_dict(self):
        return asdict(self)


def _report(kind, params, f: Density, lhs, bound, diag):
    vacuous = not np.isfinite(lhs)
    slack = lhs - bound if not vacuous else np.inf
    sat = (not vacuous) and abs(slack) / abs(bound) < SATURATION_TOL
    return InequalityReport(kind, params, f.label, float(lhs), float(bound), float(slack),
                            bool(sat), bool(vacuous), diag)


def _p_star(p):
    if p == 1:
        return np.inf
    return p / (p - 1.0)


def _gate_two(p, lam, need_fisher=True):
    if need_fisher and not p > 1:
        raise ParameterError("p must exceed 1 for inequalities involving Fisher information")
    ps = _p_star(p)
    if not 0 < ps < np.inf:
        raise ParameterError(f"p* = {ps} must be positive and finite")
    if not lam > 1.0 / (1.0 + ps):
        raise ParameterError(f"lambda must exceed 1/(1+p*) = {1.0 / (1.0 + ps):.6g}")


def _gate_cumulative(p, beta, lam, strict=False):
    if not beta > max(lam - 1.0, (1.0 - lam) / p):
        raise ParameterError("beta must exceed max(lambda - 1, (1 - lambda)/p)")
    if strict and not beta > (1.0 - lam) / _p_star(p):
        raise ParameterError("strict mode: beta must also exceed (1 - lambda)/p*")


def _check_consistent(name, closed, quad, tol=CONSISTENCY_TOL):
    rel = abs(closed - quad) / abs(closed)
    if not rel <= tol:
        raise ConsistencyError(f"{name}: closed form {closed:.12g} vs quadrature {quad:.12g} "
                               f"(relative gap {rel:.2e})")
    return rel


# ---------------------------------------------------------------- closed forms on g_{p,lambda}

def gaussian_entropy_power(p, lam):
    """N_lambda[g_{p,lambda}]."""
    ps = _p_star(p)
    a = stretched_gaussian_norm(p, lam)
    if lam == 1:
        return np.exp(1.0 / ps) / a
    return (ps * lam / (ps * lam + lam - 1.0)) ** (1.0 / (1.0 - lam)) / a


def gaussian_deviation(p, lam):
    """sigma_{p*}[g_{p,lambda}]."""
    ps = _p_star(p)
    return (ps * lam + lam - 1.0) ** (-1.0 / ps)


def gaussian_fisher(p, lam):
    """F_{p,lambda}[g_{p,lambda}]."""
    ps = _p_star(p)
    a = stretched_gaussian_norm(p, lam)
    return ps ** p * a ** (p * (lam - 1.0)) / (ps * lam + lam - 1.0)


def gaussian_phi(p, lam):
    return gaussian_fisher(p, lam) ** (1.0 / (p * lam))


# ---------------------------------------------------------------- two-parameter bounds

@functools.lru_cache(maxsize=128)
def _bounds_two(p, lam):
    g = stretched_gaussian(p, lam)
    ps = _p_star(p)
    closed = {"stam2": gaussian_phi(p, lam) * gaussian_entropy_power(p, lam),
              "em2": gaussian_deviation(p, lam) / gaussian_entropy_power(p, lam),
              "cr2": gaussian_phi(p, lam) * gaussian_deviation(p, lam)}
    phi = fn.fisher(g, p, lam).extra["phi"]
    N = fn.entropy_power(g, lam).value
    sig = fn.typical_deviation(g, ps).value
    quad = {"stam2": phi * N, "em2": sig / N, "cr2": phi * sig}
    gaps = {k: _check_consistent(f"{k} bound (p={p:g}, lambda={lam:g})", closed[k], quad[k])
            for k in closed}
    return closed, quad, gaps


def bound_stam2(p: float, lam: float) -> float:
    """phi_{p,lambda}[g] N_lambda[g], the optimal two-parameter Stam bound."""
    _gate_two(p, lam)
    return _bounds_two(float(p), float(lam))[0]["stam2"]


def bound_em2(p: float, lam: float) -> float:
    """sigma_{p*}[g] / N_lambda[g]."""
    _gate_two(p, lam, need_fisher=False)
    return _bounds_two(float(p), float(lam))[0]["em2"]


def bound_cr2(p: float, lam: float) -> float:
    """phi_{p,lambda}[g] sigma_{p*}[g]."""
    _gate_two(p, lam)
    return _bounds_two(float(p), float(lam))[0]["cr2"]


def check_stam2(f: Density, p: float, lam: float) -> InequalityReport:
    bound = bound_stam2(p, lam)
    F = fn.fisher(f, p, lam)
    N = fn.entropy_power(f, lam)
    lhs = F.extra["phi"] * N.value if F.finite and N.finite else np.inf
    return _report("stam2", {"p": p, "lambda": lam}, f, lhs, bound,
                   {"fisher": F.to_dict(), "entropy_power": N.to_dict()})


def check_em2(f: Density, p: float, lam: float) -> InequalityReport:
    bound = bound_em2(p, lam)
    s = fn.typical_deviation(f, _p_star(p))
    N = fn.entropy_power(f, lam)
    lhs = s.value / N.value if s.finite and N.finite else np.inf
    return _report("em2", {"p": p, "lambda": lam}, f, lhs, bound,
                   {"deviation": s.to_dict(), "entropy_power": N.to_dict()})


def check_cr2(f: Density, p: float, lam: float) -> InequalityReport:
    bound = bound_cr2(p, lam)
    F = fn.fisher(f, p, lam)
    s = fn.typical_deviation(f, _p_star(p))
    lhs = F.extra["phi"] * s.value if F.finite and s.finite else np.inf
    return _report("cr2", {"p": p, "lambda": lam}, f, lhs, bound,
                   {"fisher": F.to_dict(), "deviation": s.to_dict()})


# ---------------------------------------------------------------- three-parameter bounds

def _lambda0(beta, lam):
    return beta / (1.0 + beta - lam)


def kbar_closed_form(p, beta, lam):
    """Optimal cumulative entropy-moment constant, explicit expression."""
    ps = _p_star(p)
    if lam == 1:
        return (ps ** (1.0 / p) * np.exp(-1.0 / ps) / (2.0 * special.gamma(1.0 / ps))) ** (1.0 / beta)
    ab = 1.0 + beta - lam
    a = stretched_gaussian_norm(p, _lambda0(beta, lam))
    num = (ps * beta) ** (1.0 / (lam - 1.0)) * ab ** (1.0 / (ps * ab))
    den = (ps * beta + lam - 1.0) ** (1.0 / (lam - 1.0) + 1.0 / (ps * ab))
    return num / den * a ** (1.0 / ab)


def k_closed_form(p, beta, lam):
    """Optimal cumulative Cramer-Rao constant, explicit expression."""
    ps = _p_star(p)
    ab = 1.0 + beta - lam
    a = stretched_gaussian_norm(p, _lambda0(beta, lam))
    # the exponent of (p* beta + lambda - 1) is (p beta + 1 - lambda)/p
    inner = ab ** ((lam - 1.0) / ps) * a ** (lam - 1.0) / (ps * beta + lam - 1.0) ** ((p * beta + 1.0 - lam) / p)
    return ps ** (1.0 / beta) * inner ** (1.0 / (beta * ab))


def _escort_route(p, beta, lam):
    """Bounds from the two-parameter closed forms at lambda0 and the escort laws.

    rho is D_{1/alpha_bar} g_{p,lambda0} up to scaling, so sigma/N and phi N
    carry over with the power 1/alpha_bar (and |1/alpha_bar|^(1/beta) for phi).
    """
    ab = 1.0 + beta - lam
    l0 = _lambda0(beta, lam)
    em = gaussian_deviation(p, l0) / gaussian_entropy_power(p, l0)
    st = gaussian_phi(p, l0) * gaussian_entropy_power(p, l0)
    cr = gaussian_phi(p, l0) * gaussian_deviation(p, l0)
    return {"kbar": em ** (1.0 / ab),
            "stam3": ab ** (-1.0 / beta) * st ** (1.0 / ab),
            "k": ab ** (-1.0 / beta) * cr ** (1.0 / ab)}


@functools.lru_cache(maxsize=128)
def _bounds_three(p, beta, lam):
    ps = _p_star(p)
    ab = 1.0 + beta - lam
    route = _escort_route(p, beta, lam)
    closed = {"kbar": kbar_closed_form(p, beta, lam), "k": k_closed_form(p, beta, lam),
              "stam3": route["stam3"]}
    gaps = {}
    for key in ("kbar", "k"):
        gaps[key + ":escort"] = _check_consistent(f"{key} (p={p:g}, beta={beta:g}, lambda={lam:g}) "
                                                  "closed form vs escort route",
                                                  closed[key], route[key], 1e-10)
    rho = minimizer(p, beta, lam)
    phi = fn.fisher(rho, p, beta).extra["phi"]
    N = fn.entropy_power(rho, lam).value
    sig = fn.cumulative_deviation(rho, ps, ab).value
    quad = {"kbar": sig / N, "k": phi * sig, "stam3": phi * N}
    for key in quad:
        gaps[key] = _check_consistent(f"{key} bound (p={p:g}, beta={beta:g}, lambda={lam:g})",
                                      closed[key], quad[key])
    return closed, quad, gaps


def _gate_stam3(p, beta, lam):
    if not p > 1:
        raise ParameterError("p must exceed 1")
    if not beta > 0:
        raise ParameterError("beta must be positive")
    if not lam > 1.0 - beta * _p_star(p):
        raise ParameterError("lambda must exceed 1 - beta p*")
    if not 1.0 + beta - lam > 0:
        raise ParameterError("the optimal bound is evaluated for 1 + beta - lambda > 0 only")


def bound_stam3(p: float, beta: float, lam: float) -> float:
    """phi_{p,beta}[rho] N_lambda[rho]."""
    _gate_stam3(p, beta, lam)
    if beta == lam:
        return bound_stam2(p, lam)
    return _bounds_three(float(p), float(beta), float(lam))[0]["stam3"]


def bound_Kbar(p: float, beta: float, lam: float, *, strict: bool = False) -> float:
    """Optimal constant of sigma_{p*,1+beta-lambda}[f] / N_lambda[f] >= Kbar."""
    ps = _p_star(p)
    if not 0 < ps < np.inf:
        raise ParameterError("p* must be positive and finite")
    _gate_cumulative(p, beta, lam, strict)
    return _bounds_three(float(p), float(beta), float(lam))[0]["kbar"]


def bound_K(p: float, beta: float, lam: float, *, strict: bool = False) -> float:
    """Optimal constant of phi_{p,beta}[f] sigma_{p*,1+beta-lambda}[f] >= K."""
    if not p > 1:
        raise ParameterError("p must exceed 1")
    _gate_cumulative(p, beta, lam, strict)
    return _bounds_three(float(p), float(beta), float(lam))[0]["k"]


def bound_diagnostics(p: float, beta: float, lam: float) -> dict:
    """Closed-form values, quadrature values and their relative gaps."""
    _gate_cumulative(p, beta, lam)
    closed, quad, gaps = _bounds_three(float(p), float(beta), float(lam))
    return {"closed": dict(closed), "quadrature": dict(quad), "gaps": dict(gaps)}


def check_stam3(f: Density, p: float, beta: float, lam: float) -> InequalityReport:
    bound = bound_stam3(p, beta, lam)
    F = fn.fisher(f, p, beta)
    N = fn.entropy_power(f, lam)
    lhs = F.extra["phi"] * N.value if F.finite and N.finite else np.inf
    return _report("stam3", {"p": p, "beta": beta, "lambda": lam}, f, lhs, bound,
                   {"fisher": F.to_dict(), "entropy_power": N.to_dict()})


def _deviation(f, p, gamma, central):
    if central:
        return fn.central_cumulative_deviation(f, p, gamma)
    return fn.cumulative_deviation(f, p, gamma)


def check_cumulative_em(f: Density, p: float, beta: float, lam: float, *,
                        central: bool = False, strict: bool = False) -> InequalityReport:
    bound = bound_Kbar(p, beta, lam, strict=strict)
    s = _deviation(f, _p_star(p), 1.0 + beta - lam, central)
    N = fn.entropy_power(f, lam)
    lhs = s.value / N.value if s.finite and N.finite else np.inf
    return _report("cumulative-em", {"p": p, "beta": beta, "lambda": lam, "central": central},
                   f, lhs, bound, {"deviation": s.to_dict(), "entropy_power": N.to_dict()})


def check_cumulative_cr(f: Density, p: float, beta: float, lam: float, *,
                        central: bool = False, strict: bool = False) -> InequalityReport:
    bound = bound_K(p, beta, lam, strict=strict)
    F = fn.fisher(f, p, beta)
    s = _deviation(f, _p_star(p), 1.0 + beta - lam, central)
    lhs = F.extra["phi"] * s.value if F.finite and s.finite else np.inf
    return _report("cumulative-cr", {"p": p, "beta": beta, "lambda": lam, "central": central},
                   f, lhs, bound, {"fisher": F.to_dict(), "deviation": s.to_dict()})


def check(kind: str, f: Density, p: float, beta: float, lam: float, **kw) -> InequalityReport:
    """Dispatch by kind; two-parameter kinds ignore beta."""
    kind = ALIASES.get(kind, kind)
    if kind == "stam2":
        return check_stam2(f, p, lam)
    if kind == "em2":
        return check_em2(f, p, lam)
    if kind == "cr2":
        return check_cr2(f, p, lam)
    if kind == "stam3":
        return check_stam3(f, p, beta, lam)
    if kind == "cumulative-em":
        return check_cumulative_em(f, p, beta, lam, **kw)
    if kind == "cumulative-cr":
        return check_cumulative_cr(f, p, beta, lam, **kw)
    raise ParameterError(f"unknown inequality kind {kind!r}; choose from {KINDS}")


def own_minimizer(kind: str, p: float, beta: float, lam: float) -> Density:
    """The density saturating the inequality of the given kind."""
    kind = ALIASES.get(kind, kind)
    if kind in ("stam2", "em2", "cr2"):
        return stretched_gaussian(p, lam)
    return minimizer(p, beta, lam)


def sweep(kinds, densities, tuples, **kw):
    """Reports for every (kind, density, (p, beta, lambda)) in deterministic order."""
    out = []
    for kind in kinds:
        for f in densities:
            for p, beta, lam in tuples:
                out.append(check(kind, f, p, beta, lam, **kw))
    return out
