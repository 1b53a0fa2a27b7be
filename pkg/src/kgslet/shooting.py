"""Direct Numerov shooting for the radial KG equation.

The equation ``-R'' + U(r, E) R = 0`` with

    U(r, E) = l'(l'+1)/r^2 + gamma(r) + 2 E V(r) - E^2

is integrated on a grid uniform in ``x = ln r``.  With ``R = sqrt(r) y`` it reads
``y'' = [(l'+1/2)^2 + r^2 (gamma + 2 E V - E^2)] y``, which is smooth at small r
even when ``l'`` is not an integer.  Eigenvalues are bracketed by counting nodes
and then refined on the Casoratian of the outward and inward solutions; two step
sizes are combined by Richardson extrapolation.

This module shares no code with the expansion solver and serves as its check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketExhausted, DomainError, NotConfining
from .potential import (
    EffectiveProblem,
    PotentialPair,
    RadialPotential,
    effective_l,
    make_effective,
)
from .slet import Branch, QuantumNumbers

DEFAULT_LOG_STEP = 0.004
MIN_POINTS = 1000
TAIL_DEPTH = 40.0  # sqrt(r^2 U) at r_max; the tail is suppressed by ~exp(-TAIL_DEPTH)
R_MIN_FACTOR = 1e-6
CAP_FACTOR = 1e4
COARSE_WIDTH = 1e-4


@dataclass(frozen=True)
class RadialGrid:
    """Grid uniform in ``ln r``; ``h`` is the step in ``ln r``."""

    r_min: float
    r_max: float
    h: float
    n_points: int

    @classmethod
    def spanning(cls, r_min, r_max, h):
        n = max(MIN_POINTS, int(math.ceil(math.log(r_max / r_min) / h)) + 1)
        return cls(r_min, r_max, math.log(r_max / r_min) / (n - 1), n)

    def halved(self):
        n = 2 * self.n_points - 1
        return RadialGrid(self.r_min, self.r_max, self.h / 2.0, n)

    def radii(self):
        return np.exp(np.linspace(math.log(self.r_min), math.log(self.r_max), self.n_points))

    def to_dict(self):
        return {"r_min": self.r_min, "r_max": self.r_max, "h": self.h,
                "n_points": self.n_points, "spacing": "log"}


@dataclass(frozen=True)
class OracleResult:
    energy: float
    nodes: int
    bracket: tuple
    grid: RadialGrid
    matching_defect: float
    coarse_energy: float
    fine_energy: float
    branch: Branch = Branch.PARTICLE

    @property
    def grid_change(self):
        """Eigenvalue shift between the two step sizes."""
        return abs(self.fine_energy - self.coarse_energy)

    def to_dict(self):
        return {"energy": self.energy, "nodes": self.nodes, "bracket": list(self.bracket),
                "grid": self.grid.to_dict(), "matching_defect": self.matching_defect,
                "coarse_energy": self.coarse_energy, "fine_energy": self.fine_energy,
                "grid_change": self.grid_change, "branch": self.branch.label}


def effective_term(effective: EffectiveProblem, E: float, r, l: int = 0):
    """``U(r, E)``, the coefficient of R after moving everything to the left side."""
    if np.any(np.asarray(r) <= 0):
        raise DomainError(f"effective term evaluated at r={r!r}; need r > 0")
    lp = effective_l(l, effective.Ac)
    r = np.asarray(r, dtype=float) if np.ndim(r) else float(r)
    return (lp * (lp + 1.0) / r**2 + effective.gamma(r)
            + 2.0 * E * effective.vector(r) - E * E)


class _Problem:
    """Grid-independent pieces of one (potential, l) shooting problem."""

    def __init__(self, effective, l):
        self.eff = effective
        self.m = effective.mass
        self.lp = effective_l(l, effective.Ac)
        self.c = (self.lp + 0.5) ** 2
        A = max(abs(effective.A1), abs(effective.A2))
        n = l + 1.0
        self.scale = max(1.0 / self.m, 2.0 * n * n / (self.m * A) if A > 0 else 0.0)
        self.r_min = R_MIN_FACTOR / self.m
        self._cache = {}

    def u(self, E, r):
        return (self.lp * (self.lp + 1.0) / (r * r) + self.eff.gamma(r)
                + 2.0 * E * self.eff.vector(r) - E * E)

    def asymptote(self, E):
        """Leading large-r term of U at energy E as (coefficient, exponent)."""
        lead = (self.eff.gamma + self.eff.vector.scale(2.0 * E)
                + RadialPotential.constant(-E * E)).leading()
        return (0.0, 0.0) if lead is None else (lead.coefficient, lead.exponent)

    def tail_radius(self, E):
        """Smallest radius beyond the state where ``r^2 U >= TAIL_DEPTH^2``, or None."""
        cap = CAP_FACTOR * self.scale
        r = self.scale
        while r <= cap:
            if r * r * self.u(E, r) >= TAIL_DEPTH**2:
                return r
            r *= 1.25
        return None

    def arrays(self, grid):
        key = (grid.r_min, grid.r_max, grid.n_points)
        if key not in self._cache:
            r = grid.radii()
            self._cache = {key: (r, r * r, self.eff.gamma(r), self.eff.vector(r))}
        return self._cache[key]

    def seeds(self, E, r0, r1):
        a = self.eff.gamma.coefficient(-1.0) + 2.0 * E * self.eff.vector.coefficient(-1.0)
        a /= 2.0 * (self.lp + 1.0)
        p = self.lp + 0.5
        return r0**p * (1.0 + a * r0), r1**p * (1.0 + a * r1)

    def f_values(self, E, grid):
        r, r2, g, v = self.arrays(grid)
        return r2 * (g + 2.0 * E * v - E * E) + self.c


def _numerov(k, y0, y1):
    n = len(k)
    y = [0.0] * n
    y[0], y[1] = y0, y1
    for i in range(1, n - 1):
        y[i + 1] = ((12.0 - 10.0 * k[i]) * y[i] - k[i - 1] * y[i - 1]) / k[i + 1]
    return y


def _count_sign_changes(y):
    nodes = 0
    prev = y[0]
    for v in y[1:]:
        if v == 0.0:
            continue
        if (v > 0.0) != (prev > 0.0):
            nodes += 1
        prev = v
    return nodes


class _Shooter:
    def __init__(self, prob, grid):
        self.prob = prob
        self.grid = grid
        self.h2 = grid.h * grid.h
        r = grid.radii()
        self.r0, self.r1 = float(r[0]), float(r[1])

    def _k(self, E):
        f = self.prob.f_values(E, self.grid)
        return f, (1.0 - self.h2 / 12.0 * f).tolist()

    def outward(self, E):
        f, k = self._k(E)
        y0, y1 = self.prob.seeds(E, self.r0, self.r1)
        return f, k, _numerov(k, y0, y1)

    def nodes(self, E):
        return _count_sign_changes(self.outward(E)[2])

    def match_index(self, E):
        """Outermost classically allowed grid point at energy E."""
        f = self.prob.f_values(E, self.grid)
        allowed = np.nonzero(f < 0.0)[0]
        n = len(f)
        m = int(allowed[-1]) if allowed.size else n // 2
        return min(max(m, 2), n - 3)

    def _match(self, E, m=None):
        f, k = self._k(E)
        if m is None:
            m = self.match_index(E)
        y0, y1 = self.prob.seeds(E, self.r0, self.r1)
        yo = _numerov(k[: m + 2], y0, y1)
        yi = [0.0] * (m - 1) + _numerov(k[m - 1:][::-1], 0.0, 1.0)[::-1]
        return m, yo, yi

    def casoratian(self, E, m):
        """Scaled Casoratian of the outward and inward solutions at grid index m.

        It vanishes exactly at eigenvalues of the discrete problem and, for a
        fixed m, is continuous in E.
        """
        m, yo, yi = self._match(E, m)
        so = max(abs(v) for v in yo[: m + 2])
        si = max(abs(v) for v in yi[m:])
        return (yo[m] * yi[m + 1] - yo[m + 1] * yi[m]) / (so * si)

    def solution(self, E):
        m, yo, yi = self._match(E)
        scale = yo[m] / yi[m] if yi[m] != 0.0 else 1.0
        y = yo[: m + 1] + [scale * v for v in yi[m + 1:]]
        h = self.grid.h
        dlo = (yo[m + 1] - yo[m - 1]) / (2.0 * h * yo[m]) if yo[m] else math.inf
        dli = (yi[m + 1] - yi[m - 1]) / (2.0 * h * yi[m]) if yi[m] else math.inf
        return y, abs(dlo - dli)


def _adaptive_nodes(prob, E, h):
    r_max = prob.tail_radius(E) or CAP_FACTOR * prob.scale
    return _Shooter(prob, RadialGrid.spanning(prob.r_min, r_max, h)).nodes(E)


def _check_confining(prob, E_lo, E_hi):
    for E in (E_lo, E_hi):
        coef, p = prob.asymptote(E)
        if p > 0 and coef <= 0.0:
            raise NotConfining(
                f"U(r, E={E:.6g}) -> -infinity as r -> infinity (leading term {coef:.3g} r^{p:g}); "
                "states are at best quasi-bound", stage="find_bound_state")
    mid = 0.5 * (E_lo + E_hi)
    coef, p = prob.asymptote(mid)
    if p <= 0 and coef <= 0.0:
        raise NotConfining(f"U(r, E={mid:.6g}) does not stay positive at large r",
                           stage="find_bound_state")


def _default_bracket(prob):
    m = prob.m
    coef, p = prob.asymptote(0.0)
    if p > 0:
        return (0.0 if prob.eff.vector.is_zero() else -m), m
    # U(inf) = g0 + 2 E v0 - E^2 must stay positive
    g0 = prob.eff.gamma.coefficient(0.0)
    v0 = prob.eff.vector.coefficient(0.0)
    root = math.sqrt(max(v0 * v0 + g0, 0.0))
    if prob.eff.vector.is_zero():
        # U depends on E only through E^2; particle states lie above zero
        return 0.0, root
    return v0 - root, v0 + root


def find_bound_state(effective, qn=(0, 0), E_bracket=None, branch=Branch.PARTICLE, *,
                     h: float = DEFAULT_LOG_STEP, xtol: float = 1e-14) -> OracleResult:
    """Eigenvalue with exactly ``qn.n_r`` radial nodes inside ``E_bracket``.

    Raises NotConfining for potentials whose ``U`` falls to minus infinity at
    large r, and BracketExhausted if the bracket does not contain the state.
    """
    if isinstance(effective, PotentialPair):
        effective = make_effective(effective)
    qn = QuantumNumbers.coerce(qn)
    branch = Branch.parse(branch)
    if branch is Branch.ANTIPARTICLE:
        if not effective.vector.is_zero():
            raise BracketExhausted(
                "antiparticle states are only supported for V == 0, where they mirror "
                "the particle states", stage="find_bound_state")
        mirrored = None if E_bracket is None else (-E_bracket[1], -E_bracket[0])
        res = find_bound_state(effective, qn, mirrored, Branch.PARTICLE, h=h, xtol=xtol)
        return OracleResult(-res.energy, res.nodes, (-res.bracket[1], -res.bracket[0]), res.grid,
                            res.matching_defect, -res.coarse_energy, -res.fine_energy, branch)

    prob = _Problem(effective, qn.l)
    m = prob.m
    lo, hi = E_bracket if E_bracket is not None else _default_bracket(prob)
    if not lo < hi:
        raise BracketExhausted(f"empty energy bracket ({lo}, {hi})", stage="find_bound_state")
    _check_confining(prob, lo, hi)
    target = qn.n_r

    if _adaptive_nodes(prob, lo, h) > target:
        raise BracketExhausted(f"more than {target} nodes already at E={lo:.6g}",
                               stage="find_bound_state")
    if prob.asymptote(hi)[0] > 0 and prob.asymptote(hi)[1] > 0 and E_bracket is None:
        while _adaptive_nodes(prob, hi, h) <= target:
            lo, hi = hi, hi + 2.0 * (hi - lo)
            if hi > 1e6 * m:
                raise BracketExhausted("no state found below 1e6 m", stage="find_bound_state")
    elif _adaptive_nodes(prob, hi, h) <= target:
        raise BracketExhausted(f"state n_r={target} lies above E={hi:.6g}", stage="find_bound_state")

    # coarse node bisection, each energy on its own tail-adapted grid
    while hi - lo > COARSE_WIDTH * m or prob.tail_radius(hi) is None:
        mid = 0.5 * (lo + hi)
        if _adaptive_nodes(prob, mid, h) > target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * m:
            break

    r_max = prob.tail_radius(hi) or CAP_FACTOR * prob.scale
    grid = RadialGrid.spanning(prob.r_min, r_max, h)
    coarse, _ = _refine(prob, grid, lo, hi, target, xtol * m)
    fine_grid = grid.halved()
    fine, shooter = _refine(prob, fine_grid, lo, hi, target, xtol * m)
    energy = fine + (fine - coarse) / 15.0
    y, defect = shooter.solution(fine)
    return OracleResult(energy=energy, nodes=_count_sign_changes(y[1:-1]), bracket=(lo, hi),
                        grid=fine_grid, matching_defect=defect, coarse_energy=coarse,
                        fine_energy=fine, branch=branch)


def _refine(prob, grid, lo, hi, target, xtol):
    sh = _Shooter(prob, grid)
    width = hi - lo
    for _ in range(20):
        if sh.nodes(lo) <= target < sh.nodes(hi):
            break
        lo, hi = lo - width, hi + width
        width *= 2.0
    else:
        raise BracketExhausted("node bracket lost on the fixed grid", stage="find_bound_state")
    # tighten to a single eigenvalue
    while sh.nodes(hi) > target + 1:
        mid = 0.5 * (lo + hi)
        if sh.nodes(mid) > target:
            hi = mid
        else:
            lo = mid
    m = sh.match_index(0.5 * (lo + hi))
    E = brentq(sh.casoratian, lo, hi, args=(m,), xtol=xtol, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    return E, sh
