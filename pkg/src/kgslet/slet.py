"""Shifted-l expansion for the radial Klein-Gordon equation.

The energy is expanded in powers of ``1/lbar`` with ``lbar = l' - beta``.  The
expansion point ``r0`` and the shift ``beta`` are fixed self-consistently, after
which the second- and third-order terms follow from the anharmonic coefficients
``alpha1`` and ``alpha2``.

Typical use::

    >>> from kgslet import PotentialPair, parse_potential, solve_state
    >>> pair = PotentialPair(1.0, vector=parse_potential("-0.2/r"))
    >>> round(solve_state(pair, (0, 0)).energy, 11)
    0.97890631293
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BranchInconsistent,
    ComplexLeadingEnergy,
    DegenerateDenominator,
    DomainError,
    ImaginaryFrequency,
    KGError,
    MaximumNotMinimum,
    NoBracket,
    NonpositiveQ,
    NoRealExpansion,
)
from .potential import EffectiveProblem, PotentialPair, effective_l, make_effective

R0_RTOL = 1e-14
RESIDUAL_RTOL = 1e-13
SCAN_DECADES = 3.0
SCAN_POINTS_PER_DECADE = 48
SCAN_WIDENINGS = 4


class Branch(enum.IntEnum):
    """Sign of the square root in the leading energy."""

    PARTICLE = 1
    ANTIPARTICLE = -1

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("particle", "+", "plus", "positive"):
                return cls.PARTICLE
            if key in ("antiparticle", "-", "minus", "negative"):
                return cls.ANTIPARTICLE
            raise ValueError(f"unknown branch {value!r}")
        return cls(int(value))

    @property
    def label(self):
        return self.name.lower()


@dataclass(frozen=True)
class QuantumNumbers:
    n_r: int = 0
    l: int = 0

    def __post_init__(self):
        if int(self.n_r) != self.n_r or self.n_r < 0:
            raise ValueError(f"n_r must be a non-negative integer, got {self.n_r!r}")
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l!r}")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "l", int(self.l))

    @classmethod
    def coerce(cls, qn) -> "QuantumNumbers":
        if isinstance(qn, QuantumNumbers):
            return qn
        n_r, l = qn
        return cls(n_r, l)


@dataclass(frozen=True)
class ExpansionPoint:
    """Self-consistent expansion point and the quantities fixed along with it."""

    r0: float
    Q: float
    E0: float
    w: float
    beta: float
    residual: float
    tolerance: float
    second_derivative: float
    brackets: tuple = ()

    def __iter__(self):
        return iter((self.r0, self.Q, self.E0, self.w, self.beta))


@dataclass(frozen=True)
class SletSolution:
    n_r: int
    l: int
    branch: Branch
    l_prime: float
    r0: float
    Q: float
    lbar: float
    beta: float
    w: float
    E0: float
    E1: float
    E2: float
    E3: float
    alpha1: float
    alpha2: float
    epsilon: tuple
    delta: tuple
    partial_sums: tuple
    residual: float
    tolerance: float
    second_derivative: float
    brackets: tuple = field(default=())
    boundary_case: bool = False

    @property
    def energy(self) -> float:
        """Energy through third order in ``1/lbar``."""
        return self.partial_sums[2]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["branch"] = self.branch.label
        d["epsilon"] = list(self.epsilon)
        d["delta"] = list(self.delta)
        d["partial_sums"] = list(self.partial_sums)
        d["brackets"] = [list(b) for b in self.brackets]
        d["energy"] = self.energy
        return d


def _as_effective(problem) -> EffectiveProblem:
    if isinstance(problem, EffectiveProblem):
        return problem
    if isinstance(problem, PotentialPair):
        return make_effective(problem)
    raise TypeError(f"expected PotentialPair or EffectiveProblem, got {type(problem).__name__}")


def _check_r(r):
    if not r > 0.0:
        raise DomainError(f"expansion point must be positive, got r={r!r}")


def b_c(effective: EffectiveProblem, r: float) -> tuple[float, float]:
    """Coefficients of the quadratic ``Q^2 - b Q + c = 0`` for the expansion point."""
    _check_r(r)
    V, g = effective.vector, effective.gamma
    v, v1 = V.derivative(0, r), V.derivative(1, r)
    ga, g1 = g.derivative(0, r), g.derivative(1, r)
    b = r**3 * (2.0 * v * v1 + g1 + r * v1 * v1)
    c = 0.25 * r**6 * (g1 * g1 + 4.0 * v * v1 * g1 - 4.0 * ga * v1 * v1)
    return b, c


def _discriminant(effective, r):
    # b^2 - 4c with the gamma'^2 pieces cancelled analytically
    V, g = effective.vector, effective.gamma
    v, v1 = V.derivative(0, r), V.derivative(1, r)
    t = 2.0 * v + r * v1
    return r**6 * v1 * v1 * (t * t + 2.0 * r * g.derivative(1, r) + 4.0 * g.derivative(0, r))


def q_of_r(effective: EffectiveProblem, r: float) -> float:
    b, _ = b_c(effective, r)
    disc = _discriminant(effective, r)
    if disc < 0.0:
        raise NoRealExpansion(f"b^2 - 4c = {disc:.6g} < 0 at r={r:.6g}", stage="q_of_r")
    Q = 0.5 * (b + math.sqrt(disc))
    if not Q > 0.0:
        raise NonpositiveQ(f"Q = {Q:.6g} <= 0 at r={r:.6g}", stage="q_of_r")
    return Q


def leading_energy(effective: EffectiveProblem, r: float, Q: float, branch=Branch.PARTICLE) -> float:
    _check_r(r)
    s = int(Branch.parse(branch))
    v = effective.vector.derivative(0, r)
    rad = v * v + Q / (r * r) + effective.gamma.derivative(0, r)
    if rad < 0.0:
        raise ComplexLeadingEnergy(f"radicand {rad:.6g} < 0 at r={r:.6g}", stage="leading_energy")
    return v + s * math.sqrt(rad)


def omega(effective: EffectiveProblem, r: float, Q: float, E0: float) -> float:
    """Frequency of the harmonic problem around the expansion point."""
    _check_r(r)
    r4 = r**4
    rad = (12.0 + 2.0 * r4 * effective.gamma.derivative(2, r) / Q
           + 4.0 * r4 * effective.vector.derivative(2, r) * E0 / Q)
    if not rad > 0.0:
        raise ImaginaryFrequency(f"w^2 = {rad:.6g} <= 0 at r={r:.6g}", stage="omega")
    return math.sqrt(rad)


def shift_beta(w: float, n_r: int) -> float:
    return -0.5 * (1.0 + (n_r + 0.5) * w)


def _chain(effective, r, n_r, branch):
    Q = q_of_r(effective, r)
    E0 = leading_energy(effective, r, Q, branch)
    w = omega(effective, r, Q, E0)
    return Q, E0, w, shift_beta(w, n_r)


def _e0_slopes(effective, r, Q, branch):
    """First and second r-derivatives of the leading energy at fixed Q."""
    s = int(branch)
    V, g = effective.vector, effective.gamma
    v, v1, v2 = (V.derivative(k, r) for k in range(3))
    g0, g1, g2 = (g.derivative(k, r) for k in range(3))
    D = v * v + Q / r**2 + g0
    D1 = 2.0 * v * v1 - 2.0 * Q / r**3 + g1
    D2 = 2.0 * v1 * v1 + 2.0 * v * v2 + 6.0 * Q / r**4 + g2
    sq = math.sqrt(D)
    first = v1 + s * D1 / (2.0 * sq)
    second = v2 + s * (D2 / (2.0 * sq) - D1 * D1 / (4.0 * D * sq))
    return first, second, sq


def _length_scale(effective, qn):
    m = effective.mass
    scale = 1.0 / m
    A = max(abs(effective.A1), abs(effective.A2))
    if A > 0.0:
        try:
            n_eff = qn.n_r + effective_l(qn.l, effective.Ac) + 1.0
        except KGError:
            n_eff = qn.n_r + qn.l + 1.0
        q = n_eff * n_eff
        scale = max(scale, math.sqrt(q * q + q * A * A) / (m * A))
    return scale


def _scan(effective, n_r, branch, lp, lo, hi, npts):
    """Defect ``G`` on a geometric grid, NaN wherever the chain has no real value.

    Same formulas as the scalar chain, evaluated on whole arrays; the scan only
    needs sign changes, refinement goes through the scalar path.
    """
    rs = np.geomspace(lo, hi, npts)
    V, g = effective.vector, effective.gamma
    v, v1, v2 = (V.derivative(k, rs) for k in range(3))
    g0, g1, g2 = (g.derivative(k, rs) for k in range(3))
    with np.errstate(invalid="ignore", divide="ignore"):
        b = rs**3 * (2.0 * v * v1 + g1 + rs * v1 * v1)
        t = 2.0 * v + rs * v1
        disc = rs**6 * v1 * v1 * (t * t + 2.0 * rs * g1 + 4.0 * g0)
        Q = 0.5 * (b + np.sqrt(disc))
        Q = np.where(Q > 0.0, Q, np.nan)
        E0 = v + int(branch) * np.sqrt(v * v + Q / rs**2 + g0)
        w2 = 12.0 + 2.0 * rs**4 * g2 / Q + 4.0 * rs**4 * v2 * E0 / Q
        w = np.sqrt(np.where(w2 > 0.0, w2, np.nan))
        beta = -0.5 * (1.0 + (n_r + 0.5) * w)
        gs = (lp - beta) ** 2 - Q
    return rs, gs


def solve_r0(effective, qn, branch=Branch.PARTICLE) -> ExpansionPoint:
    """Find the expansion point ``r0`` by bracketing and Brent refinement.

    The defect ``G(r) = (l' - beta(r))^2 - Q(r)`` is scanned on a geometric grid
    around the Coulomb length scale; every sign change is refined and checked.
    Among the admissible roots the one with the lowest ``branch * E0`` wins.
    """
    effective = _as_effective(effective)
    qn = QuantumNumbers.coerce(qn)
    branch = Branch.parse(branch)
    lp = effective_l(qn.l, effective.Ac)

    def G(r):
        Q, _, _, beta = _chain(effective, r, qn.n_r, branch)
        return (lp - beta) ** 2 - Q

    scale = _length_scale(effective, qn)
    decades = SCAN_DECADES
    npts = int(2 * decades * SCAN_POINTS_PER_DECADE) + 1
    scan = (effective, qn.n_r, branch, lp)
    rs, gs = _scan(*scan, scale * 10**-decades, scale * 10**decades, npts)
    brackets = _sign_changes(rs, gs)
    widen = 0
    while not brackets and widen < SCAN_WIDENINGS:
        widen += 1
        lo_r, lo_g = _scan(*scan, rs[0] / 10.0, rs[0], SCAN_POINTS_PER_DECADE + 1)
        hi_r, hi_g = _scan(*scan, rs[-1], rs[-1] * 10.0, SCAN_POINTS_PER_DECADE + 1)
        rs = np.concatenate([lo_r[:-1], rs, hi_r[1:]])
        gs = np.concatenate([lo_g[:-1], gs, hi_g[1:]])
        brackets = _sign_changes(rs, gs)

    if not brackets:
        if np.all(np.isnan(gs)):
            # report the failure the scalar chain gives in the middle of the scan
            try:
                G(float(rs[len(rs) // 2]))
            except KGError as exc:
                raise type(exc)(f"no valid expansion point anywhere in the scan: {exc.args[0]}",
                                stage="solve_r0") from None
        raise NoBracket(f"no sign change of the r0 defect on [{rs[0]:.3g}, {rs[-1]:.3g}]",
                        stage="solve_r0", scan_range=(rs[0], rs[-1]))

    candidates, failures = [], []
    for a, b in brackets:
        try:
            candidates.append(_refine(effective, qn, branch, lp, G, a, b))
        except KGError as exc:
            failures.append(exc)
    if not candidates:
        raise failures[0].at("solve_r0")
    best = min(candidates, key=lambda ep: int(branch) * ep.E0)
    return replace(best, brackets=tuple(brackets))


def _sign_changes(rs, gs):
    out = []
    for i in range(len(rs) - 1):
        g0, g1 = gs[i], gs[i + 1]
        if math.isfinite(g0) and math.isfinite(g1):
            if g0 == 0.0:
                out.append((float(rs[i]), float(rs[i])))
            elif g0 * g1 < 0.0:
                out.append((float(rs[i]), float(rs[i + 1])))
    return out


def _refine(effective, qn, branch, lp, G, a, b):
    ga, gb = G(a), G(b)
    if a == b or ga == 0.0:
        r0 = a
    elif gb == 0.0:
        r0 = b
    elif ga * gb > 0.0:
        # the scan hit a root to rounding; keep the endpoint that is closer
        r0 = a if abs(ga) <= abs(gb) else b
    else:
        r0 = brentq(G, a, b, xtol=1e-300, rtol=max(4 * np.finfo(float).eps, R0_RTOL / 16), maxiter=500)
    Q, E0, w, beta = _chain(effective, r0, qn.n_r, branch)
    residual = abs((lp - beta) ** 2 - Q)
    tol = RESIDUAL_RTOL * max(1.0, Q)
    if not residual <= tol:
        raise NoBracket(f"sign change near r={r0:.6g} is not a root (defect {residual:.3g})",
                        stage="solve_r0")
    slope, curvature, sq = _e0_slopes(effective, r0, Q, branch)
    if abs(slope) * r0 > 1e-8 * max(1.0, abs(E0), sq):
        raise BranchInconsistent(
            f"the {branch.label} branch is not stationary at the r0 root (dE0/dr0 = {slope:.3g})",
            stage="solve_r0", slope=slope)
    if not int(branch) * curvature > 0.0:
        raise MaximumNotMinimum(
            f"d2E0/dr0^2 = {curvature:.6g} has the wrong sign at r0={r0:.6g}",
            stage="solve_r0", second_derivative=curvature)
    return ExpansionPoint(r0=r0, Q=Q, E0=E0, w=w, beta=beta, residual=residual,
                          tolerance=tol, second_derivative=curvature)


# -- anharmonic corrections ----------------------------------------------------

def _mixed(effective, k, r, E0):
    return effective.gamma.derivative(k, r) + 2.0 * effective.vector.derivative(k, r) * E0


def epsilon_coefficients(effective, r0, Q, E0, beta):
    t = 2.0 * beta + 1.0
    return (
        -2.0 * t,
        3.0 * t,
        -4.0 + r0**5 / (6.0 * Q) * _mixed(effective, 3, r0, E0),
        5.0 + r0**6 / (24.0 * Q) * _mixed(effective, 4, r0, E0),
    )


def delta_coefficients(effective, r0, Q, E0, beta, E2):
    t = 2.0 * beta + 1.0
    bb = beta * (beta + 1.0)
    V = effective.vector
    return (
        -2.0 * bb + 2.0 * r0**3 * V.derivative(1, r0) * E2 / Q,
        3.0 * bb + r0**4 * V.derivative(2, r0) * E2 / Q,
        -4.0 * t,
        5.0 * t,
        -6.0 + r0**7 / (120.0 * Q) * _mixed(effective, 5, r0, E0),
        7.0 + r0**8 / (720.0 * Q) * _mixed(effective, 6, r0, E0),
    )


def _scaled(coeffs, w):
    return tuple(c / w ** ((j + 1) / 2.0) for j, c in enumerate(coeffs))


def alpha1_from(epsilon, w, n_r):
    n = n_r
    e1, e2, e3, e4 = _scaled(epsilon, w)
    return ((1 + 2 * n) * e2 + 3 * (1 + 2 * n + 2 * n * n) * e4
            - (e1 * e1 + 6 * (1 + 2 * n) * e1 * e3 + (11 + 30 * n + 30 * n * n) * e3 * e3) / w)


def alpha2_from(epsilon, delta, w, n_r):
    n = n_r
    e1, e2, e3, e4 = _scaled(epsilon, w)
    d1, d2, d3, d4, d5, d6 = _scaled(delta, w)
    p1 = 1 + 2 * n
    p2 = 1 + 2 * n + 2 * n * n
    p11 = 11 + 30 * n + 30 * n * n
    first = p1 * d2 + 3 * p2 * d4 + 5 * (3 + 8 * n + 6 * n * n + 4 * n**3) * d6
    inv1 = (p1 * e2 * e2
            + 12 * p2 * e2 * e4
            + 2 * e1 * d1
            + 2 * (21 + 59 * n + 51 * n * n + 34 * n**3) * e4 * e4
            + 6 * p1 * e1 * d3
            + 30 * p2 * e1 * d5
            + 6 * p1 * e3 * d1
            + 2 * p11 * e3 * d3
            + 10 * (13 + 40 * n + 42 * n * n + 28 * n**3) * e3 * d5)
    inv2 = (4 * e1 * e1 * e2
            + 36 * p1 * e1 * e2 * e3
            + 8 * p11 * e2 * e3 * e3
            # 24(1+2n), not 24(1+n): only this form keeps E3 == 0 for excited Coulomb states
            + 24 * (1 + 2 * n) * e1 * e1 * e4
            + 8 * (31 + 78 * n + 78 * n * n) * e1 * e3 * e4
            + 12 * (57 + 189 * n + 225 * n * n + 150 * n**3) * e3 * e3 * e4)
    inv3 = (8 * e1**3 * e3
            + 108 * p1 * e1 * e1 * e3 * e3
            + 48 * p11 * e1 * e3**3
            + 30 * (31 + 109 * n + 141 * n * n + 94 * n**3) * e3**4)
    return first - inv1 / w + inv2 / w**2 - inv3 / w**3


def anharmonic_corrections(effective, r0, Q, E0, w, beta, n_r, E2_hint):
    """Return ``(alpha1, alpha2, epsilon, delta)``.

    ``E2_hint`` enters only delta_1 and delta_2 and therefore only ``alpha2``;
    pass the second-order energy obtained from ``alpha1``.
    """
    if not w > 0.0:
        raise ImaginaryFrequency(f"w = {w!r} must be positive", stage="anharmonic_corrections")
    eps = epsilon_coefficients(effective, r0, Q, E0, beta)
    dlt = delta_coefficients(effective, r0, Q, E0, beta, E2_hint)
    return alpha1_from(eps, w, n_r), alpha2_from(eps, dlt, w, n_r), eps, dlt


def _prefactor(effective, r0, Q, E0):
    gap = E0 - effective.vector.derivative(0, r0)
    if abs(gap) < 1e-14 * abs(E0) or gap == 0.0:
        raise DegenerateDenominator(f"E0 - V(r0) = {gap:.3g}", stage="energy_corrections")
    return Q / (2.0 * r0 * r0 * gap)


def energy_corrections(effective, r0, Q, E0, w, beta, n_r, *, full=False):
    """Energy-series coefficients ``(E1, E2, E3)``.

    Ordering is alpha1 -> E2 -> (delta_1, delta_2) -> alpha2 -> E3, so no term is
    ever evaluated with a placeholder second-order energy.  With ``full=True``
    the anharmonic coefficients are returned as well.
    """
    effective = _as_effective(effective)
    pref = _prefactor(effective, r0, Q, E0)
    E1 = pref * (2.0 * beta + 1.0 + (n_r + 0.5) * w)
    eps = epsilon_coefficients(effective, r0, Q, E0, beta)
    a1 = alpha1_from(eps, w, n_r)
    E2 = pref * (beta * (beta + 1.0) + a1)
    dlt = delta_coefficients(effective, r0, Q, E0, beta, E2)
    a2 = alpha2_from(eps, dlt, w, n_r)
    E3 = pref * a2
    if full:
        return E1, E2, E3, a1, a2, eps, dlt
    return E1, E2, E3


def solve_state(pair, qn=(0, 0), branch=Branch.PARTICLE) -> SletSolution:
    """Run the whole pipeline for one state and return every intermediate."""
    effective = _as_effective(pair)
    qn = QuantumNumbers.coerce(qn)
    branch = Branch.parse(branch)
    try:
        lp = effective_l(qn.l, effective.Ac)
    except KGError as exc:
        raise exc.at("effective_l")
    try:
        ep = solve_r0(effective, qn, branch)
    except KGError as exc:
        raise exc.at("solve_r0")
    try:
        E1, E2, E3, a1, a2, eps, dlt = energy_corrections(
            effective, ep.r0, ep.Q, ep.E0, ep.w, ep.beta, qn.n_r, full=True)
    except KGError as exc:
        raise exc.at("energy_corrections")
    lbar = lp - ep.beta
    s2 = ep.E0 + E2 / lbar**2
    s3 = s2 + E3 / lbar**3
    return SletSolution(
        n_r=qn.n_r, l=qn.l, branch=branch, l_prime=lp,
        r0=ep.r0, Q=ep.Q, lbar=lbar, beta=ep.beta, w=ep.w,
        E0=ep.E0, E1=E1, E2=E2, E3=E3, alpha1=a1, alpha2=a2,
        epsilon=tuple(eps), delta=tuple(dlt), partial_sums=(ep.E0, s2, s3),
        residual=ep.residual, tolerance=ep.tolerance,
        second_derivative=ep.second_derivative, brackets=ep.brackets,
        boundary_case=(lp == -0.5),
    )
