"""Radial potentials as exact power-law sums and the effective KG problem.

A potential is stored as a finite sum ``sum_i c_i * r**p_i``.  Squares, products
and derivatives of such sums stay inside the same algebra, so the effective
function ``gamma(r)`` and all derivatives up to sixth order are exact.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DomainError, SupercriticalCoupling, UnsupportedPotential

MAX_DERIVATIVE_ORDER = 6


@dataclass(frozen=True)
class PowerTerm:
    coefficient: float
    exponent: float

    def __post_init__(self):
        if not (math.isfinite(self.coefficient) and math.isfinite(self.exponent)):
            raise ValueError(f"non-finite power term {self.coefficient!r}*r^{self.exponent!r}")


def _falling(p, order):
    out = 1.0
    for j in range(order):
        out *= p - j
    return out


def _normalize(terms):
    acc = {}
    for t in terms:
        acc[t.exponent] = acc.get(t.exponent, 0.0) + t.coefficient
    return tuple(PowerTerm(c, p) for p, c in sorted(acc.items()) if c != 0.0)


@dataclass(frozen=True)
class RadialPotential:
    """Normalized sum of power-law terms.

    Equal exponents are merged (compared exactly), zero coefficients dropped and
    the terms sorted by ascending exponent.
    """

    terms: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize(self.terms))

    def _scaled_terms(self, order):
        # (c * p(p-1)...(p-order+1), p - order), memoized per order
        got = self._cache.get(order)
        if got is None:
            got = tuple((t.coefficient * _falling(t.exponent, order), t.exponent - order)
                        for t in self.terms)
            self._cache[order] = got
        return got

    def __hash__(self):
        return hash(self.terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "RadialPotential":
        """Build from ``(coefficient, exponent)`` pairs."""
        return cls(tuple(PowerTerm(float(c), float(p)) for c, p in pairs))

    @classmethod
    def constant(cls, value: float) -> "RadialPotential":
        return cls.from_pairs([(value, 0.0)])

    @classmethod
    def zero(cls) -> "RadialPotential":
        return cls()

    def __add__(self, other):
        return RadialPotential(self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RadialPotential):
            return RadialPotential(tuple(
                PowerTerm(a.coefficient * b.coefficient, a.exponent + b.exponent)
                for a in self.terms for b in other.terms))
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor: float) -> "RadialPotential":
        return RadialPotential(tuple(PowerTerm(t.coefficient * factor, t.exponent) for t in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponent: float) -> float:
        """Coefficient of ``r**exponent`` (0 if the term is absent)."""
        for t in self.terms:
            if t.exponent == exponent:
                return t.coefficient
        return 0.0

    def exponents(self):
        return tuple(t.exponent for t in self.terms)

    def leading(self):
        """Term with the largest exponent, or None for the zero potential."""
        return self.terms[-1] if self.terms else None

    def differentiate(self, order: int = 1) -> "RadialPotential":
        """Analytic derivative of the whole sum as a new potential."""
        return RadialPotential(tuple(
            PowerTerm(t.coefficient * _falling(t.exponent, order), t.exponent - order)
            for t in self.terms))

    def __call__(self, r):
        return self.derivative(0, r)

    def derivative(self, order: int, r):
        """``d^order/dr^order`` of the sum at ``r`` (scalar or array, r > 0)."""
        if not 0 <= order <= MAX_DERIVATIVE_ORDER:
            raise ValueError(f"derivative order must lie in 0..{MAX_DERIVATIVE_ORDER}, got {order}")
        if isinstance(r, (float, int)):
            # fast path: the r0 search calls this tens of thousands of times
            if not r > 0.0:
                raise DomainError(f"potential evaluated at r={r!r}; need r > 0")
            return math.fsum(c * r**p for c, p in self._scaled_terms(order))
        scalar = np.ndim(r) == 0
        ra = np.asarray(r, dtype=float)
        if np.any(ra <= 0.0):
            raise DomainError(f"potential evaluated at r={r!r}; need r > 0")
        if scalar:
            rf = float(ra)
            return math.fsum(
                t.coefficient * _falling(t.exponent, order) * rf ** (t.exponent - order)
                for t in self.terms)
        out = np.zeros_like(ra)
        for t in self.terms:
            out += t.coefficient * _falling(t.exponent, order) * ra ** (t.exponent - order)
        return out

    def __str__(self):
        return format_potential(self)


def derivative(potential: RadialPotential, order: int, r):
    return potential.derivative(order, r)


@dataclass(frozen=True)
class PotentialPair:
    """Mass together with the Lorentz-vector ``V`` and Lorentz-scalar ``S`` potentials."""

    mass: float
    vector: RadialPotential = field(default_factory=RadialPotential)
    scalar: RadialPotential = field(default_factory=RadialPotential)

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")
        for name, pot in (("vector", self.vector), ("scalar", self.scalar)):
            for t in pot.terms:
                if t.exponent < 0 and t.exponent != -1.0:
                    raise UnsupportedPotential(
                        f"{name} potential term r^{t.exponent:g} is more singular than allowed; "
                        "only the Coulomb-like r^-1 term may have a negative exponent")


@dataclass(frozen=True)
class EffectiveProblem:
    pair: PotentialPair
    A1: float
    A2: float
    Ac: float
    gamma: RadialPotential

    @property
    def mass(self):
        return self.pair.mass

    @property
    def vector(self):
        return self.pair.vector

    @property
    def scalar(self):
        return self.pair.scalar

    def l_prime(self, l: int) -> float:
        return effective_l(l, self.Ac)

    def u_potential(self, energy: float, l: int) -> RadialPotential:
        """Power-law form of the coefficient multiplying R in the radial equation."""
        lp = self.l_prime(l)
        return (self.gamma + self.vector.scale(2.0 * energy)
                + RadialPotential.from_pairs([(-energy * energy, 0.0), (lp * (lp + 1.0), -2.0)]))


def make_effective(pair: PotentialPair) -> EffectiveProblem:
    """Coulomb-subtracted form of the radial KG equation.

    ``gamma = -(V^2 - A1^2/r^2) + (S^2 - A2^2/r^2) + 2 m S + m^2`` is assembled
    term by term, so the ``r^-2`` pieces cancel structurally.
    """
    m = pair.mass
    V, S = pair.vector, pair.scalar
    A1 = -V.coefficient(-1.0)
    A2 = -S.coefficient(-1.0)
    coul1 = RadialPotential.from_pairs([(A1 * A1, -2.0)])
    coul2 = RadialPotential.from_pairs([(A2 * A2, -2.0)])
    vr = V * V - coul1
    sr = S * S - coul2
    gamma = -vr + sr + S.scale(2.0 * m) + RadialPotential.constant(m * m)
    return EffectiveProblem(pair=pair, A1=A1, A2=A2, Ac=A1 * A1 - A2 * A2, gamma=gamma)


def effective_l(l: int, Ac: float) -> float:
    """Effective centrifugal number ``l'`` with ``l'(l'+1) = l(l+1) - Ac``."""
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    disc = (l + 0.5) ** 2 - Ac
    if disc < 0.0:
        raise SupercriticalCoupling(
            f"(l+1/2)^2 - Ac = {disc:.6g} < 0 for l={l}, Ac={Ac:.6g}", stage="effective_l")
    return -0.5 + math.sqrt(disc)


# -- mini-syntax --------------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"^(?P<sign>[+-]?)(?P<coef>{_NUM})?\*?"
    rf"(?:(?P<div>/)?r(?:\^\(?(?P<exp>[+-]?{_NUM})\)?)?)?$"
)


def _split_terms(text):
    parts, start, depth = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and i > start and depth == 0 and text[i - 1] not in "eE^":
            parts.append(text[start:i])
            start = i
    parts.append(text[start:])
    return parts


def parse_potential(text: str) -> RadialPotential:
    """Parse expressions such as ``"-0.2/r + 0.05r"`` or ``"1.5r^2 - 3"``.

    Accepted terms: ``c``, ``c r``, ``c*r``, ``c r^p``, ``c/r``, ``c/r^p``, with
    an optional sign and an implicit coefficient of 1.  Empty input or ``"0"``
    gives the zero potential.
    """
    src = text.replace("−", "-").replace(" ", "").replace("\t", "")
    if src in ("", "0"):
        return RadialPotential()
    pairs = []
    for raw in _split_terms(src):
        m = _TERM.match(raw)
        if not m or raw in ("+", "-"):
            raise ValueError(f"cannot parse potential term {raw!r} in {text!r}")
        sign = -1.0 if m["sign"] == "-" else 1.0
        coef = float(m["coef"]) if m["coef"] else 1.0
        has_r = "r" in raw
        if not has_r:
            if not m["coef"]:
                raise ValueError(f"cannot parse potential term {raw!r} in {text!r}")
            exponent = 0.0
        else:
            exponent = float(m["exp"]) if m["exp"] else 1.0
            if m["div"]:
                exponent = -exponent
        pairs.append((sign * coef, exponent))
    return RadialPotential.from_pairs(pairs)


def _fmt_num(x):
    return repr(float(x))


def format_potential(pot: RadialPotential) -> str:
    """Inverse of :func:`parse_potential` (round-trips every coefficient exactly)."""
    if pot.is_zero():
        return "0"
    out = []
    for t in pot.terms:
        c, p = t.coefficient, t.exponent
        sign = "-" if c < 0 else "+"
        mag = _fmt_num(abs(c))
        if p == 0:
            body = mag
        elif p == 1:
            body = f"{mag}r"
        elif p == -1:
            body = f"{mag}/r"
        elif p < 0:
            body = f"{mag}/r^{_fmt_num(-p)}"
        else:
            body = f"{mag}r^{_fmt_num(p)}"
        out.append((sign, body))
    first_sign, first = out[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s
