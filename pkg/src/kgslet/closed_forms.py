"""Exact bound-state energies for pure Coulomb-like vector/scalar mixtures."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import SupercriticalCoupling
from .potential import effective_l
from .slet import Branch


class ClosedFormKind(enum.Enum):
    VECTOR_COULOMB = "VectorCoulomb"
    SCALAR_COULOMB = "ScalarCoulomb"
    EQUAL_MIX = "EqualMix"
    DIRAC_EQUAL_MIX = "DiracEqualMix"
    GENERAL_COULOMB = "GeneralCoulomb"


@dataclass(frozen=True)
class ClosedFormResult:
    energy: float
    n_tilde: float
    kind: ClosedFormKind
    branch: Branch
    n_r: int
    l: float

    def to_dict(self):
        return {"energy": self.energy, "n_tilde": self.n_tilde, "kind": self.kind.value,
                "branch": self.branch.label, "n_r": self.n_r, "l": self.l}


def _check_n(n_r):
    if n_r < 0 or int(n_r) != n_r:
        raise ValueError(f"n_r must be a non-negative integer, got {n_r!r}")


def vector_coulomb(m: float, A1: float, n_r: int, l: int) -> ClosedFormResult:
    """``E = m / sqrt(1 + A1^2/n~^2)`` with ``n~ = n_r + 1/2 + sqrt((l+1/2)^2 - A1^2)``."""
    _check_n(n_r)
    disc = (l + 0.5) ** 2 - A1 * A1
    if disc < 0.0:
        raise SupercriticalCoupling(f"A1={A1!r} is supercritical for l={l}", stage="vector_coulomb")
    nt = n_r + 0.5 + math.sqrt(disc)
    energy = m / math.sqrt(1.0 + A1 * A1 / (nt * nt))
    return ClosedFormResult(energy, nt, ClosedFormKind.VECTOR_COULOMB, Branch.PARTICLE, n_r, l)


def scalar_coulomb(m: float, A2: float, n_r: int, l: int, branch=Branch.PARTICLE) -> ClosedFormResult:
    _check_n(n_r)
    branch = Branch.parse(branch)
    nt = n_r + 0.5 + math.sqrt((l + 0.5) ** 2 + A2 * A2)
    energy = int(branch) * m * math.sqrt(1.0 - A2 * A2 / (nt * nt))
    return ClosedFormResult(energy, nt, ClosedFormKind.SCALAR_COULOMB, branch, n_r, l)


def equal_mix(m: float, A: float, n_r: int, l: int) -> ClosedFormResult:
    """``V = S = -A/r``: ``E = m[1 - 2A^2/(n^2 + A^2)]`` with ``n = n_r + l + 1``."""
    _check_n(n_r)
    n = n_r + l + 1
    energy = m * (1.0 - 2.0 * A * A / (n * n + A * A))
    return ClosedFormResult(energy, float(n), ClosedFormKind.EQUAL_MIX, Branch.PARTICLE, n_r, l)


def dirac_equal_mix(m: float, A: float, n_r: int, j: float) -> ClosedFormResult:
    """Dirac particle in ``V = S = -A/r``; same spectrum as the KG case with ``l = j + 1/2``."""
    _check_n(n_r)
    if j < 0.5 or (2 * j) % 2 != 1:
        raise ValueError(f"j must be a positive half-integer, got {j!r}")
    kappa = j + 0.5
    n = n_r + kappa + 1.0
    energy = m * (1.0 - 2.0 * A * A / (n * n + A * A))
    return ClosedFormResult(energy, n, ClosedFormKind.DIRAC_EQUAL_MIX, Branch.PARTICLE, n_r, kappa)


def general_coulomb(m: float, A1: float, A2: float, n_r: int, l: int,
                    branch=Branch.PARTICLE) -> ClosedFormResult:
    """Both roots of ``E^2 - m^2 = -(2 m A2 + 2 E A1)^2 / (2 n~)^2``, ``n~ = n_r + l' + 1``.

    The particle branch is the ``+`` root, which tends to ``+m`` as the couplings
    vanish.
    """
    _check_n(n_r)
    branch = Branch.parse(branch)
    try:
        lp = effective_l(l, A1 * A1 - A2 * A2)
    except SupercriticalCoupling as exc:
        raise exc.at("general_coulomb")
    nt = n_r + lp + 1.0
    n2 = nt * nt
    root = math.sqrt(A1 * A1 * A2 * A2 + (n2 + A1 * A1) * (n2 - A2 * A2))
    energy = m * (-A1 * A2 + int(branch) * root) / (n2 + A1 * A1)
    return ClosedFormResult(energy, nt, ClosedFormKind.GENERAL_COULOMB, branch, n_r, l)


def quadratic_residual(result: ClosedFormResult, m: float, A1: float, A2: float) -> float:
    """Relative defect of ``E^2 - m^2 + (2 m A2 + 2 E A1)^2 / (2 n~)^2 = 0``."""
    E, nt = result.energy, result.n_tilde
    lhs = E * E - m * m
    rhs = -((2.0 * m * A2 + 2.0 * E * A1) ** 2) / (2.0 * nt) ** 2
    return abs(lhs - rhs) / max(m * m, abs(E * E), abs(rhs))


def closed_form_for(effective, n_r: int, l: int, branch=Branch.PARTICLE):
    """Exact energy when the problem is a pure Coulomb mixture, else None."""
    pair = effective.pair
    for pot in (pair.vector, pair.scalar):
        if any(t.exponent != -1.0 for t in pot.terms):
            return None
    return general_coulomb(pair.mass, effective.A1, effective.A2, n_r, l, branch)
