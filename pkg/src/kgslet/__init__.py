"""Bound states of the radial Klein-Gordon equation with Coulomb-like potentials.

The package solves the radial KG equation with Lorentz-vector ``V(r)`` and
Lorentz-scalar ``S(r)`` potentials by a shifted-l expansion, and ships exact
Coulomb energies plus a Numerov shooting solver for cross-checks.
"""
from .errors import *  # noqa: F401,F403
from .potential import (
    EffectiveProblem,
    PotentialPair,
    PowerTerm,
    RadialPotential,
    derivative,
    effective_l,
    format_potential,
    make_effective,
    parse_potential,
)
from .slet import (
    Branch,
    ExpansionPoint,
    QuantumNumbers,
    SletSolution,
    anharmonic_corrections,
    b_c,
    energy_corrections,
    leading_energy,
    omega,
    q_of_r,
    shift_beta,
    solve_r0,
    solve_state,
)

from .closed_forms import (
    ClosedFormKind,
    ClosedFormResult,
    closed_form_for,
    dirac_equal_mix,
    equal_mix,
    general_coulomb,
    quadratic_residual,
    scalar_coulomb,
    vector_coulomb,
)
from .shooting import OracleResult, RadialGrid, effective_term, find_bound_state
from .tables import GoldenRow, golden_rows, make_pair

__version__ = "0.1.0"
