"""
Exact Coulomb spectra from the expansion
========================================

For a pure 1/r vector or scalar potential the shifted-l expansion collapses to
its leading term, so E0 alone reproduces the closed form.  This script checks
that claim across couplings and states.
"""

import itertools

from kgslet import (PotentialPair, RadialPotential, equal_mix, scalar_coulomb,
                    solve_state, vector_coulomb)


def coulomb(A):
    return RadialPotential.from_pairs([(-A, -1.0)])


# three mixtures with known spectra
families = {
    "vector": (lambda A: PotentialPair(1.0, vector=coulomb(A)), vector_coulomb),
    "scalar": (lambda A: PotentialPair(1.0, scalar=coulomb(A)), scalar_coulomb),
    "equal":  (lambda A: PotentialPair(1.0, vector=coulomb(A), scalar=coulomb(A)), equal_mix),
}

print(f"{'family':>7} {'A':>5} {'n_r':>3} {'l':>2} {'expansion':>20} {'exact':>20} {'rel. dev':>10}")
worst = 0.0
for (name, (build, exact)), A, n_r, l in itertools.product(families.items(), (0.1, 0.3, 0.45), (0, 2), (0, 1)):
    sol = solve_state(build(A), (n_r, l))
    ref = exact(1.0, A, n_r, l).energy
    dev = abs(sol.energy - ref) / ref
    worst = max(worst, dev)
    print(f"{name:>7} {A:5.2f} {n_r:3d} {l:2d} {sol.energy:20.15f} {ref:20.15f} {dev:10.1e}")

# corrections vanish identically: E2 and E3 are at round-off level
sol = solve_state(families["equal"][0](0.3), (1, 1))
print(f"\nlargest relative deviation {worst:.1e}")
print(f"equal mix A=0.3, n_r=1, l=1: E2={sol.E2:.1e} E3={sol.E3:.1e}")
