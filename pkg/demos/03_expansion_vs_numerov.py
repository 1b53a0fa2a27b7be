"""
How far is the expansion from the exact eigenvalue?
===================================================

With the linear term in the scalar part the problem is confining, so an
independent Numerov shooting solution exists.  We follow the truncation error
of each partial sum as the string tension k grows.
"""

from kgslet import find_bound_state, make_effective, solve_state
from kgslet.tables import make_pair

A1 = 0.3
print(f"{'k':>6} {'Numerov':>14} {'E0':>10} {'E0+E2':>10} {'E full':>10}   (errors)")
for k in (0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0):
    pair = make_pair("scalar-linear", A1, k)
    exact = find_bound_state(make_effective(pair), (0, 0)).energy
    errs = [s - exact for s in solve_state(pair).partial_sums]
    print(f"{k:6.3f} {exact:14.10f} " + " ".join(f"{e:10.1e}" for e in errs))

# Excited states converge more slowly: the expansion parameter is 1/(l' - beta),
# and beta grows with n_r.
pair = make_pair("scalar-linear", A1, 0.1)
print(f"\nk=0.1, l=0 by radial number")
for n_r in range(4):
    exact = find_bound_state(make_effective(pair), (n_r, 0)).energy
    print(f"n_r={n_r}: Numerov {exact:.10f}  expansion {solve_state(pair, (n_r, 0)).energy:.10f}")

# With the linear term in the vector part the effective term U falls like -k^2 r^2
# at large r, so there is no normalizable state for the shooter to find.
try:
    find_bound_state(make_effective(make_pair("vector-linear", A1, 0.05)), (0, 0))
except Exception as exc:
    print(f"\nvector-linear: {type(exc).__name__}: {exc}")
