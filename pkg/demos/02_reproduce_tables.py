"""
Coulomb plus linear confinement: the four tables
================================================

Each row is the 1s energy of ``-A1/r`` with a linear term either in the
vector part or in the scalar part, at unit mass.  Columns are the partial sums
E0, E0+E2 and E0+E2+E3, compared with the printed figures.
"""

from kgslet import solve_state
from kgslet.tables import golden_rows, table_ids

for t in table_ids():
    rows = golden_rows(t)
    print(f"\ntable {t}: {rows[0].family}")
    print(f"{'A1':>5} {'k':>5} {'E0':>14} {'E0+E2':>14} {'E full':>14} {'printed':>14} {'units off':>9}")
    for row in rows:
        sums = solve_state(row.pair()).partial_sums
        off = abs(sums[2] - row.values[2]) / row.units[2]
        print(f"{row.A1:5.2f} {row.k:5.2f} " + " ".join(f"{s:14.10f}" for s in sums)
              + f" {row.printed[2]:>14} {off:9.2f}")

# the same run is available on the command line as `kgslet table 3 --format table`
