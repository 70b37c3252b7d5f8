"""
Where does Newton converge from?
================================

Count iterations from every start on a grid of (ts, c1) initial guesses and
write the counts as CSV and as a greyscale PGM (white = immediate,
dark = slow, black = no convergence within the cap).
"""
import os
import sys

from infeasible_di import CASE_STUDY, PortraitSpec, ProblemInstance, portrait
from infeasible_di.portrait import write_portrait_csv, write_portrait_pgm

out = sys.argv[1] if len(sys.argv) > 1 else "portraits"
os.makedirs(out, exist_ok=True)
p = ProblemInstance(CASE_STUDY, 1.5)

for method, cap in (("plain", 40), ("generalized", 40), ("generalized", 200)):
    spec = PortraitSpec(r=-1.5, resolution=(120, 120), method=method, cap=cap)
    g = portrait(p, spec, jobs=4)
    stem = os.path.join(out, f"{method}_cap{cap}")
    write_portrait_csv(g, stem + ".csv")
    write_portrait_pgm(g, stem + ".pgm")
    print(f"{method:>11} cap {cap:3d}: {g.converged_cells:5d} / {g.counts.size} starts converge")

# Cubing F1 flattens it near the root, so each generalized step removes only
# a third of the remaining F1 residual; a tight tolerance needs many steps.
