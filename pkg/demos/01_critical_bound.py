"""
When does the double integrator stop being controllable?
========================================================

Start at position 0 with speed 1, come to rest back at 0 at time 1, and
only use forces with |u| <= a.  Below a critical bound a_c no admissible
control exists.
"""
import math

from infeasible_di import CASE_STUDY, BoundaryData, ProblemInstance, classify, critical_bound

res = critical_bound(CASE_STUDY)
print(f"a_c = {res.a_c:.15f}   (1 + sqrt 2 = {1 + math.sqrt(2):.15f})")
print(f"t_c = {res.t_c:.15f}   (1 / sqrt 2 = {1 / math.sqrt(2):.15f})")

# classification on either side of the bound
for a in (1.0, 2.0, res.a_c, 3.0):
    print(f"a = {a:.6f}: {classify(ProblemInstance(CASE_STUDY, a)).kind.value}")

# the other boundary shapes have closed forms of their own
for b in (BoundaryData(0, 1, 0, 0), BoundaryData(0, 1, 0, 2), BoundaryData(0, 1, 1, 1)):
    r = critical_bound(b)
    print(b, "->", r.case_tag, r.a_c)
