"""
Best approximation controls from a 2x2 nonlinear system
=======================================================

For a < a_c the box-constrained control closest to the reachable set is
bang-bang with one switch.  The switching time ts and the slope c1 of the
gap line c1 t + c2 solve two polynomial equations; Newton's method does
the rest.
"""
import numpy as np

from infeasible_di import CASE_STUDY, ControlGrid, ProblemInstance, asymptotic_ts, best_approx, simulate

print(f"{'a':>5} {'c1':>20} {'c2':>20} {'ts':>18}  its")
for a in (2.0, 1.5, 1.0, 0.5, 0.1):
    control, gap, trace = best_approx(ProblemInstance(CASE_STUDY, a))
    print(f"{a:5.1f} {gap.c1:20.15f} {gap.c2:20.15f} {control.ts:18.15f}  {trace.iterations}")

ts, c1, c2 = asymptotic_ts(CASE_STUDY)
print(f"  ->0 {c1:20.15f} {c2:20.15f} {ts:18.15f}")

# u_B + gap is the closest point of the reachable set; it must hit the target
control, gap, _ = best_approx(ProblemInstance(CASE_STUDY, 1.0))
g = ControlGrid.from_function(lambda t: control(t) + gap(t), 100_001)
print("terminal state of u_B + gap:", np.round(simulate(g, CASE_STUDY), 8))
