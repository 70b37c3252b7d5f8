"""
How gamma and lambda drive the iteration count
==============================================
"""
import numpy as np

from infeasible_di import CASE_STUDY, DRConfig, ProblemInstance, sweep

p = ProblemInstance(CASE_STUDY, 1.5)
gammas = np.round(np.linspace(0.1, 0.9, 5), 2)
lambdas = np.round(np.linspace(0.1, 0.9, 5), 2)
rows = sweep(p, gammas, lambdas, DRConfig(n=1000, max_iter=20_000), jobs=4)

table = np.array([r.iterations for r in rows]).reshape(len(gammas), len(lambdas))
print("rows gamma, columns lambda")
print("       " + " ".join(f"{lam:7.2f}" for lam in lambdas))
for g, line in zip(gammas, table):
    print(f"{g:5.2f}  " + " ".join(f"{v:7d}" for v in line))

# fixed lambda, gamma approaching 1
rows = sweep(ProblemInstance(CASE_STUDY, 1.0), [0.3, 0.6, 0.9], [0.5])
print([(r.gamma, r.iterations) for r in rows])
