"""
Following the l1 path down to the noise level
==============================================

A small underdetermined system with a sparse answer, solved three ways:
the exact homotopy path, FISTA at the same lambda, and Tikhonov for contrast.
"""
import numpy as np

from l1recovery import ensembles, problem_gen
from l1recovery.solvers import fista, lasso_path, ridge_discrepancy

# 60 measurements of a 150-long vector with 6 nonzeros, 10% noise
spec = ensembles.SpectrumSpec()
K = ensembles.subsample_rows(ensembles.gen_parent(150, spec, seed=1), 60, seed=2)
x0 = problem_gen.gen_signal(150, 6, seed=3)
inst = problem_gen.synthesize(K, x0, epsilon=0.1, seed=4)
print("noise norm", inst.noise_norm, "data norm", np.linalg.norm(inst.data))

# walk the path until the residual equals the noise norm
path, sol = lasso_path(K.entries, inst.data, target_residual=inst.noise_norm)
print(f"{len(path.breakpoints)} breakpoints, stopped at lambda={sol.lam:.4g}, status {sol.status.value}")
for bp in path.breakpoints[:8]:
    print(f"  lambda {bp.lam:9.4g}  residual {bp.residual_norm:8.4g}  active {list(bp.active_set)}")

print("true support    ", sorted(x0.support.tolist()))
print("recovered       ", np.flatnonzero(sol.x).tolist())
print("relative error  ", problem_gen.relative_error(sol.x, x0))

# FISTA at the same lambda lands on the same minimizer
it = fista(K.entries, inst.data, sol.lam, tol=1e-12, restart=True)
print("FISTA iterations", it.work, "max difference", np.abs(it.x - sol.x).max())

# Tikhonov with the same residual spreads energy over every coefficient
l2 = ridge_discrepancy(K.entries, inst.data, inst.noise_norm)
print("ridge relative error", problem_gen.relative_error(l2.x, x0),
      "nonzeros", np.count_nonzero(np.abs(l2.x) > 1e-8))
