"""
How well conditioned are small column subsets?
==============================================

Restricted-isometry arguments need every 2k-column submatrix to be close to
an isometry.  That cannot be certified, but sampling shows what typical
subsets look like.
"""
from l1recovery import diagnostics
from l1recovery.ensembles import SpectrumKind, SpectrumSpec

bound = diagnostics.rip_bound_constant()
print(f"condition numbers allowed by the isometry threshold: up to {bound:.4f}")

# two orthonormal bases side by side, 12 columns at a time
K = diagnostics.identity_hadamard_matrix(128)
rep = diagnostics.sample_condition_numbers(K, 12, 10_000, seed=1)
print(f"[I | H] 128 x 256, 12 columns: mean {rep.mean_kappa:.4f}, max {rep.max_kappa:.4f}")

# 200 x 800 draws, 20 columns at a time
for spec in (SpectrumSpec(), SpectrumSpec(SpectrumKind.TYPE2, 1e4), SpectrumSpec(SpectrumKind.TYPE3, 1e4)):
    rep = diagnostics.ensemble_condition_numbers(800, 200, spec, 20, 10_000, seed=1)
    flag = "within" if rep.max_kappa <= bound else "beyond"
    print(f"{spec.label():>20}: mean {rep.mean_kappa:.3f}, max {rep.max_kappa:.3f} ({flag} the bound)")
