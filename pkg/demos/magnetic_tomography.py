"""
Currents on a spherical patch, seen from a thousand sensors
===========================================================

A stream function with 60 random nonzero wavelet coefficients drives a
divergence-free current in a thin shell.  The normal magnetic field is
sampled 1 cm above it, 10% noise is added, and the stream function is
recovered with an l1 penalty (FISTA) and with an l2 penalty (CG), both tuned
so that the residual matches the noise.  Renders go next to the script's
output directory.  Expect a few minutes.
"""
import sys
from pathlib import Path

import numpy as np

from l1recovery import io
from l1recovery.magtomo import experiment, render
from l1recovery.magtomo.geometry import stream_to_current
from l1recovery.magtomo.wavelets import coefficient_levels

out = Path(sys.argv[1] if len(sys.argv) > 1 else "tomography_output")
setup = experiment.tomo_setup()
A = setup.matrix
s = np.linalg.svd(A, compute_uv=False)
norms = np.linalg.norm(A, axis=0)
print(f"design matrix {A.shape}, singular values span {s[0] / s[-1]:.2e}")
print(f"column norms span {norms.max() / norms[norms > 0].min():.2e}")

# which scales can the sensors see?  mean column norm per wavelet level
levels = coefficient_levels(setup.grid.resolution).ravel()
for lev in np.unique(levels):
    print(f"  level {lev}: {np.sum(levels == lev):5d} columns, mean norm {norms[levels == lev].mean():.3e}")

report = experiment.run_tomo_experiment(0, setup)
print(f"l1 error {report.l1_error:.3f}   l2 error {report.l2_error:.3f}   "
      f"(on the grid: {report.l1_field_error:.3f} / {report.l2_field_error:.3f})")

for name, F in report.fields.items():
    io.atomic_write(out / f"{name}.svg", render.field_svg(F, stream_to_current(F, setup.grid), title=name))
print("renders in", out.resolve())
