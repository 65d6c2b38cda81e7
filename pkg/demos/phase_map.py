"""
Mean reconstruction error over the (delta, rho) plane
=====================================================

A reduced sweep (10 x 10 grid, n = 200, 20 trials per cell) for a Gaussian
ensemble and for one with geometrically decaying singular values.  Writes a
heatmap per ensemble with the e = 2 eps contour drawn on top.  Takes a few
minutes on one core; pass a directory to change where files go.
"""
import sys
from pathlib import Path

import numpy as np

from l1recovery import io, phase_lab
from l1recovery.ensembles import SpectrumKind, SpectrumSpec

out = Path(sys.argv[1] if len(sys.argv) > 1 else "phase_map_output")
eps = 0.1

for spec_e in (SpectrumSpec(), SpectrumSpec(SpectrumKind.TYPE2, 1e4)):
    spec = phase_lab.preset("mini", epsilon=eps, ensemble=spec_e, base_seed=7)
    grid = phase_lab.run_sweep(spec)
    errors = phase_lab.mean_error_grid(grid)
    curves = phase_lab.extract_level_curve(grid, 2 * eps)
    name = spec_e.label().replace("(", "_").replace(")", "").replace("=", "")
    io.write_csv(out / f"{name}.csv", phase_lab.SWEEP_COLUMNS, phase_lab.sweep_rows(grid), spec.config())
    io.atomic_write(out / f"{name}.svg",
                    phase_lab.heatmap_svg(grid, curves, vmin=0, vmax=1, title=f"{spec_e.label()}, eps={eps}"))
    print(spec_e.label())
    print("  rho:   " + " ".join(f"{r:5.2f}" for r in spec.rho_values))
    for d, row in zip(spec.delta_values, errors):
        print(f"  d={d:.1f} " + " ".join(f"{v:5.2f}" for v in row))

# the decaying spectrum pays for its conditioning almost everywhere
print("files in", out.resolve())
