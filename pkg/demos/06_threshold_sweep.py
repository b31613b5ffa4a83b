"""Threshold sweep: logical error vs 1/T2 per encoding, with slope fits.

Writes demos/out/threshold.csv (renderable with
`plot-ftqec --kind threshold`).
"""
from pathlib import Path

import numpy as np

from qudit_ftqec import default_config
from qudit_ftqec.protocol import PAPER_GATE_SET
from qudit_ftqec.sweep import SweepPlan, crossover_t2, export, fit_slope, run_sweep

plan = SweepPlan(
    d_list=(4, 6),
    t2_grid=tuple(np.logspace(-3, -6, 6)),
    gate_set=PAPER_GATE_SET,
    include_baseline=True,
)
rows = run_sweep(plan, default_config())
out = Path(__file__).parent / "out" / "threshold.csv"
out.parent.mkdir(exist_ok=True)
export(rows, out)
print(f"wrote {len(rows)} rows to {out}")

for d, circuit in ((2, "baseline"), (4, "single_gate_cycle"), (6, "single_gate_cycle")):
    fit = fit_slope(rows, "inv_t2", d=d, circuit=circuit)
    label = "uncorrected" if d == 2 else f"d = {d}"
    print(f"{label:>12}: log-log slope {fit.slope:5.2f}  (r^2 {fit.r_squared:.4f})")

t2c = crossover_t2(rows, 4, "single_gate_cycle", "baseline")
print(f"\nd = 4 beats the uncorrected qubit for T2 > {t2c * 1e6:.1f} us")
