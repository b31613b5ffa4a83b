"""Dephasing rates and the resulting Kraus hierarchy.

Pure dephasing damps each off-diagonal element at a rate set by how
differently the two eigenstates magnetize the cluster sites. At a fixed
snapshot time the channel decomposes into diagonal Kraus operators whose
norms fall steeply: only the d/2 leading ones need correcting.
"""
import numpy as np

from qudit_ftqec import build_system, default_config

cfg = default_config()
for d in (4, 6, 8, 10, 12):
    system = build_system(cfg, d)
    rates = system.rates_ref.gamma
    norms = system.kraus.norms
    print(f"d = {d:2d}: max rate {rates.max() * system.t2_ref:5.1f} / T2,   "
          "Kraus norms: " + "  ".join(f"{n:.2e}" for n in norms[: min(8, len(norms))]))

system4 = build_system(cfg, 4)
print("\nd = 4 snapshot at t =", f"{system4.kraus.t_snapshot * 1e9:.0f} ns:")
print("E_1/E_0 =", f"{system4.kraus.norms[1] / system4.kraus.norms[0]:.3f}",
      "  E_2/E_1 =", f"{system4.kraus.norms[2] / system4.kraus.norms[1]:.3f}",
      " (the two leading operators dominate by an order of magnitude)")
