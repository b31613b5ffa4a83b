"""Spectrum of the default seven-spin cluster: doublet structure and gaps.

The qudit lives in the 16 lowest eigenstates: eight total-spin-1/2 doublets
(time-reversal partner pairs split only by the Zeeman term), well below the
first S = 3/2 multiplet.
"""
import numpy as np

from qudit_ftqec import default_config
from qudit_ftqec.constants import angular_to_ghz
from qudit_ftqec.spin_model import (
    build_hamiltonian, diagonalize, select_qudit_basis, sz_diagonal_elements,
)

cfg = default_config()
eig = diagonalize(build_hamiltonian(cfg.topology))
e = angular_to_ghz(eig.energies - eig.energies[0])
basis = select_qudit_basis(eig, 16, topology=cfg.topology, gap_check=False)
z = sz_diagonal_elements(eig, basis, cfg.topology)
m = z.sum(axis=1)

print("lowest 16 eigenstates (energies relative to the ground state):")
print(f"{'level':>5} {'E (GHz)':>10} {'S':>6} {'m':>7} {'<s_7^z>':>9}")
for i in range(16):
    print(f"{i:5d} {e[i]:10.3f} {basis.spin_labels[i]:6.3f} {m[i]:7.3f} {z[i, 6]:9.3f}")

zeeman = e[1] - e[0]
print(f"\nintra-doublet (Zeeman) splitting : {zeeman:7.3f} GHz")
print(f"gap to the next multiplet        : {e[16] - e[15]:7.3f} GHz "
      f"({(e[16] - e[15]) / zeeman:.1f}x the splitting)")
print(f"next multiplet total spin        : S = {0.5 * (np.sqrt(1 + 4 * 3.75) - 1):.1f} "
      "(first quartet states sit above the 16-state window)")
