"""Error-transparent pulse schedules for gate, stabilization and recovery.

Each operation is one Hermitian generator; its off-diagonal elements map
one-to-one onto simultaneous resonant pulses.
"""
import numpy as np

from qudit_ftqec import build_system, default_config
from qudit_ftqec.constants import angular_to_ghz
from qudit_ftqec.et_compiler import planar_generator, schedule_pulses

cfg = default_config()
system = build_system(cfg, 4)


def show(name, schedule):
    print(f"\n{name}: {schedule.n_pulses} pulses, duration "
          f"{schedule.duration * 1e9:.1f} ns")
    for p in schedule.pulses:
        print(f"   levels {p.level_pair}  area {p.area / np.pi:5.3f} pi  "
              f"phase {p.phase / np.pi:+5.2f} pi  "
              f"freq {angular_to_ghz(p.frequency):7.3f} GHz")


gen = planar_generator(np.pi / 2, np.pi, system.error_basis)
show("logical R(pi/2, pi)", schedule_pulses(gen, system.energies, system.rabi_max))
show("recovery k=1",
     schedule_pulses(system.recovery_gens[1], system.energies, system.rabi_max))
span = float(system.energies[-1] - system.energies[0])
anc = 1.5 * span * np.arange(system.n_errors)
joint = (system.energies[:, None] + anc[None, :]).reshape(-1)
show("CU stabilization (qudit x ancilla)",
     schedule_pulses(system.cu_gen, joint, system.rabi_max))
