"""Physical constants and unit conversions.

Internal convention: Hamiltonians are expressed in angular-frequency units
(rad/s, hbar = 1), times in seconds, dephasing rates in 1/s.  Configuration
files quote exchange couplings in GHz (ordinary frequency) and magnetic
fields in tesla; the loaders convert once on input.
"""

import numpy as np

# Bohr magneton over Planck constant, GHz per tesla.
MU_B_GHZ_PER_T = 13.996244936

# One GHz of ordinary frequency, as angular frequency.
GHZ = 2.0 * np.pi * 1e9

# Bohr magneton in angular-frequency units (rad/s per tesla).
MU_B = MU_B_GHZ_PER_T * GHZ


def ghz_to_angular(value_ghz):
    """Convert ordinary frequency in GHz to angular frequency in rad/s."""
    return np.asarray(value_ghz, dtype=float) * GHZ


def angular_to_ghz(value_rad_per_s):
    """Convert angular frequency in rad/s to ordinary frequency in GHz."""
    return np.asarray(value_rad_per_s, dtype=float) / GHZ
