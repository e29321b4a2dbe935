"""Physical constants in the internal unit system (eV, nm, K).

Frequencies are carried as photon energies ``zeta = hbar * xi`` in eV, so
``hbar`` and ``c`` only ever appear through ``HBAR_C``.
"""

HBAR_C = 197.3269804          # eV nm
K_B = 8.617333262e-5          # eV / K
ALPHA = 7.2973525693e-3       # fine-structure constant
VF_RATIO = 1.0 / 300.0        # v_F / c
EPS0 = 8.8541878128e-12       # F / m
E_CHARGE = 1.602176634e-19    # J / eV

# eV/nm^2 -> uN/m  and  eV/nm^3 -> Pa
EV_NM2_TO_UN_PER_M = E_CHARGE / 1e-18 * 1e6
EV_NM3_TO_PA = E_CHARGE / 1e-27

# Drude permittivity at zero frequency is capped at this finite value.
DRUDE_STATIC_CAP = 1e12


def matsubara_energy(l, temperature):
    """Photon energy (eV) of the l-th Matsubara frequency."""
    return 2.0 * 3.141592653589793 * K_B * temperature * l
