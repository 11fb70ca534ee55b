"""Physical constants in SI units.

CODATA 2018 values.  The Planck constant is exact by SI definition and
``hbar`` is derived from it, so ``planck_h == 2*pi*hbar`` holds to machine
precision rather than to the rounding of two independently quoted numbers.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (SI)."""

    planck_h: float = 6.62607015e-34          # J*s, exact
    hbar: float = 6.62607015e-34 / (2.0 * math.pi)  # J*s
    bohr_magneton: float = 9.2740100783e-24   # J/T
    atomic_mass_unit: float = 1.66053906660e-27  # kg
    electron_mass: float = 9.1093837015e-31   # kg

    def __post_init__(self):
        for name in ("planck_h", "hbar", "bohr_magneton",
                     "atomic_mass_unit", "electron_mass"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name} must be positive")
        if abs(self.planck_h - 2.0 * math.pi * self.hbar) > 1e-12 * self.planck_h:
            raise ValueError("planck_h and hbar are inconsistent")


CONST = PhysicalConstants()

HBAR = CONST.hbar
PLANCK_H = CONST.planck_h
BOHR_MAGNETON = CONST.bohr_magneton
ATOMIC_MASS_UNIT = CONST.atomic_mass_unit
ELECTRON_MASS = CONST.electron_mass

# mass-energy conversion for catalog entries quoted in MeV/c^2 (CODATA 2018)
KG_PER_MEV_C2 = 1.78266192e-30

EV = 1.602176634e-19  # J, exact
