"""Quantum ratio basics: who behaves quantum mechanically, and for how long.

The quantum ratio Q = R_q / L_0 compares the spatial extension of a body's
center-of-mass wave function with the body's own size.  Elementary
particles (L_0 = 0) score Q = infinity; interferometry beams of atoms and
molecules reach Q ~ 10^6-10^7; a dust grain on your desk sits far below 1.

The second half of the demo shows why macroscopic bodies stay put: the
free-packet doubling time grows linearly with mass, from 10 ns for an
electron to longer than the age of the universe for one gram.
"""

from qratio import (catalog_lookup, doubling_time, experiment_names,
                    quantum_ratio)

print("Quantum ratios of beam experiments in the bundled catalog")
print(f"{'experiment':>10s} {'R_q':>10s} {'L_0':>10s} {'Q':>12s}  class")
for name in experiment_names():
    rec = catalog_lookup(name)
    res = quantum_ratio(rec.quantum_range_Rq, rec.size_L0)
    print(f"{name:>10s} {rec.quantum_range_Rq:10.2e} {rec.size_L0:10.2e} "
          f"{res.ratio:12.3e}  {res.classification.value}")

print("\nA pointlike particle (L_0 = 0):")
res = quantum_ratio(1e-3, 0.0)
print(f"  Q = {res.ratio}, classification = {res.classification.value}")

print("\nDoubling time of a 1 um free Gaussian packet")
cases = [
    ("electron", 9e-31),
    ("hydrogen atom", 1.6e-27),
    ("C70 fullerene", 8e-25),
    ("1 g stone", 1e-3),
]
for label, mass in cases:
    t2 = doubling_time(mass, 1e-6)
    years = t2 / 3.15e7
    extra = f" ({years:.1e} yr)" if years > 1 else ""
    print(f"  {label:>14s}: {t2:10.2e} s{extra}")
