"""Tunneling survives decoherence.

A beam split into two transverse sub-packets hits a barrier it cannot
classically cross.  In vacuum the transmitted particle keeps the coherent
transverse superposition (coherence stays 1).  If air on the near side
decoheres the transverse state first, the particle still tunnels with the
same frequency - it emerges as a statistical mixture of the two transverse
packets with weights |c1|^2 : |c2|^2, decohered yet entirely quantum.
"""

import math

import numpy as np

from qratio import GaussianPacket
from qratio.constants import ELECTRON_MASS as ME, EV
from qratio.decoherence import EnvironmentSpec
from qratio.tunneling import (GaussianBarrier, RectangularBarrier,
                              TunnelScenario, default_scenario_grid,
                              exact_transmission, run_tunnel_scenario,
                              wkb_transmission)

# stationary methods first: WKB vs transfer matrix across energies
bar = RectangularBarrier(2.0 * EV, 0.25e-9)
print("rectangular barrier, 2 eV high, 0.5 nm wide:")
print(f"{'E (eV)':>7s} {'T_wkb':>12s} {'T_exact':>12s}")
for e_ev in (0.6, 1.0, 1.4, 1.8):
    e = e_ev * EV
    print(f"{e_ev:7.2f} {wkb_transmission(bar, e, ME):12.4e} "
          f"{exact_transmission(bar, e, ME, check=False):12.4e}")

# split-beam scenario
p0 = math.sqrt(2 * ME * 1.0 * EV)
gauss = GaussianBarrier(1.2 * EV, 1.2e-9)
c = 1 / math.sqrt(2)
scen = TunnelScenario(
    longitudinal=GaussianPacket(-3.5 * 36e-9, 36e-9, p0, ME),
    transverse=(GaussianPacket(-75e-9, 36e-9, 0.0, ME),
                GaussianPacket(+75e-9, 36e-9, 0.0, ME)),
    c1=c, c2=c, barrier=gauss)
grid = default_scenario_grid(scen, points_z=2048, points_x=64)

print("\npure beam (takes ~20 s on two cores)...")
pure = run_tunnel_scenario(scen, grid=grid)
print(f"  transmitted fraction {pure.transmitted_fraction:.4e} "
      f"(energy-averaged stationary value {pure.oracle_transmission:.4e})")
print(f"  transverse coherence after the barrier: "
      f"{pure.transverse_coherence:.4f} (input 1.0)")
print(f"  transmitted + reflected = {pure.flux_sum:.9f}")

scen_d = TunnelScenario(
    longitudinal=GaussianPacket(-3.5 * 36e-9, 36e-9, p0, ME),
    transverse=(GaussianPacket(-75e-9, 36e-9, 0.0, ME),
                GaussianPacket(+75e-9, 36e-9, 0.0, ME)),
    c1=0.6, c2=0.8, barrier=gauss)
env = EnvironmentSpec(lambda_env=50e-9, rate_Lambda=1e9)
deco = run_tunnel_scenario(scen_d, grid=grid, with_decoherence=True, env=env)
print("\ndecohered beam (|c1|^2 = 0.36, |c2|^2 = 0.64):")
print(f"  transmitted fraction {deco.transmitted_fraction:.4e} - unchanged")
print(f"  transverse coherence {deco.transverse_coherence:.4f} - destroyed")
print(f"  band weights {deco.band_weights[0]:.4f} : {deco.band_weights[1]:.4f}"
      " - the pure-state frequencies survive")
