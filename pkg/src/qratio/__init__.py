"""qratio: numerical toolkit for the quantum-ratio criterion.

Library modules:

- :mod:`qratio.core` - quantum ratio Q = R_q/L_0, Gaussian packet spreading
- :mod:`qratio.catalog` - particle masses and experiment records
- :mod:`qratio.spin` - spin coherent states and their classical limit
- :mod:`qratio.grid` - spectral split-operator Schrödinger solver
- :mod:`qratio.stern_gerlach` - spinor dynamics in an inhomogeneous magnet
- :mod:`qratio.tunneling` - WKB/exact transmission, split-beam scenarios
- :mod:`qratio.talbot` - Talbot carpets and Talbot-Lau scans
- :mod:`qratio.decoherence` - position-space localization of density matrices
- :mod:`qratio.config`/:mod:`qratio.runner`/:mod:`qratio.cli` - scenario files,
  execution and the command line
"""

__version__ = "0.1.0"

from .constants import CONST, PhysicalConstants
from .core import (Classification, GaussianPacket, RatioResult, body_size,
                   de_broglie_wavelength, doubling_time, packet_width_at,
                   quantum_ratio)
from .catalog import (CATALOG, ExperimentRecord, ParticleSpec, catalog_lookup,
                      experiment_names)
from .spin import (SpinCoherentState, SpinDistribution,
                   classical_limit_diagnostics, coefficient, distribution,
                   saddle_point_peak, stirling_log_weight)

__all__ = [
    "__version__", "CONST", "PhysicalConstants",
    "Classification", "GaussianPacket", "RatioResult", "body_size",
    "de_broglie_wavelength", "doubling_time", "packet_width_at",
    "quantum_ratio",
    "CATALOG", "ExperimentRecord", "ParticleSpec", "catalog_lookup",
    "experiment_names",
    "SpinCoherentState", "SpinDistribution", "classical_limit_diagnostics",
    "coefficient", "distribution", "saddle_point_peak", "stirling_log_weight",
]
