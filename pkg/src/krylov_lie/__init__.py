"""Exact Krylov dynamics on rank-one Lie sectors.

Time-dependent Hamiltonians whose interaction picture closes on su(2),
su(1,1) or the Heisenberg-Weyl algebra (and commuting products of such
sectors) are solved through a 2x2 Wei-Norman propagator. Every closed form
has a brute-force matrix oracle in :mod:`krylov_lie.reference`.
"""

from .algebra import HW, SU2, SU11, CARTAN_A3, CARTAN_B3, RootData, SectorSignature, \
    coupling_function, lanczos_coefficients, validate_commuting_sectors, virasoro_weight
from .drives import Constant, ConstantPhase, DraggedCosine, DriveEnvelope, \
    PiecewiseConstantQuench, RotatingField, SechPulse, Tabulated, drive_from_dict, \
    envelope_from_dict
from .errors import ConfigError, DomainError, IntegrationError, NoRealLogarithmError, \
    TruncationError
from .generator import FictitiousChain, GeneratorParams, chain_evolve, disentangle, \
    hw_chain_evolve, invert, invert_series
from .krylov import KrylovWavefunction, MultiSectorWavefunction, complexity_series, \
    hw_wavefunction, multi_sector, wavefunction_from_wn
from .pipeline import ScenarioResult, run_scenario
from .qsl import QSLReport, Saturation, SaturationSummary, qsl_point, saturation_scan, \
    ti_benchmark
from .scenarios import Scenario, SectorSpec, builtin, list_scenarios, scenario_from_config
from .weinorman import HWDisplacement, WNState, hw_displacement, integrate_riccati, \
    integrate_wn

__version__ = "0.1.0"

__all__ = [
    "HW", "SU2", "SU11", "CARTAN_A3", "CARTAN_B3", "RootData", "SectorSignature",
    "coupling_function", "lanczos_coefficients", "validate_commuting_sectors", "virasoro_weight",
    "Constant", "ConstantPhase", "DraggedCosine", "DriveEnvelope", "PiecewiseConstantQuench",
    "RotatingField", "SechPulse", "Tabulated", "drive_from_dict", "envelope_from_dict",
    "ConfigError", "DomainError", "IntegrationError", "NoRealLogarithmError", "TruncationError",
    "FictitiousChain", "GeneratorParams", "chain_evolve", "disentangle", "hw_chain_evolve",
    "invert", "invert_series",
    "KrylovWavefunction", "MultiSectorWavefunction", "complexity_series", "hw_wavefunction",
    "multi_sector", "wavefunction_from_wn",
    "ScenarioResult", "run_scenario",
    "QSLReport", "Saturation", "SaturationSummary", "qsl_point", "saturation_scan",
    "ti_benchmark",
    "Scenario", "SectorSpec", "builtin", "list_scenarios", "scenario_from_config",
    "HWDisplacement", "WNState", "hw_displacement", "integrate_riccati", "integrate_wn",
]
