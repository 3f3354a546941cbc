"""Electrovibration cloth toolkit.

Physics simulation, drive-waveform synthesis, a simulated high-voltage
driver with a line protocol, a within-subject study runner, and
aligned-rank factorial analysis, plus HTTP and CLI front ends.
"""

from .physics import (
    MaterialStack,
    ForceTrace,
    SafetyReport,
    VACUUM_PERMITTIVITY,
    coupling_capacitance,
    electrostatic_normal_force,
    estimate_currents,
    friction_trace,
    modulation_metrics,
)
from .drivechain import BoosterModel, PulseConfig, SampledWaveform, apply_switch, synthesize_square

__all__ = [
    "MaterialStack",
    "ForceTrace",
    "SafetyReport",
    "VACUUM_PERMITTIVITY",
    "coupling_capacitance",
    "electrostatic_normal_force",
    "estimate_currents",
    "friction_trace",
    "modulation_metrics",
    "BoosterModel",
    "PulseConfig",
    "SampledWaveform",
    "apply_switch",
    "synthesize_square",
]

__version__ = "0.1.0"
