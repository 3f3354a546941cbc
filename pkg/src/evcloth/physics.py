"""Electrostatic attraction and friction model for a charged cloth touched
through a thin insulating glove.

The finger tissue and the conductive cloth form the two plates of a
parallel-plate capacitor whose dielectric is the glove. A voltage V across
a stack with contact area A, insulator thickness d and relative
permittivity eps produces a normal attraction

    F = A * eps * eps0 / 2 * (V / d)**2

and a friction force F' = mu * F.  Current draw is estimated from the
charge moved per switching cycle, which is what the safety envelope bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .drivechain import SampledWaveform

#: Vacuum permittivity, F/m. Fixed physical constant, never configurable.
VACUUM_PERMITTIVITY = 8.854e-12

#: Body-safe current bound, A.
DEFAULT_CURRENT_LIMIT = 5.0e-4

#: Sanity bound for the thin-insulator model, m.
MAX_INSULATOR_THICKNESS = 0.01


class PhysicsError(ValueError):
    """Invalid physical parameters."""


class AliasingError(PhysicsError):
    """Sample rate too low for the drive frequency."""


@dataclass(frozen=True)
class MaterialStack:
    """Geometry and material constants of the finger-glove-cloth capacitor.

    contact_area: m^2, insulator_thickness: m, friction_coeff dimensionless.
    Defaults model a fingertip (1 cm^2) on a 35 um PVC glove.
    """

    contact_area: float = 1e-4
    insulator_thickness: float = 3.5e-5
    insulator_rel_permittivity: float = 3.0
    friction_coeff: float = 0.5

    def __post_init__(self) -> None:
        if not (self.contact_area > 0):
            raise PhysicsError(f"contact_area must be > 0, got {self.contact_area}")
        if not (0 < self.insulator_thickness <= MAX_INSULATOR_THICKNESS):
            raise PhysicsError(
                "insulator_thickness must be in (0, "
                f"{MAX_INSULATOR_THICKNESS}] m, got {self.insulator_thickness}"
            )
        if not (self.insulator_rel_permittivity >= 1):
            raise PhysicsError(
                f"relative permittivity must be >= 1, got {self.insulator_rel_permittivity}"
            )
        if not (self.friction_coeff >= 0):
            raise PhysicsError(f"friction_coeff must be >= 0, got {self.friction_coeff}")


@dataclass(frozen=True)
class ForceTrace:
    """Time-sampled normal and friction force for a voltage waveform."""

    sample_rate: float
    voltage: tuple[float, ...]
    normal_force: tuple[float, ...]
    friction_force: tuple[float, ...]
    drive_frequency: float

    def __post_init__(self) -> None:
        if not (len(self.voltage) == len(self.normal_force) == len(self.friction_force)):
            raise PhysicsError("voltage/normal/friction sequences must have equal length")
        if len(self.normal_force) == 0:
            raise PhysicsError("trace must be non-empty")

    def __len__(self) -> int:
        return len(self.normal_force)


@dataclass(frozen=True)
class SafetyReport:
    """Outcome of the current-draw check against the body-safe limit."""

    average_rectified_current: float
    peak_current: float
    limit: float
    peak_limit: float
    passed: bool


def electrostatic_normal_force(stack: MaterialStack, voltage: float) -> float:
    """Attractive normal force, N. Negative voltage allowed (force uses V^2)."""
    if not math.isfinite(voltage):
        raise PhysicsError(f"voltage must be finite, got {voltage}")
    return (
        stack.contact_area
        * stack.insulator_rel_permittivity
        * VACUUM_PERMITTIVITY
        / 2.0
        * (voltage / stack.insulator_thickness) ** 2
    )


def coupling_capacitance(stack: MaterialStack) -> float:
    """Capacitance of the finger-cloth coupling, F."""
    return (
        stack.insulator_rel_permittivity
        * VACUUM_PERMITTIVITY
        * stack.contact_area
        / stack.insulator_thickness
    )


def friction_trace(stack: MaterialStack, waveform: "SampledWaveform") -> ForceTrace:
    """Pointwise normal and friction force for a sampled voltage waveform."""
    if len(waveform.samples) == 0:
        raise PhysicsError("waveform must be non-empty")
    if waveform.drive_frequency > 0 and waveform.sample_rate < 20 * waveform.drive_frequency:
        raise AliasingError(
            f"sample rate {waveform.sample_rate} Hz is below 20x the "
            f"drive frequency {waveform.drive_frequency} Hz"
        )
    v = np.asarray(waveform.samples, dtype=float)
    scale = (
        stack.contact_area
        * stack.insulator_rel_permittivity
        * VACUUM_PERMITTIVITY
        / (2.0 * stack.insulator_thickness**2)
    )
    normal = scale * v * v
    return ForceTrace(
        sample_rate=waveform.sample_rate,
        voltage=tuple(v.tolist()),
        normal_force=tuple(normal.tolist()),
        friction_force=tuple((stack.friction_coeff * normal).tolist()),
        drive_frequency=waveform.drive_frequency,
    )


def estimate_currents(
    stack: MaterialStack,
    voltage: float,
    frequency: float,
    series_resistance: float,
    rise_time: float,
    limit: float = DEFAULT_CURRENT_LIMIT,
    peak_limit: float | None = None,
) -> SafetyReport:
    """Average rectified and peak current for a square drive.

    Each period moves charge C*V twice (one charge, one discharge), giving
    average rectified current 2*C*V*f. Peak current is bounded both by the
    series resistor and by how fast the switch can slew the capacitor.
    """
    if voltage < 0 or not math.isfinite(voltage):
        raise PhysicsError(f"voltage must be >= 0 and finite, got {voltage}")
    if frequency <= 0 or series_resistance <= 0 or rise_time <= 0:
        raise PhysicsError("frequency, series_resistance and rise_time must be > 0")
    if peak_limit is None:
        peak_limit = limit
    c = coupling_capacitance(stack)
    average = 2.0 * c * voltage * frequency
    peak = min(voltage / series_resistance, c * voltage / rise_time)
    return SafetyReport(
        average_rectified_current=average,
        peak_current=peak,
        limit=limit,
        peak_limit=peak_limit,
        passed=(average <= limit and peak <= peak_limit),
    )


def modulation_metrics(trace: ForceTrace) -> dict[str, float]:
    """Peak-to-peak, mean, AC RMS and estimated fundamental of the friction signal.

    The fundamental is counted from rising crossings of the signal midline,
    which is exact for square-like signals and needs no spectral machinery.
    A constant trace reports 0 Hz.
    """
    f = np.asarray(trace.friction_force, dtype=float)
    lo, hi = float(f.min()), float(f.max())
    mean = float(f.mean())
    if hi == lo:
        mean = lo
        ac_rms = 0.0
        fundamental = 0.0
    else:
        ac_rms = float(np.sqrt(np.mean((f - mean) ** 2)))
        midline = (hi + lo) / 2.0
        above = f >= midline
        rising = np.nonzero(above[1:] & ~above[:-1])[0]
        if len(rising) >= 2:
            span = (rising[-1] - rising[0]) / trace.sample_rate
            fundamental = (len(rising) - 1) / span
        else:
            fundamental = len(rising) * trace.sample_rate / len(f)
    return {
        "peak_to_peak": hi - lo,
        "mean": mean,
        "ac_rms": ac_rms,
        "fundamental": fundamental,
    }


def trace_to_csv(trace: ForceTrace) -> str:
    """Render a ForceTrace as CSV: t_s,voltage_v,normal_n,friction_n."""
    lines = ["t_s,voltage_v,normal_n,friction_n"]
    dt = 1.0 / trace.sample_rate
    for i, (v, n, fr) in enumerate(
        zip(trace.voltage, trace.normal_force, trace.friction_force)
    ):
        lines.append(f"{i * dt:.9g},{v:.9g},{n:.9g},{fr:.9g}")
    return "\n".join(lines) + "\n"
