"""High-voltage drive waveform synthesis.

The drive chain is: logic pulse -> booster -> switching stage -> cloth.
`synthesize_square` produces the ideal 0/V square the pulse generator
commands; `apply_switch` degrades it with the finite rise and fall time of
the switching stage and clamps to the booster's output ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class WaveformError(ValueError):
    """Invalid waveform or synthesis configuration."""


@dataclass(frozen=True)
class PulseConfig:
    """Logic-pulse parameters. Equal on/off times by default (duty 0.5)."""

    frequency: float
    duty: float = 0.5
    sample_rate: float = 20_000.0
    duration: float = 1.0

    def __post_init__(self) -> None:
        if not (1.0 <= self.frequency <= 2000.0):
            raise WaveformError(f"frequency must be in [1, 2000] Hz, got {self.frequency}")
        if not (0.0 < self.duty < 1.0):
            raise WaveformError(f"duty must be in (0, 1), got {self.duty}")
        if self.sample_rate < 20 * self.frequency:
            raise WaveformError(
                f"sample_rate {self.sample_rate} Hz must be >= 20x frequency "
                f"{self.frequency} Hz"
            )
        if not (self.duration > 0):
            raise WaveformError(f"duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class BoosterModel:
    """Idealized booster + switch: linear gain, output clamp, linear edges."""

    dc_input: float = 5.0
    gain: float = 60.0
    max_output: float = 300.0
    rise_time: float = 0.0
    fall_time: float = 0.0

    def __post_init__(self) -> None:
        if self.gain <= 0 or self.max_output <= 0:
            raise WaveformError("gain and max_output must be > 0")
        if self.rise_time < 0 or self.fall_time < 0:
            raise WaveformError("rise_time and fall_time must be >= 0")


@dataclass(frozen=True)
class SampledWaveform:
    """Time-sampled cloth voltage."""

    sample_rate: float
    samples: tuple[float, ...]
    drive_frequency: float

    def __post_init__(self) -> None:
        if len(self.samples) == 0:
            raise WaveformError("waveform must be non-empty")
        arr = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise WaveformError("waveform samples must be finite")

    def __len__(self) -> int:
        return len(self.samples)


def synthesize_square(cfg: PulseConfig, high_voltage: float) -> SampledWaveform:
    """Ideal 0/high_voltage square wave; the first sample is the ON level."""
    if high_voltage < 0:
        raise WaveformError(f"high_voltage must be >= 0, got {high_voltage}")
    n = int(round(cfg.duration * cfg.sample_rate))
    if n == 0:
        raise WaveformError("duration too short for the sample rate")
    # Multiply before dividing so period boundaries land exactly on 0.5 etc.
    phase = (np.arange(n) * cfg.frequency / cfg.sample_rate) % 1.0
    samples = np.where(phase < cfg.duty, high_voltage, 0.0)
    return SampledWaveform(
        sample_rate=cfg.sample_rate,
        samples=tuple(samples.tolist()),
        drive_frequency=cfg.frequency,
    )


def apply_switch(ideal: SampledWaveform, booster: BoosterModel) -> SampledWaveform:
    """Slew-limit the edges to the switch's rise/fall times and clamp.

    With zero rise and fall time the output equals the input. Rise and fall
    must both complete within a half period or the waveform never settles.
    """
    if ideal.drive_frequency > 0:
        half_period = 0.5 / ideal.drive_frequency
        if booster.rise_time + booster.fall_time >= half_period:
            raise WaveformError(
                f"rise+fall time {booster.rise_time + booster.fall_time} s does not "
                f"fit in the half period {half_period} s"
            )
    x = np.clip(np.asarray(ideal.samples, dtype=float), 0.0, booster.max_output)
    if booster.rise_time == 0 and booster.fall_time == 0:
        return SampledWaveform(ideal.sample_rate, tuple(x.tolist()), ideal.drive_frequency)

    amplitude = float(x.max() - x.min())
    dt = 1.0 / ideal.sample_rate
    rise_step = amplitude / booster.rise_time * dt if booster.rise_time > 0 else np.inf
    fall_step = amplitude / booster.fall_time * dt if booster.fall_time > 0 else np.inf
    out = np.empty_like(x)
    level = x[0]
    out[0] = level
    for i in range(1, len(x)):
        target = x[i]
        if target > level:
            level = min(target, level + rise_step)
        elif target < level:
            level = max(target, level - fall_step)
        out[i] = level
    return SampledWaveform(ideal.sample_rate, tuple(out.tolist()), ideal.drive_frequency)


def waveform_to_csv(waveform: SampledWaveform) -> str:
    """Render a waveform as CSV: t_s,voltage_v."""
    lines = ["t_s,voltage_v"]
    dt = 1.0 / waveform.sample_rate
    for i, v in enumerate(waveform.samples):
        lines.append(f"{i * dt:.9g},{v:.9g}")
    return "\n".join(lines) + "\n"
