"""Line-protocol state machine for the (simulated) high-voltage driver.

Wire protocol: ASCII lines, LF-terminated, one command per line, one
response per command. Grammar (case-insensitive, single-space separated):

    SET V <number> | SET F <number> | ON | OFF | STATUS

Responses are exactly ``OK``, ``OK <value>`` or ``ERR RANGE|SAFETY|ORDER|PARSE``.

The interlock is stricter than the physical prototype: `ON` only succeeds
after a current-draw check, and a `SET` issued while driving that would
violate the check is rejected without touching the set-points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from . import physics
from .drivechain import PulseConfig, SampledWaveform, synthesize_square


class Mode(enum.Enum):
    OFF = "OFF"
    ARMED = "ARMED"
    DRIVING = "DRIVING"


class Verb(enum.Enum):
    SET_VOLTAGE = "SET V"
    SET_FREQUENCY = "SET F"
    ON = "ON"
    OFF = "OFF"
    STATUS = "STATUS"


class ParseError(ValueError):
    """Malformed command line."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code  # "UnknownVerb" or "BadArgument"


@dataclass(frozen=True)
class Command:
    verb: Verb
    argument: float | None = None

    def __post_init__(self) -> None:
        needs_arg = self.verb in (Verb.SET_VOLTAGE, Verb.SET_FREQUENCY)
        if needs_arg and self.argument is None:
            raise ValueError(f"{self.verb} requires an argument")
        if not needs_arg and self.argument is not None:
            raise ValueError(f"{self.verb} forbids an argument")


@dataclass(frozen=True)
class DriverLimits:
    """Hard range limits plus the inputs the safety check needs."""

    max_voltage: float = 300.0
    max_frequency: float = 2000.0
    stack: physics.MaterialStack = physics.MaterialStack()
    series_resistance: float = 1e6
    rise_time: float = 1e-3
    current_limit: float = physics.DEFAULT_CURRENT_LIMIT


@dataclass(frozen=True)
class DeviceState:
    mode: Mode = Mode.OFF
    set_voltage: float = 0.0
    set_frequency: float = 50.0
    voltage_was_set: bool = False
    limits: DriverLimits = DriverLimits()


def parse_command(line: str) -> Command:
    """Parse one protocol line into a Command."""
    parts = line.strip().split(" ")
    parts = [p for p in parts if p]
    if not parts:
        raise ParseError("UnknownVerb", "empty command line")
    head = parts[0].upper()
    if head == "SET":
        if len(parts) != 3 or parts[1].upper() not in ("V", "F"):
            raise ParseError("UnknownVerb", f"bad SET command: {line.strip()!r}")
        try:
            value = float(parts[2])
        except ValueError:
            raise ParseError("BadArgument", f"bad number: {parts[2]!r}") from None
        verb = Verb.SET_VOLTAGE if parts[1].upper() == "V" else Verb.SET_FREQUENCY
        return Command(verb, value)
    if len(parts) != 1:
        raise ParseError("UnknownVerb", f"unexpected argument: {line.strip()!r}")
    try:
        verb = {"ON": Verb.ON, "OFF": Verb.OFF, "STATUS": Verb.STATUS}[head]
    except KeyError:
        raise ParseError("UnknownVerb", f"unknown verb: {head!r}") from None
    return Command(verb)


def format_command(cmd: Command) -> str:
    """Render a Command back into its canonical protocol line."""
    if cmd.argument is not None:
        return f"{cmd.verb.value} {cmd.argument:g}"
    return cmd.verb.value


def _safety_check(limits: DriverLimits, voltage: float, frequency: float) -> bool:
    if voltage == 0:
        return True
    report = physics.estimate_currents(
        limits.stack,
        voltage,
        frequency,
        limits.series_resistance,
        limits.rise_time,
        limit=limits.current_limit,
    )
    return report.passed


def apply_command(state: DeviceState, cmd: Command) -> tuple[DeviceState, str]:
    """Pure transition function: (state, command) -> (new state, response line).

    The state is never partially updated on error.
    """
    limits = state.limits
    if cmd.verb == Verb.STATUS:
        return state, (
            f"OK {state.mode.value} V={state.set_voltage:g} F={state.set_frequency:g}"
        )

    if cmd.verb == Verb.OFF:
        return replace(state, mode=Mode.OFF), "OK"

    if cmd.verb == Verb.ON:
        if not state.voltage_was_set or state.mode == Mode.OFF:
            return state, "ERR ORDER"
        if not _safety_check(limits, state.set_voltage, state.set_frequency):
            return state, "ERR SAFETY"
        return replace(state, mode=Mode.DRIVING), "OK"

    # SET V / SET F
    assert cmd.argument is not None
    if cmd.verb == Verb.SET_VOLTAGE:
        if not (0 <= cmd.argument <= limits.max_voltage):
            return state, "ERR RANGE"
        new_v, new_f = cmd.argument, state.set_frequency
    else:
        if not (1 <= cmd.argument <= limits.max_frequency):
            return state, "ERR RANGE"
        new_v, new_f = state.set_voltage, cmd.argument

    if state.mode == Mode.DRIVING and not _safety_check(limits, new_v, new_f):
        return state, "ERR SAFETY"

    new_state = replace(
        state,
        set_voltage=new_v,
        set_frequency=new_f,
        voltage_was_set=state.voltage_was_set or cmd.verb == Verb.SET_VOLTAGE,
        mode=Mode.ARMED if state.mode == Mode.OFF else state.mode,
    )
    return new_state, "OK"


def handle_line(state: DeviceState, line: str) -> tuple[DeviceState, str]:
    """Parse-and-apply convenience; parse failures report ERR PARSE."""
    try:
        cmd = parse_command(line)
    except ParseError:
        return state, "ERR PARSE"
    return apply_command(state, cmd)


def render_output(state: DeviceState, duration: float, sample_rate: float) -> SampledWaveform:
    """Waveform currently on the cloth: the set square when driving, else flat 0 V."""
    if duration <= 0 or sample_rate <= 0:
        raise ValueError("duration and sample_rate must be > 0")
    if state.mode != Mode.DRIVING or state.set_voltage == 0:
        n = max(1, int(round(duration * sample_rate)))
        return SampledWaveform(sample_rate, (0.0,) * n, 0.0)
    cfg = PulseConfig(
        frequency=state.set_frequency,
        duty=0.5,
        sample_rate=sample_rate,
        duration=duration,
    )
    return synthesize_square(cfg, state.set_voltage)
