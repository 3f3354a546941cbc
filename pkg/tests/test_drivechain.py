import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcloth import physics
from evcloth.drivechain import (
    BoosterModel,
    PulseConfig,
    SampledWaveform,
    WaveformError,
    apply_switch,
    synthesize_square,
    waveform_to_csv,
)


class TestPulseConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"frequency": 0.5},
            {"frequency": 3000.0},
            {"frequency": 100.0, "duty": 0.0},
            {"frequency": 100.0, "duty": 1.0},
            {"frequency": 100.0, "sample_rate": 1000.0},
            {"frequency": 100.0, "duration": 0.0},
        ],
    )
    def test_invariants(self, kwargs):
        with pytest.raises(WaveformError):
            PulseConfig(**kwargs)


class TestSynthesizeSquare:
    def test_mean_and_rms_duty_half(self):
        cfg = PulseConfig(frequency=50.0, duty=0.5, sample_rate=20_000.0, duration=1.0)
        w = np.array(synthesize_square(cfg, 300.0).samples)
        assert w.mean() == pytest.approx(150.0, rel=1e-9)
        assert math.sqrt((w**2).mean()) == pytest.approx(300.0 / math.sqrt(2), rel=1e-9)

    def test_mean_duty_quarter(self):
        cfg = PulseConfig(frequency=50.0, duty=0.25, sample_rate=20_000.0, duration=1.0)
        w = np.array(synthesize_square(cfg, 100.0).samples)
        assert w.mean() == pytest.approx(25.0, rel=1e-9)

    def test_first_sample_is_on(self):
        cfg = PulseConfig(frequency=200.0, sample_rate=20_000.0, duration=0.1)
        assert synthesize_square(cfg, 42.0).samples[0] == 42.0

    def test_rising_edge_count(self):
        cfg = PulseConfig(frequency=200.0, sample_rate=20_000.0, duration=1.0)
        on = np.array(synthesize_square(cfg, 300.0).samples) > 0
        # Count period starts, including the initial turn-on at t=0.
        edges = int(on[0]) + int(np.count_nonzero(on[1:] & ~on[:-1]))
        assert edges == 200

    def test_negative_voltage_rejected(self):
        cfg = PulseConfig(frequency=50.0)
        with pytest.raises(WaveformError):
            synthesize_square(cfg, -1.0)

    @given(
        st.sampled_from([50.0, 100.0, 200.0]),
        st.floats(0.1, 0.9),
        st.floats(1.0, 400.0),
    )
    @settings(max_examples=30)
    def test_mean_equals_duty_times_v(self, f, duty, v):
        cfg = PulseConfig(frequency=f, duty=duty, sample_rate=40_000.0, duration=1.0)
        w = np.array(synthesize_square(cfg, v).samples)
        # Duty quantizes to whole samples: one sample per period of slack.
        assert w.mean() == pytest.approx(duty * v, abs=v * f / 40_000.0 + 1e-9)

    def test_autocorrelation_peak_at_period(self):
        cfg = PulseConfig(frequency=50.0, sample_rate=20_000.0, duration=1.0)
        w = np.array(synthesize_square(cfg, 300.0).samples)
        x = w - w.mean()
        period = int(20_000 / 50)
        ac = np.correlate(x, x, mode="full")[len(x) - 1 :]
        # Skip the zero-lag peak and its shoulder (half period wide).
        search_from = period // 2
        lag = search_from + int(np.argmax(ac[search_from : 2 * period]))
        assert abs(lag - period) <= 1


class TestApplySwitch:
    def test_zero_rise_fall_is_identity(self):
        cfg = PulseConfig(frequency=100.0, sample_rate=20_000.0, duration=0.05)
        ideal = synthesize_square(cfg, 250.0)
        out = apply_switch(ideal, BoosterModel(rise_time=0.0, fall_time=0.0))
        assert out.samples == ideal.samples

    def test_edge_spans_rise_time(self):
        cfg = PulseConfig(frequency=100.0, sample_rate=1_000_000.0, duration=0.02)
        ideal = synthesize_square(cfg, 300.0)
        out = np.array(
            apply_switch(
                ideal, BoosterModel(rise_time=1e-4, fall_time=1e-4)
            ).samples
        )
        # Count samples strictly between 1% and 99% of amplitude on the first
        # falling edge; a 1e-4 s ramp at 1 MHz spans ~100 samples.
        lo, hi = 0.01 * 300.0, 0.99 * 300.0
        in_transition = (out > lo) & (out < hi)
        runs = np.diff(np.where(np.concatenate(([0], in_transition, [0])))[0])
        first_run = np.where(in_transition)[0]
        # Extract contiguous run lengths.
        lengths = []
        count = 0
        prev = None
        for idx in first_run:
            if prev is not None and idx == prev + 1:
                count += 1
            else:
                if count:
                    lengths.append(count)
                count = 1
            prev = idx
        if count:
            lengths.append(count)
        assert lengths, "expected ramp transitions"
        for n in lengths:
            assert abs(n - 98) <= 2  # 1%..99% exclusive of a 100-sample ramp

    def test_edges_monotone(self):
        cfg = PulseConfig(frequency=100.0, sample_rate=200_000.0, duration=0.02)
        ideal = synthesize_square(cfg, 300.0)
        out = np.array(
            apply_switch(ideal, BoosterModel(rise_time=5e-4, fall_time=5e-4)).samples
        )
        d = np.diff(out)
        # Between any two consecutive direction flips the ramp is monotone:
        # no sample both rises and falls within one transition.
        sign_changes = np.count_nonzero(np.diff(np.sign(d[d != 0])) != 0)
        periods = int(100 * 0.02)
        assert sign_changes <= 2 * periods + 1

    def test_clamped_to_max_output(self):
        w = SampledWaveform(20_000.0, (0.0, 500.0, 500.0, 0.0) * 10, 0.0)
        out = apply_switch(w, BoosterModel(max_output=300.0))
        assert max(out.samples) == 300.0

    def test_unsettled_waveform_rejected(self):
        cfg = PulseConfig(frequency=200.0, sample_rate=20_000.0, duration=0.05)
        ideal = synthesize_square(cfg, 300.0)
        with pytest.raises(WaveformError):
            apply_switch(ideal, BoosterModel(rise_time=2e-3, fall_time=1e-3))

    @given(st.sampled_from([50.0, 100.0, 200.0]), st.floats(10.0, 300.0))
    @settings(max_examples=20)
    def test_rms_never_increases(self, f, v):
        cfg = PulseConfig(frequency=f, sample_rate=100_000.0, duration=0.1)
        ideal = synthesize_square(cfg, v)
        out = apply_switch(ideal, BoosterModel(rise_time=5e-4, fall_time=5e-4))
        rms_in = math.sqrt(np.mean(np.array(ideal.samples) ** 2))
        rms_out = math.sqrt(np.mean(np.array(out.samples) ** 2))
        assert rms_out <= rms_in + 1e-9


class TestRoundTripFrequency:
    @pytest.mark.parametrize("f", [50.0, 100.0, 200.0])
    @pytest.mark.parametrize("v", [100.0, 200.0, 300.0])
    def test_fundamental_matches_drive(self, f, v):
        stack = physics.MaterialStack()
        cfg = PulseConfig(frequency=f, sample_rate=20_000.0, duration=1.0)
        trace = physics.friction_trace(stack, synthesize_square(cfg, v))
        fundamental = physics.modulation_metrics(trace)["fundamental"]
        assert abs(fundamental - f) <= 0.01 * f


def test_waveform_csv():
    w = SampledWaveform(1000.0, (0.0, 10.0, 0.0), 0.0)
    csv = waveform_to_csv(w)
    lines = csv.strip().split("\n")
    assert lines[0] == "t_s,voltage_v"
    assert lines[1] == "0,0"
    assert lines[2] == "0.001,10"
