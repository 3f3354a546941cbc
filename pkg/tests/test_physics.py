import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcloth import physics
from evcloth.drivechain import PulseConfig, SampledWaveform, synthesize_square

STACK = physics.MaterialStack(
    contact_area=1e-4,
    insulator_thickness=3.5e-5,
    insulator_rel_permittivity=3.0,
    friction_coeff=0.5,
)

# Frozen from the direct arithmetic oracle A*eps*eps0/2*(V/d)^2 with
# eps0 = 8.854e-12, recomputed by hand before the implementation existed.
FORCE_300V = 1e-4 * 3.0 * 8.854e-12 / 2.0 * (300.0 / 3.5e-5) ** 2
CAPACITANCE = 3.0 * 8.854e-12 * 1e-4 / 3.5e-5


def stack_strategy():
    return st.builds(
        physics.MaterialStack,
        contact_area=st.floats(1e-6, 1.0),
        insulator_thickness=st.floats(1e-6, 0.01),
        insulator_rel_permittivity=st.floats(1.0, 100.0),
        friction_coeff=st.floats(0.0, 5.0),
    )


class TestNormalForce:
    def test_zero_voltage(self):
        assert physics.electrostatic_normal_force(STACK, 0.0) == 0.0

    def test_300v_matches_arithmetic_oracle(self):
        f = physics.electrostatic_normal_force(STACK, 300.0)
        assert f == pytest.approx(FORCE_300V, rel=1e-12)
        assert f == pytest.approx(9.758e-2, rel=1e-3)

    def test_100v_is_one_ninth_of_300v(self):
        f100 = physics.electrostatic_normal_force(STACK, 100.0)
        f300 = physics.electrostatic_normal_force(STACK, 300.0)
        assert f100 == pytest.approx(f300 / 9.0, rel=1e-12)
        assert f100 == pytest.approx(1.084e-2, rel=1e-3)

    def test_invalid_stack_rejected(self):
        with pytest.raises(physics.PhysicsError):
            physics.MaterialStack(contact_area=0.0)
        with pytest.raises(physics.PhysicsError):
            physics.MaterialStack(insulator_thickness=-1e-5)
        with pytest.raises(physics.PhysicsError):
            physics.MaterialStack(insulator_rel_permittivity=0.5)
        with pytest.raises(physics.PhysicsError):
            physics.MaterialStack(insulator_thickness=0.02)

    def test_nonfinite_voltage_rejected(self):
        with pytest.raises(physics.PhysicsError):
            physics.electrostatic_normal_force(STACK, math.nan)

    @given(stack_strategy(), st.floats(-1000, 1000), st.floats(0.1, 10))
    def test_quadratic_voltage_law(self, stack, v, k):
        base = physics.electrostatic_normal_force(stack, v)
        scaled = physics.electrostatic_normal_force(stack, k * v)
        assert scaled == pytest.approx(k * k * base, rel=1e-12, abs=1e-300)

    @given(stack_strategy(), st.floats(-1000, 1000))
    def test_sign_invariance(self, stack, v):
        assert physics.electrostatic_normal_force(
            stack, v
        ) == physics.electrostatic_normal_force(stack, -v)

    @given(st.floats(1e-6, 0.01), st.floats(1e-6, 0.01))
    def test_inverse_square_thickness_law(self, d1, d2):
        s1 = physics.MaterialStack(insulator_thickness=d1)
        s2 = physics.MaterialStack(insulator_thickness=d2)
        f1 = physics.electrostatic_normal_force(s1, 250.0)
        f2 = physics.electrostatic_normal_force(s2, 250.0)
        assert f1 * d1**2 == pytest.approx(f2 * d2**2, rel=1e-12)


class TestCapacitance:
    def test_matches_arithmetic_oracle(self):
        c = physics.coupling_capacitance(STACK)
        assert c == pytest.approx(CAPACITANCE, rel=1e-12)
        assert c == pytest.approx(7.589e-11, rel=1e-3)

    def test_linear_in_area(self):
        doubled = physics.MaterialStack(contact_area=2e-4)
        assert physics.coupling_capacitance(doubled) == pytest.approx(
            2 * physics.coupling_capacitance(STACK), rel=1e-12
        )

    def test_inverse_in_thickness(self):
        doubled = physics.MaterialStack(insulator_thickness=7e-5)
        assert physics.coupling_capacitance(doubled) == pytest.approx(
            physics.coupling_capacitance(STACK) / 2, rel=1e-12
        )


class TestFrictionTrace:
    def test_all_zero_waveform(self):
        w = SampledWaveform(1000.0, (0.0,) * 100, 0.0)
        trace = physics.friction_trace(STACK, w)
        assert all(f == 0 for f in trace.friction_force)
        assert all(n == 0 for n in trace.normal_force)

    def test_square_alternates_zero_and_mu_f(self):
        cfg = PulseConfig(frequency=50.0, duty=0.5, sample_rate=20_000.0, duration=0.1)
        trace = physics.friction_trace(STACK, synthesize_square(cfg, 300.0))
        values = sorted(set(round(f, 12) for f in trace.friction_force))
        assert values[0] == 0.0
        assert values[1] == pytest.approx(0.5 * FORCE_300V, rel=1e-9)
        assert values[1] == pytest.approx(4.879e-2, rel=1e-3)

    def test_voltage_doubling_quadruples_force(self):
        cfg = PulseConfig(frequency=50.0, sample_rate=2000.0, duration=0.05)
        t1 = physics.friction_trace(STACK, synthesize_square(cfg, 150.0))
        t2 = physics.friction_trace(STACK, synthesize_square(cfg, 300.0))
        for a, b in zip(t1.friction_force, t2.friction_force):
            assert b == pytest.approx(4 * a, rel=1e-12, abs=0)

    def test_friction_is_mu_times_normal(self):
        cfg = PulseConfig(frequency=100.0, sample_rate=4000.0, duration=0.05)
        trace = physics.friction_trace(STACK, synthesize_square(cfg, 220.0))
        for n, f in zip(trace.normal_force, trace.friction_force):
            assert f == STACK.friction_coeff * n

    def test_rate_too_low_is_aliasing_error(self):
        w = SampledWaveform(100.0, (0.0, 1.0) * 10, 200.0)
        with pytest.raises(physics.AliasingError):
            physics.friction_trace(STACK, w)

    def test_drive_frequency_copied(self):
        cfg = PulseConfig(frequency=100.0, sample_rate=4000.0, duration=0.05)
        trace = physics.friction_trace(STACK, synthesize_square(cfg, 100.0))
        assert trace.drive_frequency == 100.0


class TestEstimateCurrents:
    def test_fingertip_passes(self):
        r = physics.estimate_currents(STACK, 300.0, 200.0, 1e6, 1e-3)
        assert r.average_rectified_current == pytest.approx(
            2 * CAPACITANCE * 300 * 200, rel=1e-12
        )
        assert r.average_rectified_current == pytest.approx(9.11e-6, rel=1e-3)
        assert r.passed

    def test_full_cloth_fails(self):
        big = physics.MaterialStack(contact_area=0.09, insulator_thickness=3.5e-5)
        r = physics.estimate_currents(big, 300.0, 200.0, 1e6, 1e-3)
        expected = 2 * physics.coupling_capacitance(big) * 300 * 200
        assert r.average_rectified_current == pytest.approx(expected, rel=1e-12)
        assert r.average_rectified_current == pytest.approx(8.2e-3, rel=1e-2)
        assert not r.passed

    def test_zero_voltage_passes(self):
        r = physics.estimate_currents(STACK, 0.0, 200.0, 1e6, 1e-3)
        assert r.average_rectified_current == 0.0
        assert r.peak_current == 0.0
        assert r.passed

    def test_paper_grid_all_pass(self):
        for v in (100.0, 200.0, 300.0):
            for f in (50.0, 100.0, 200.0):
                assert physics.estimate_currents(STACK, v, f, 1e6, 1e-3).passed

    @given(
        st.floats(1e-5, 0.5),
        st.floats(1, 300),
        st.floats(1, 2000),
        st.floats(1.01, 3.0),
    )
    @settings(max_examples=60)
    def test_safety_monotone_nonincreasing(self, area, v, f, scale):
        base = physics.estimate_currents(
            physics.MaterialStack(contact_area=area), v, f, 1e6, 1e-3
        )
        for bumped in (
            physics.estimate_currents(
                physics.MaterialStack(contact_area=area * scale), v, f, 1e6, 1e-3
            ),
            physics.estimate_currents(
                physics.MaterialStack(contact_area=area), v * scale, f, 1e6, 1e-3
            ),
            physics.estimate_currents(
                physics.MaterialStack(contact_area=area), v, f * scale, 1e6, 1e-3
            ),
        ):
            if not base.passed:
                assert not bumped.passed


class TestModulationMetrics:
    def test_constant_trace(self):
        w = SampledWaveform(1000.0, (100.0,) * 50, 0.0)
        m = physics.modulation_metrics(physics.friction_trace(STACK, w))
        assert m["peak_to_peak"] == 0.0
        assert m["ac_rms"] == 0.0
        assert m["fundamental"] == 0.0

    def test_square_closed_form(self):
        cfg = PulseConfig(frequency=50.0, duty=0.5, sample_rate=20_000.0, duration=1.0)
        trace = physics.friction_trace(STACK, synthesize_square(cfg, 300.0))
        f_max = 0.5 * FORCE_300V
        m = physics.modulation_metrics(trace)
        assert m["mean"] == pytest.approx(f_max / 2, rel=1e-9)
        assert m["ac_rms"] == pytest.approx(f_max / 2, rel=1e-9)
        assert m["peak_to_peak"] == pytest.approx(f_max, rel=1e-12)

    def test_fundamental_200hz(self):
        cfg = PulseConfig(frequency=200.0, sample_rate=20_000.0, duration=1.0)
        trace = physics.friction_trace(STACK, synthesize_square(cfg, 300.0))
        m = physics.modulation_metrics(trace)
        assert abs(m["fundamental"] - 200.0) <= 1.0


class TestTraceCsv:
    def test_header_and_rows(self):
        w = SampledWaveform(1000.0, (0.0, 300.0), 0.0)
        csv = physics.trace_to_csv(physics.friction_trace(STACK, w))
        lines = csv.split("\n")
        assert lines[0] == "t_s,voltage_v,normal_n,friction_n"
        assert len(lines) == 4  # header + 2 rows + trailing newline split
        assert csv.endswith("\n")
        assert "\r" not in csv
        assert lines[1].startswith("0,0,0,0")
