import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikecam import (
    SamplerConfig,
    SamplerState,
    constant_scene,
    estimate_intensity,
    integrate_tick,
    sample_sequence,
)
from spikecam.scenes import SceneSequence

from oracles import constant_spike_ticks, isis_of


def sample_constant(intensity, num_ticks, reset_mode="drain", width=2, height=2):
    scene = constant_scene(width, height, num_ticks, intensity=intensity)
    return sample_sequence(scene, SamplerConfig(reset_mode=reset_mode))


class TestConfig:
    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            SamplerConfig(threshold=0)
        with pytest.raises(ValueError):
            SamplerConfig(threshold=-1)

    def test_max_intensity_at_least_one(self):
        with pytest.raises(ValueError):
            SamplerConfig(max_intensity=0)

    def test_subtract_requires_threshold_above_max_intensity(self):
        with pytest.raises(ValueError):
            SamplerConfig(threshold=100.0, reset_mode="subtract", max_intensity=255)
        SamplerConfig(threshold=255.0, reset_mode="subtract", max_intensity=255)

    def test_unknown_reset_mode(self):
        with pytest.raises(ValueError):
            SamplerConfig(reset_mode="bounce")


class TestIntegrateTick:
    def test_saturated_fires_every_tick(self):
        for mode in ("drain", "subtract"):
            state = SamplerState(3, 3)
            config = SamplerConfig(reset_mode=mode)
            plane = np.full((3, 3), 255)
            for t in range(10):
                bits = integrate_tick(state, plane, config, tick=t)
                assert bits.all(), f"tick {t} mode {mode}"

    def test_exact_divisor_period_five(self):
        # 51 * 5 = 255 exactly: a spike every fifth tick in either mode
        for mode in ("drain", "subtract"):
            state = SamplerState(2, 2)
            config = SamplerConfig(reset_mode=mode)
            plane = np.full((2, 2), 51)
            fired = [integrate_tick(state, plane, config, t)[0, 0] for t in range(20)]
            assert fired == [0, 0, 0, 0, 1] * 4

    def test_accumulator_below_threshold_after_tick(self):
        rng = np.random.default_rng(7)
        for mode in ("drain", "subtract"):
            state = SamplerState(4, 4)
            config = SamplerConfig(reset_mode=mode)
            for t in range(50):
                plane = rng.integers(0, 256, size=(4, 4))
                integrate_tick(state, plane, config, t)
                assert (state.accumulator < config.threshold).all()
                assert (state.accumulator >= 0).all()

    def test_dimension_mismatch(self):
        state = SamplerState(4, 4)
        with pytest.raises(ValueError, match="shape"):
            integrate_tick(state, np.zeros((3, 4)), SamplerConfig())

    def test_intensity_out_of_range(self):
        state = SamplerState(2, 2)
        with pytest.raises(ValueError, match="intensity"):
            integrate_tick(state, np.full((2, 2), 256), SamplerConfig())
        with pytest.raises(ValueError, match="intensity"):
            integrate_tick(state, np.full((2, 2), -1), SamplerConfig())

    def test_last_fire_tick_updates(self):
        state = SamplerState(1, 1)
        config = SamplerConfig()
        assert state.last_fire_tick[0, 0] == -1
        integrate_tick(state, np.array([[255]]), config, tick=3)
        assert state.last_fire_tick[0, 0] == 3


class TestSampleSequence:
    def test_all_zero_scene_gives_empty_stream(self):
        stream = sample_constant(0, 64)
        assert stream.total_spikes() == 0

    def test_single_pixel_85(self):
        # 85 * 3 = 255: every third tick, zero-based ticks 2, 5, 8, ...
        scene = constant_scene(1, 1, 12, intensity=85)
        stream = sample_sequence(scene)
        assert stream.spike_ticks(0, 0).tolist() == [2, 5, 8, 11]

    def test_drain_250_matches_oracle(self):
        stream = sample_constant(250, 200)
        expected = constant_spike_ticks(250, 200, reset_mode="drain")
        assert stream.spike_ticks(0, 0).tolist() == expected
        assert set(isis_of(expected)) == {2}

    def test_subtract_250_matches_oracle(self):
        stream = sample_constant(250, 200, reset_mode="subtract")
        expected = constant_spike_ticks(250, 200, reset_mode="subtract")
        got = stream.spike_ticks(1, 1).tolist()
        assert got == expected
        # fifty consecutive firings, then a one-tick gap
        assert got[:50] == list(range(1, 51))
        assert 51 not in got
        # long-run rate 250/255
        assert len(got) == int(200 * 250 // 255)

    def test_two_pixel_scene_isis(self):
        values = np.empty((60, 1, 2), dtype=np.uint8)
        values[:, 0, 0] = 51
        values[:, 0, 1] = 102
        scene = SceneSequence(values=values, tick_rate=40000)

        drain = sample_sequence(scene, SamplerConfig(reset_mode="drain"))
        assert set(isis_of(drain.spike_ticks(0, 0).tolist())) == {5}
        assert set(isis_of(drain.spike_ticks(1, 0).tolist())) == {3}

        sub = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
        assert set(isis_of(sub.spike_ticks(0, 0).tolist())) == {5}
        assert set(isis_of(sub.spike_ticks(1, 0).tolist())) == {2, 3}
        n = len(sub.spike_ticks(1, 0))
        assert n in (int(np.floor(60 * 102 / 255)), int(np.ceil(60 * 102 / 255)))

    def test_stream_metadata_matches_scene_and_config(self):
        scene = constant_scene(5, 3, 17, tick_rate=20000, intensity=10)
        config = SamplerConfig(threshold=100.0, reset_mode="subtract", max_intensity=99)
        stream = sample_sequence(scene, config)
        assert (stream.width, stream.height) == (5, 3)
        assert stream.num_ticks == 17
        assert stream.tick_rate == 20000
        assert stream.reset_mode == "subtract"
        assert stream.threshold == 100.0

    def test_determinism(self):
        scene = constant_scene(4, 4, 128, intensity=77)
        a = sample_sequence(scene)
        b = sample_sequence(scene)
        assert a == b

    @given(intensity=st.integers(min_value=1, max_value=255))
    @settings(max_examples=25, deadline=None)
    def test_rate_law_subtract(self, intensity):
        num_ticks = 512
        stream = sample_constant(intensity, num_ticks, reset_mode="subtract",
                                 width=1, height=1)
        count = len(stream.spike_ticks(0, 0))
        exact = num_ticks * intensity / 255
        assert count in (int(np.floor(exact)), int(np.ceil(exact)))

    @given(pair=st.tuples(st.integers(1, 255), st.integers(1, 255)))
    @settings(max_examples=25, deadline=None)
    def test_monotonicity_in_intensity(self, pair):
        lo, hi = min(pair), max(pair)
        for mode in ("drain", "subtract"):
            s_lo = sample_constant(lo, 300, reset_mode=mode, width=1, height=1)
            s_hi = sample_constant(hi, 300, reset_mode=mode, width=1, height=1)
            assert s_lo.total_spikes() <= s_hi.total_spikes()
            isis_lo = isis_of(s_lo.spike_ticks(0, 0).tolist())
            isis_hi = isis_of(s_hi.spike_ticks(0, 0).tolist())
            if isis_lo and isis_hi:
                assert max(isis_hi) <= max(isis_lo) or min(isis_hi) <= min(isis_lo)

    def test_exact_divisors_invert_exactly(self):
        for intensity in (1, 3, 5, 15, 17, 51, 85, 255):
            for mode in ("drain", "subtract"):
                stream = sample_constant(intensity, 600, reset_mode=mode,
                                         width=1, height=1)
                isis = isis_of(stream.spike_ticks(0, 0).tolist())
                assert set(isis) == {255 // intensity}
                assert estimate_intensity(isis[0], 255.0) == intensity


class TestEstimateIntensity:
    def test_unit_interval(self):
        assert estimate_intensity(1, 255.0) == 255.0

    def test_direct_evaluation(self):
        assert estimate_intensity(5, 255.0) == 51.0

    def test_zero_interval_rejected(self):
        with pytest.raises(ValueError):
            estimate_intensity(0, 255.0)

    def test_array_input(self):
        out = estimate_intensity(np.array([1, 5, 255]), 255.0)
        assert out.tolist() == [255.0, 51.0, 1.0]
