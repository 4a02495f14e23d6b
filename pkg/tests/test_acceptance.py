"""Acceptance suite: one test per release criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
PASS/FAIL lines.  Criterion 10 is a throughput goal measured on the host.
"""

import contextlib
import io
import time

import numpy as np
import pytest

from spikecam import (
    SamplerConfig,
    SpikeStream,
    TfaConfig,
    constant_scene,
    load_stream,
    pooled_isis,
    read_stream,
    sample_sequence,
    save_stream,
    spikes_to_events,
    spinning_disc_scene,
    step_scene,
    tfa_run,
    tfa_texture,
    tfi_frame,
    tfp_frame,
    two_cluster_split,
    write_stream,
)
from spikecam.cli import main as spikectl
from spikecam.scenes import SceneSequence

from oracles import constant_spike_ticks

DIVISORS = (1, 3, 5, 15, 17, 51, 85, 255)


@contextlib.contextmanager
def criterion(label):
    try:
        yield
    except Exception:
        print(f"[FAIL] {label}")
        raise
    print(f"[PASS] {label}")


def segment_isis(stream):
    """All per-pixel ISIs of a stream plus per-pixel spike counts."""
    indptr, _ = stream.spike_index()
    return pooled_isis(stream), np.diff(indptr)


@pytest.fixture(scope="module")
def random_intensities():
    rng = np.random.default_rng(20250809)
    return rng.integers(1, 256, size=20).tolist()


@pytest.fixture(scope="module")
def subtract_streams(random_intensities):
    streams = {}
    for intensity in random_intensities:
        scene = constant_scene(8, 8, 4096, intensity=intensity)
        streams[intensity] = sample_sequence(
            scene, SamplerConfig(reset_mode="subtract")
        )
    return streams


def test_c01_sampler_exactness_and_tfi_inversion():
    with criterion("C1 sampler exactness + exact TFI inversion (< 1 s)"):
        start = time.perf_counter()
        for intensity in DIVISORS:
            expected_isi = 255 // intensity
            for mode in ("drain", "subtract"):
                scene = constant_scene(32, 32, 1024, intensity=intensity)
                stream = sample_sequence(scene, SamplerConfig(reset_mode=mode))
                isis, counts = segment_isis(stream)
                assert (counts >= 2).all(), "every pixel needs two spikes"
                assert (isis == expected_isi).all(), (intensity, mode)
                frame = tfi_frame(stream, 1023)
                assert (frame == intensity).all(), (intensity, mode)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.2f} s"


def test_c02_rate_law(random_intensities, subtract_streams):
    with criterion("C2 subtract-mode rate law over 4096 ticks (< 5 s)"):
        start = time.perf_counter()
        for intensity in random_intensities:
            stream = subtract_streams[intensity]
            counts = stream.count_window_frame(4095, 4096)
            exact = 4096 * intensity / 255
            lo, hi = int(np.floor(exact)), int(np.ceil(exact))
            assert counts.min() >= lo and counts.max() <= hi, intensity
            oracle = len(constant_spike_ticks(intensity, 4096, reset_mode="subtract"))
            assert lo <= oracle <= hi
            assert (counts == oracle).all(), intensity
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.2f} s"


def test_c03_tfp_error_bound(random_intensities, subtract_streams):
    bound = 255 * 2 / 512 + 0.5
    with criterion(f"C3 TFP |error| <= {bound:.2f} gray at w=512"):
        for intensity in random_intensities:
            frame = tfp_frame(subtract_streams[intensity], 4095, 512)
            err = np.abs(frame.astype(np.float64) - intensity).max()
            assert err <= bound, (intensity, err)


def test_c04_tfp_window_tradeoff():
    with criterion("C4 TFP settling time nondecreasing in w for 32..512"):
        scene = step_scene(4, 4, 4096, before=64, after=192, step_tick=1024)
        stream = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
        settle = {}
        for w in (32, 64, 128, 256, 512):
            found = None
            for t in range(1024, 4096):
                value = int(tfp_frame(stream, t, w)[0, 0])
                if abs(value - 192) <= 1:
                    found = t
                    break
            assert found is not None, f"w={w} never settled"
            settle[w] = found - 1024
        times = [settle[w] for w in (32, 64, 128, 256, 512)]
        assert times == sorted(times), settle


def test_c05_tfa_convergence():
    with criterion("C5 TFA threshold convergence by tick 500 (p2p <= 5%)"):
        for intensity in (32, 128, 224):
            scene = constant_scene(2, 2, 1000, intensity=intensity)
            stream = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
            _, traces = tfa_run(stream, TfaConfig(), trace_pixels=[(0, 0)])
            segment = traces[500:1000, 0]
            p2p = segment.max() - segment.min()
            assert p2p <= 0.05 * segment.mean(), (intensity, p2p, segment.mean())


def test_c06_tfa_ordering_and_texture():
    with criterion("C6 TFA thresholds and texture strictly ordered by intensity"):
        means = {}
        for intensity in (32, 128, 224):
            scene = constant_scene(2, 2, 1000, intensity=intensity)
            stream = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
            _, traces = tfa_run(stream, TfaConfig(), trace_pixels=[(0, 0)])
            means[intensity] = traces[500:1000, 0].mean()
        assert means[32] < means[128] < means[224], means

        values = np.empty((2000, 16, 48), dtype=np.uint8)
        values[:, :, :16] = 32
        values[:, :, 16:32] = 128
        values[:, :, 32:] = 224
        scene = SceneSequence(values=values, tick_rate=40000)
        stream = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
        state, _ = tfa_run(stream, TfaConfig())
        texture = tfa_texture(state)
        g1 = np.unique(texture[:, :16])
        g2 = np.unique(texture[:, 16:32])
        g3 = np.unique(texture[:, 32:])
        assert g1.size == g2.size == g3.size == 1, "regions must be uniform"
        assert g1[0] < g2[0] < g3[0], (g1, g2, g3)


def test_c07_event_correctness():
    with criterion("C7 events: static silent, step -> one On/Off per pixel"):
        static = sample_sequence(
            constant_scene(32, 32, 512, intensity=128),
            SamplerConfig(reset_mode="drain"),
        )
        assert spikes_to_events(static, 0.3).size == 0

        ticks64 = constant_spike_ticks(64, 64)
        ticks192 = constant_spike_ticks(192, 64)
        pre_isi = max(ticks64[1] - ticks64[0], ticks192[1] - ticks192[0])
        for before, after, polarity in ((64, 192, 1), (192, 64, -1)):
            scene = step_scene(32, 32, 1024, before=before, after=after,
                               step_tick=256)
            stream = sample_sequence(scene, SamplerConfig(reset_mode="drain"))
            events = spikes_to_events(stream, 0.3)
            assert events.size == 32 * 32, f"{before}->{after}: {events.size}"
            coords = {(int(e["x"]), int(e["y"])) for e in events}
            assert len(coords) == 32 * 32
            assert (events["polarity"] == polarity).all()
            slack = 2 * max(pre_isi, 4)
            assert (events["tick"] >= 256).all()
            assert (events["tick"] <= 256 + slack).all()


def test_c08_disc_isi_bimodality():
    with criterion("C8 spinning-disc ISI bimodality, split agreement >= 99%"):
        scene = spinning_disc_scene(
            128, 128, 1500, tick_rate=20000, rpm=2000,
            pattern_intensity=200, disc_intensity=50, background=0,
        )
        stream = sample_sequence(scene, SamplerConfig(reset_mode="drain"))
        isis, _ = segment_isis(stream)
        assert isis.size > 10_000

        values, counts = np.unique(isis, return_counts=True)
        top2 = values[np.argsort(counts)[-2:]]
        assert set(top2.tolist()) == {2, 6}, "modes at pattern/disc intervals"
        mass = counts[np.isin(values, top2)].sum() / counts.sum()
        assert mass >= 0.90, mass
        assert (counts[values == 2] / counts.sum()) >= 0.10
        assert (counts[values == 6] / counts.sum()) >= 0.10

        split = two_cluster_split(isis)
        assert 2 <= split.threshold < 6, split

        # per-interval classification against the generator's ground truth,
        # skipping intervals that straddle an intensity transition
        pattern = scene.values == 200
        changed = scene.values[1:] != scene.values[:-1]
        cum_changes = np.zeros(scene.values.shape, dtype=np.int32)
        np.cumsum(changed, axis=0, out=cum_changes[1:])

        indptr, ticks = stream.spike_index()
        pixel_of = np.repeat(
            np.arange(stream.num_pixels, dtype=np.int64), np.diff(indptr)
        )
        diffs = np.diff(ticks)
        valid = np.ones(diffs.shape[0], dtype=bool)
        boundaries = indptr[1:-1] - 1
        boundaries = boundaries[(boundaries >= 0) & (boundaries < diffs.shape[0])]
        valid[boundaries] = False

        cur = ticks[1:][valid]
        prev = ticks[:-1][valid]
        isi = diffs[valid]
        ys = (pixel_of[1:][valid] // stream.width).astype(np.int64)
        xs = (pixel_of[1:][valid] % stream.width).astype(np.int64)
        straddles = cum_changes[cur, ys, xs] - cum_changes[prev, ys, xs] > 0
        truth = pattern[cur, ys, xs]
        predicted = isi <= split.threshold
        agreement = (predicted[~straddles] == truth[~straddles]).mean()
        assert agreement >= 0.99, agreement


def test_c09_codec_round_trip(tmp_path, capsys):
    with criterion("C9 codec: 100 random streams bit-exact, 12500 bytes/tick"):
        rng = np.random.default_rng(42)
        for _ in range(100):
            width = int(rng.integers(1, 401))
            height = int(rng.integers(1, 251))
            max_ticks = max(1, min(256, 4_000_000 // (width * height)))
            num_ticks = int(rng.integers(0, max_ticks + 1))
            bits = (
                rng.random((num_ticks, height, width)) < rng.random()
            ).astype(np.uint8)
            stream = SpikeStream.from_bits(
                bits,
                tick_rate=int(rng.integers(1, 100_000)),
                reset_mode=str(rng.choice(["drain", "subtract"])),
                threshold=float(rng.integers(1, 2000)),
            )
            buf = io.BytesIO()
            write_stream(stream, buf)
            assert read_stream(io.BytesIO(buf.getvalue())) == stream

        table1 = SpikeStream.from_bits(
            np.zeros((4, 250, 400), dtype=np.uint8), tick_rate=40000
        )
        path = tmp_path / "table1.spks"
        save_stream(table1, path)
        assert spikectl(["info", str(path)]) == 0
        out = capsys.readouterr().out
        assert "400x250 @ 40000 Hz, 4 ticks" in out
        assert "12500 bytes/tick" in out


@pytest.fixture(scope="module")
def throughput_stream(tmp_path_factory):
    scene = constant_scene(400, 250, 4096, intensity=128)
    stream = sample_sequence(scene, SamplerConfig(reset_mode="subtract"))
    path = tmp_path_factory.mktemp("bench") / "big.spks"
    save_stream(stream, path)
    return stream, path


def test_c10_throughput(throughput_stream, capsys):
    with criterion("C10 throughput: TFP frame < 10 ms, pipeline >= 40k ticks/s"):
        stream, path = throughput_stream

        # Best-of-N timing: the minimum bounds the decoder's true cost;
        # larger samples on a shared machine reflect scheduler interference,
        # not the operation being measured.
        tfp_frame(stream, 4095, 512)  # JIT warm-up
        samples = []
        for _ in range(9):
            t0 = time.perf_counter()
            tfp_frame(stream, 4095, 512)
            samples.append(time.perf_counter() - t0)
        tfp_ms = min(samples) * 1e3
        print(f"  tfp single frame: {tfp_ms:.2f} ms")
        assert tfp_ms < 10.0, f"TFP frame took {tfp_ms:.2f} ms"

        tfi_frame(load_stream(path), 4095)  # JIT warm-up on a loaded stream
        rates = []
        for _ in range(5):
            t0 = time.perf_counter()
            loaded = load_stream(path)
            for t in range(511, 4096, 512):
                tfi_frame(loaded, t)
            rates.append(4096 / (time.perf_counter() - t0))
        rate = max(rates)
        print(f"  ingest + TFI decode: {rate:.0f} ticks/s")
        assert rate >= 40_000, f"{rate:.0f} ticks/s"

        assert spikectl(["bench", str(path), "--method", "tfi",
                         "--every", "512", "--repeat", "5"]) == 0
        out = capsys.readouterr().out
        assert "status: REALTIME" in out, out
