"""spikectl: command-line pipelines over spike streams.

Subcommands: simulate (scene -> .spks), reconstruct (.spks -> PGM frames),
events (.spks -> CSV / event frames), stats (ISI histograms), bench
(throughput report), info (header summary).

Every flag can also be supplied through a plain-text config file of
``key=value`` lines (``--config``); explicit flags win over the file.
Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

import argparse
import os
import statistics
import sys
import time

from .analysis import isi_histogram, pixel_isis, pooled_isis, two_cluster_split
from .events import render_event_frames, spikes_to_events, write_events_csv
from .pgm import write_pgm
from .reconstruct import TfaConfig, TfaState, gamma_encode, tfa_step, tfa_texture, tfi_frame, tfp_frame
from .sampler import SamplerConfig, sample_sequence
from .scenes import SceneSpec, generate
from .stream import load_stream, plane_byte_size, save_stream


class UsageError(Exception):
    pass


def _load_config(path):
    settings = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        settings[key.strip().replace("-", "_")] = value.strip()
    return settings


def _parse_bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def _resolve(args, defaults):
    """Fill unset flags from the config file, then from hard defaults."""
    settings = _load_config(args.config) if args.config else {}
    for key, (default, convert) in defaults.items():
        if getattr(args, key, None) is None:
            if key in settings:
                raw = settings[key]
                try:
                    value = convert(raw)
                except UsageError:
                    raise
                except (TypeError, ValueError):
                    raise UsageError(f"config key {key}: cannot parse {raw!r}")
                setattr(args, key, value)
            else:
                setattr(args, key, default)
    unknown = set(settings) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")


def _frame_path(out_dir, tick, prefix="frame"):
    return os.path.join(out_dir, f"{prefix}_{tick:07d}.pgm")


def _geometry_line(stream):
    return (
        f"{stream.width}x{stream.height} @ {stream.tick_rate} Hz, "
        f"{stream.num_ticks} ticks"
    )


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIMULATE_DEFAULTS = {
    "scene": ("constant", str),
    "width": (64, int),
    "height": (64, int),
    "ticks": (1024, int),
    "tick_rate": (40000, int),
    "threshold": (255.0, float),
    "reset_mode": ("drain", str),
    "max_intensity": (255, int),
    "intensity": (128, int),
    "before": (64, int),
    "after": (192, int),
    "step_tick": (None, int),
    "bar_width": (8, int),
    "bar_speed": (0.5, float),
    "bar_intensity": (200, int),
    "background": (None, int),
    "rpm": (2000.0, float),
    "pattern_intensity": (200, int),
    "disc_intensity": (50, int),
    "radius": (None, float),
    "interp": ("hold", str),
    "ticks_per_frame": (1, int),
}


def cmd_simulate(args):
    _resolve(args, _SIMULATE_DEFAULTS)
    params = {}
    if args.scene == "constant":
        params["intensity"] = args.intensity
    elif args.scene == "step":
        params.update(before=args.before, after=args.after, step_tick=args.step_tick)
    elif args.scene == "moving_bar":
        params.update(
            bar_width=args.bar_width,
            speed=args.bar_speed,
            bar_intensity=args.bar_intensity,
        )
        if args.background is not None:
            params["background"] = args.background
    elif args.scene == "spinning_disc":
        params.update(
            rpm=args.rpm,
            pattern_intensity=args.pattern_intensity,
            disc_intensity=args.disc_intensity,
        )
        if args.background is not None:
            params["background"] = args.background
        if args.radius is not None:
            params["radius"] = args.radius
    elif args.scene == "image_sequence":
        if not args.images:
            raise UsageError("--images is required for the image_sequence scene")
        params.update(
            paths=args.images,
            interpolation=args.interp,
            ticks_per_frame=args.ticks_per_frame,
        )
    else:
        raise UsageError(f"unknown scene variant {args.scene!r}")

    spec = SceneSpec(
        variant=args.scene,
        width=args.width,
        height=args.height,
        num_ticks=args.ticks,
        tick_rate=args.tick_rate,
        params=params,
    )
    scene = generate(spec)
    config = SamplerConfig(
        threshold=args.threshold,
        reset_mode=args.reset_mode,
        max_intensity=args.max_intensity,
    )
    stream = sample_sequence(scene, config)
    save_stream(stream, args.out)
    print(f"{_geometry_line(stream)}, {stream.total_spikes()} spikes")
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

_RECONSTRUCT_DEFAULTS = {
    "method": (None, str),
    "window": (None, int),
    "gamma": (None, float),
    "dynamic_range": (255, int),
    "every": (None, int),
    "out_dir": (".", str),
    "tau": (8.0, float),
    "adapt_window": (256, int),
    "initial_threshold": (1.0, float),
    "count_source": ("output", str),
}


def cmd_reconstruct(args):
    _resolve(args, _RECONSTRUCT_DEFAULTS)
    if args.method not in ("tfi", "tfp", "tfa"):
        raise UsageError("--method must be one of tfi, tfp, tfa")
    if args.method == "tfp" and args.window is None:
        raise UsageError("--window is required for --method tfp")
    stream = load_stream(args.stream)
    if args.at:
        ticks = sorted(set(args.at))
    elif args.every:
        ticks = list(range(args.every - 1, stream.num_ticks, args.every))
    else:
        ticks = [stream.num_ticks - 1]
    for t in ticks:
        if not 0 <= t < stream.num_ticks:
            raise UsageError(f"tick {t} out of range (stream has {stream.num_ticks})")

    # display gamma applies to the interval/count decoders by default; the
    # adaptive texture is already normalized output
    gamma = args.gamma
    if gamma is None:
        gamma = 0.0 if args.method == "tfa" else 2.2

    os.makedirs(args.out_dir, exist_ok=True)
    C = args.dynamic_range
    if args.method == "tfa":
        config = TfaConfig(
            tau=args.tau,
            count_window=args.adapt_window,
            initial_threshold=args.initial_threshold,
            count_source=args.count_source,
        )
        state = TfaState(stream.width, stream.height, config)
        remaining = list(ticks)
        for t in range(max(ticks) + 1):
            tfa_step(state, stream.bits(t))
            if remaining and t == remaining[0]:
                remaining.pop(0)
                _write_frame(tfa_texture(state, C), C, gamma, args.out_dir, t)
    else:
        for t in ticks:
            if args.method == "tfi":
                frame = tfi_frame(stream, t, C)
            else:
                frame = tfp_frame(stream, t, args.window, C)
            _write_frame(frame, C, gamma, args.out_dir, t)
    print(f"wrote {len(ticks)} frame(s) to {args.out_dir}")
    return 0


def _write_frame(frame, dynamic_range, gamma, out_dir, tick):
    if gamma:
        frame = gamma_encode(frame, dynamic_range, gamma)
    write_pgm(frame, _frame_path(out_dir, tick), maxval=max(dynamic_range, 1))


# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------

_EVENTS_DEFAULTS = {
    "theta": (0.3, float),
    "out": ("events.csv", str),
    "render_dir": (None, str),
    "bin_size": (None, int),
}


def cmd_events(args):
    _resolve(args, _EVENTS_DEFAULTS)
    stream = load_stream(args.stream)
    events = spikes_to_events(stream, args.theta)
    with open(args.out, "w") as fh:
        write_events_csv(events, fh)
    print(f"{events.size} events -> {args.out}")
    if args.render_dir:
        os.makedirs(args.render_dir, exist_ok=True)
        bin_size = args.bin_size or 1
        n = 0
        for start, frame in render_event_frames(
            events, stream.width, stream.height, stream.num_ticks, bin_size
        ):
            write_pgm(frame, _frame_path(args.render_dir, start, prefix="events"))
            n += 1
        print(f"wrote {n} event frame(s) to {args.render_dir}")
    return 0


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------

_STATS_DEFAULTS = {
    "pixel": (None, str),
    "region": (None, str),
    "out": (None, str),
    "split": (False, _parse_bool),
}


def cmd_stats(args):
    _resolve(args, _STATS_DEFAULTS)
    stream = load_stream(args.stream)
    if args.pixel and args.region:
        raise UsageError("--pixel and --region are mutually exclusive")
    if args.pixel:
        try:
            x, y = (int(v) for v in args.pixel.split(","))
        except ValueError:
            raise UsageError(f"--pixel expects X,Y, got {args.pixel!r}")
        isis = pixel_isis(stream, x, y)
    else:
        region = None
        if args.region:
            try:
                region = tuple(int(v) for v in args.region.split(","))
                assert len(region) == 4
            except (ValueError, AssertionError):
                raise UsageError(f"--region expects X0,Y0,X1,Y1, got {args.region!r}")
        isis = pooled_isis(stream, region)
    values, counts = isi_histogram(isis)
    lines = ["isi,count"] + [f"{v},{c}" for v, c in zip(values, counts)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"{isis.size} intervals -> {args.out}")
    else:
        sys.stdout.write(text)
    if args.split:
        split = two_cluster_split(isis)
        if split is None:
            print("split: not enough distinct intervals")
        else:
            print(
                f"split: isi <= {split.threshold:.0f} | "
                f"fast cluster mean {split.lower_mean:.2f} (n={split.lower_count}), "
                f"slow cluster mean {split.upper_mean:.2f} (n={split.upper_count})"
            )
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

_BENCH_DEFAULTS = {
    "method": ("tfi", str),
    "window": (512, int),
    "every": (512, int),
    "repeat": (5, int),
}


def cmd_bench(args):
    _resolve(args, _BENCH_DEFAULTS)
    if args.method not in ("tfi", "tfp"):
        raise UsageError("--method must be tfi or tfp")
    if args.repeat < 1:
        raise UsageError("--repeat must be >= 1")

    load_times = []
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        stream = load_stream(args.stream)
        load_times.append(time.perf_counter() - t0)
    ticks = list(range(args.every - 1, stream.num_ticks, args.every)) or [
        stream.num_ticks - 1
    ]

    def decode_all():
        for t in ticks:
            if args.method == "tfi":
                tfi_frame(stream, t)
            else:
                tfp_frame(stream, t, args.window)

    decode_all()  # warm up JIT compilation before timing
    decode_times = []
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        decode_all()
        decode_times.append(time.perf_counter() - t0)

    load_s = statistics.median(load_times)
    decode_s = statistics.median(decode_times)
    ingest_rate = stream.num_ticks / load_s
    decode_rate = stream.num_ticks / decode_s
    frame_rate = len(ticks) / decode_s
    pipeline_rate = stream.num_ticks / (load_s + decode_s)

    print(f"stream: {_geometry_line(stream)} ({stream.plane_bytes} bytes/tick)")
    suffix = f" window={args.window}" if args.method == "tfp" else ""
    print(f"method: {args.method}{suffix}, frame every {args.every} ticks, "
          f"median of {args.repeat}")
    print(f"ingest: {stream.num_ticks} ticks in {load_s * 1e3:.1f} ms "
          f"-> {ingest_rate:.0f} ticks/s")
    print(f"decode: {len(ticks)} frame(s) in {decode_s * 1e3:.1f} ms "
          f"-> {frame_rate:.1f} frames/s, {decode_rate:.0f} ticks/s")
    print(f"pipeline: {pipeline_rate:.0f} ticks/s")
    print(f"status: {'REALTIME' if pipeline_rate >= stream.tick_rate else 'BELOW REALTIME'} "
          f"(stream rate {stream.tick_rate} Hz)")
    return 0


# ---------------------------------------------------------------------------
# info
# ---------------------------------------------------------------------------


def cmd_info(args):
    stream = load_stream(args.stream)
    print(_geometry_line(stream))
    print(f"reset mode: {stream.reset_mode}")
    print(f"threshold: {stream.threshold}")
    print(f"{plane_byte_size(stream.width, stream.height)} bytes/tick")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spikectl",
        description="Simulate, decode, and analyze spike-camera streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a scene and sample it to a .spks file")
    p.add_argument("--out", required=True, help="output .spks path")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--scene", choices=("constant", "step", "moving_bar",
                                       "spinning_disc", "image_sequence"))
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--ticks", type=int)
    p.add_argument("--tick-rate", type=int, dest="tick_rate")
    p.add_argument("--threshold", type=float, help="dispatch threshold")
    p.add_argument("--reset-mode", choices=("drain", "subtract"), dest="reset_mode")
    p.add_argument("--max-intensity", type=int, dest="max_intensity")
    p.add_argument("--intensity", type=int, help="constant scene intensity")
    p.add_argument("--before", type=int, help="step scene: intensity before the step")
    p.add_argument("--after", type=int, help="step scene: intensity after the step")
    p.add_argument("--step-tick", type=int, dest="step_tick")
    p.add_argument("--bar-width", type=int, dest="bar_width")
    p.add_argument("--bar-speed", type=float, dest="bar_speed", help="pixels per tick")
    p.add_argument("--bar-intensity", type=int, dest="bar_intensity")
    p.add_argument("--background", type=int)
    p.add_argument("--rpm", type=float, help="disc revolutions per minute")
    p.add_argument("--pattern-intensity", type=int, dest="pattern_intensity")
    p.add_argument("--disc-intensity", type=int, dest="disc_intensity")
    p.add_argument("--radius", type=float, help="disc radius in pixels")
    p.add_argument("--images", nargs="+", help="PGM files for image_sequence")
    p.add_argument("--interp", choices=("hold", "linear"))
    p.add_argument("--ticks-per-frame", type=int, dest="ticks_per_frame")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="decode texture frames to PGM files")
    p.add_argument("stream", help=".spks input")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--method", choices=("tfi", "tfp", "tfa"))
    p.add_argument("--at", type=int, nargs="+", help="decode at these ticks")
    p.add_argument("--every", type=int, help="decode a frame per N ticks")
    p.add_argument("--window", type=int, help="tfp trailing window in ticks")
    p.add_argument("--gamma", type=float,
                   help="display gamma (0 disables; default 2.2 for tfi/tfp, off for tfa)")
    p.add_argument("-C", "--dynamic-range", type=int, dest="dynamic_range")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--tau", type=float, help="tfa kernel time constant (ticks)")
    p.add_argument("--adapt-window", type=int, dest="adapt_window",
                   help="tfa spike-count window (ticks)")
    p.add_argument("--initial-threshold", type=float, dest="initial_threshold")
    p.add_argument("--count-source", choices=("input", "output"), dest="count_source")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("events", help="convert a stream to DVS-style events")
    p.add_argument("stream")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--theta", type=float, help="log-intensity contrast threshold")
    p.add_argument("--out", help="events CSV path")
    p.add_argument("--render-dir", dest="render_dir", help="write event-frame PGMs here")
    p.add_argument("--bin", type=int, dest="bin_size", help="ticks per event frame")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("stats", help="ISI histograms and cluster splits")
    p.add_argument("stream")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--pixel", help="X,Y single-pixel histogram")
    p.add_argument("--region", help="X0,Y0,X1,Y1 pooled histogram (half-open)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--split", action="store_const", const=True,
                   help="report a two-cluster split of the intervals")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="throughput report")
    p.add_argument("stream")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--method", choices=("tfi", "tfp"))
    p.add_argument("--window", type=int)
    p.add_argument("--every", type=int, help="decode a frame per N ticks")
    p.add_argument("--repeat", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="print stream header summary")
    p.add_argument("stream")
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spikectl: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"spikectl: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
