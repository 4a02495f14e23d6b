"""spikecam: spike-camera simulation and spike-stream texture reconstruction.

Luminance sequences are sampled into per-pixel binary spike streams by an
integrate-and-fire model; the streams decode back into grayscale frames
(interval-based, window-count, or adaptive-threshold) and DVS-style event
streams.
"""

from .analysis import isi_histogram, pixel_isis, pooled_isis, two_cluster_split
from .estimators import (
    EventConverter,
    SpikeSampler,
    TfaReconstructor,
    TfiReconstructor,
    TfpReconstructor,
)
from .events import (
    EVENT_DTYPE,
    POLARITY_OFF,
    POLARITY_ON,
    read_events_csv,
    render_event_frame,
    render_event_frames,
    spikes_to_events,
    write_events_csv,
)
from .pgm import read_pgm, write_pgm
from .reconstruct import (
    TfaConfig,
    TfaState,
    gamma_encode,
    srm_kernel,
    tfa_run,
    tfa_step,
    tfa_texture,
    tfi_frame,
    tfp_frame,
)
from .sampler import (
    SamplerConfig,
    SamplerState,
    estimate_intensity,
    integrate_tick,
    sample_sequence,
)
from .scenes import (
    DiscScene,
    SceneSequence,
    SceneSpec,
    constant_scene,
    generate,
    ingest_images,
    moving_bar_scene,
    spinning_disc_scene,
    step_scene,
)
from .stream import (
    SpikeStream,
    StreamFormatError,
    load_stream,
    plane_byte_size,
    read_stream,
    save_stream,
    write_stream,
)

__version__ = "0.1.0"

__all__ = [
    "EVENT_DTYPE",
    "EventConverter",
    "POLARITY_OFF",
    "POLARITY_ON",
    "SamplerConfig",
    "SamplerState",
    "SceneSequence",
    "SceneSpec",
    "DiscScene",
    "SpikeSampler",
    "SpikeStream",
    "StreamFormatError",
    "TfaConfig",
    "TfaReconstructor",
    "TfaState",
    "TfiReconstructor",
    "TfpReconstructor",
    "constant_scene",
    "estimate_intensity",
    "gamma_encode",
    "generate",
    "ingest_images",
    "integrate_tick",
    "isi_histogram",
    "load_stream",
    "moving_bar_scene",
    "pixel_isis",
    "plane_byte_size",
    "pooled_isis",
    "read_events_csv",
    "read_pgm",
    "read_stream",
    "render_event_frame",
    "render_event_frames",
    "sample_sequence",
    "save_stream",
    "spikes_to_events",
    "spinning_disc_scene",
    "srm_kernel",
    "step_scene",
    "tfa_run",
    "tfa_step",
    "tfa_texture",
    "tfi_frame",
    "tfp_frame",
    "two_cluster_split",
    "write_events_csv",
    "write_pgm",
    "write_stream",
]
