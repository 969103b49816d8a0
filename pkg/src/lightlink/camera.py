"""Rolling-shutter camera model and frame synthesis.

A CMOS sensor exposes rows one after another, each row shifted by the readout
time T_r. A light driven on and off at f cycles per second therefore paints
horizontal bands across its image, one band per on or off half-period, and
the band width in pixels is

    W = 1 / (2 f T_r)

independent of the LED size and of the link distance. With the default clock
(2.5 kHz, T_r = 1/60000 s, i.e. 16.67 us per row) W is exactly 12 px.

The apparent blob diameter in pixels follows thin-lens scaling,

    diameter = gain(iso) * S_r * f_L / (S_p * (D - f_L))

with S_r the LED radius, f_L the focal length, S_p the pixel pitch and D the
link distance. gain(iso) = 1 + kappa * log2(iso / 100) models the growth of
the bright region with film speed; kappa is a simulation knob (default 0.15),
not a measured device constant, and the same caveat applies to the default
pixel pitch. The default focal length of 0.28 mm is the reference system's
documented constant; it is physically odd for this sensor class but kept as
is, override it when you have real optics data.

Frame synthesis reproduces the receiver-side view of a looping transmitter.
Symbols play at 2f per second (a '10' or '01' pair fills one modulation
period), '1' holds the light on for duty/f seconds and '0' holds it off for
(1-duty)/f, so a duty cycle below 50% makes dark bands wider than bright
ones (transmitters drive the signal that way to cancel the LED's slow
turn-off). Pixels near the blob center get an additive overexposure term that
simulates sensor blooming: bands there wash out, which is precisely why the
decoder samples an off-center column. Everything is deterministic for a given
seed and safe to call concurrently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .codec import packet_size

DEFAULT_READOUT_S = 1.0 / 60000.0  # 16.67 us per row


class BlobOutOfFrameError(ValueError):
    """The projected blob circle does not fit inside the frame."""


@dataclass
class CameraParams:
    """Receiver-side sensor description."""

    width_px: int = 1280
    height_px: int = 720
    readout_time_s: float = DEFAULT_READOUT_S
    exposure_time_s: float | None = None  # None means one row time
    iso: int = 100
    pixel_pitch_m: float = 1.55e-6
    focal_length_m: float = 0.28e-3
    iso_gain_kappa: float = 0.15

    def __post_init__(self):
        if self.exposure_time_s is None:
            self.exposure_time_s = self.readout_time_s
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("frame dimensions must be positive")
        if self.readout_time_s <= 0 or self.exposure_time_s <= 0:
            raise ValueError("readout and exposure times must be positive")
        if self.pixel_pitch_m <= 0 or self.focal_length_m <= 0:
            raise ValueError("pixel pitch and focal length must be positive")
        if int(self.iso) < 100:
            raise ValueError("iso must be an integer >= 100")
        self.iso = int(self.iso)


@dataclass
class TxParams:
    """Transmitter-side description: clock, signal duty cycle, LED size."""

    mod_freq_hz: float = 2500.0
    duty_cycle: float = 0.40
    led_radius_m: float = 10.9e-3

    def __post_init__(self):
        if self.mod_freq_hz <= 0:
            raise ValueError("modulation frequency must be positive")
        if not 0.0 < self.duty_cycle < 1.0:
            raise ValueError("duty cycle must lie strictly between 0 and 1")
        if self.led_radius_m <= 0:
            raise ValueError("LED radius must be positive")


@dataclass
class LinkGeometry:
    """Where the LED sits: link distance and blob center in the frame."""

    distance_m: float
    center_px: tuple[float, float] | None = None  # None means frame center

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance must be positive")


def iso_gain(iso, kappa=0.15):
    """Blob-size multiplier for a film-speed setting (1.0 at ISO 100)."""
    return 1.0 + kappa * math.log2(iso / 100.0)


def band_width_px(tx, cam):
    """Band width W = 1/(2 f T_r) in pixels."""
    return 1.0 / (2.0 * tx.mod_freq_hz * cam.readout_time_s)


def expected_blob_diameter_px(geom, tx, cam):
    """Blob diameter predicted by lens scaling plus the ISO gain."""
    f_l = cam.focal_length_m
    if geom.distance_m <= f_l:
        raise ValueError(f"distance {geom.distance_m} m must exceed the focal "
                         f"length {f_l} m")
    gain = iso_gain(cam.iso, cam.iso_gain_kappa)
    return gain * tx.led_radius_m * f_l / (cam.pixel_pitch_m * (geom.distance_m - f_l))


def distance_for_blob_diameter(diameter_px, tx, cam):
    """Link distance at which the blob has the given diameter (model inverse)."""
    if diameter_px <= 0:
        raise ValueError("diameter must be positive")
    gain = iso_gain(cam.iso, cam.iso_gain_kappa)
    f_l = cam.focal_length_m
    return f_l + gain * tx.led_radius_m * f_l / (cam.pixel_pitch_m * diameter_px)


def decodability_bound_px(n_bits, tx, cam):
    """Minimum blob extent (pixels) that carries one complete packet."""
    return band_width_px(tx, cam) * packet_size(n_bits)


def _waveform_tables(stream, tx):
    """Per-symbol duration/edge tables for the looping on-off waveform.

    One modulation period 1/f carries an on-off symbol pair, so the nominal
    symbol duration is 1/(2f) and each symbol spans W sensor rows. The duty
    cycle splits the pair period: a '1' holds the light on for duty/f seconds
    and a '0' holds it off for (1-duty)/f.
    """
    syms = np.asarray(stream, dtype=np.uint8).ravel()
    if syms.size == 0:
        raise ValueError("symbol stream must be non-empty")
    pair = 1.0 / tx.mod_freq_hz
    dur = np.where(syms == 1, tx.duty_cycle, 1.0 - tx.duty_cycle) * pair
    edges = np.concatenate([[0.0], np.cumsum(dur)])
    on_before = np.concatenate([[0.0], np.cumsum(dur * (syms == 1))])
    return syms, edges, on_before


def _on_time(t, syms, edges, on_before):
    """Total light-on time in [0, t) for the cyclic waveform (vectorized)."""
    period = edges[-1]
    on_total = on_before[-1]
    k, tau = np.divmod(t, period)
    idx = np.clip(np.searchsorted(edges, tau, side="right") - 1, 0, syms.size - 1)
    partial = on_before[idx] + np.where(syms[idx] == 1, tau - edges[idx], 0.0)
    return k * on_total + partial


def synthesize_frame(stream, geom, tx, cam, noise_sigma=0.0, seed=0,
                     dark_level=10.0, bloom_offset=250.0, falloff="none",
                     phase_symbols=0.0):
    """Render one rolling-shutter frame of the looping transmission.

    The whole frame starts from the sensor pedestal, dark_level plus Gaussian
    noise of standard deviation noise_sigma * iso/100, so a light that never
    turns on leaves nothing but background. Row r integrates light over
    [r*T_r, r*T_r + exposure]; inside the blob circle, 255 times the fraction
    of that window during which the light was on (times an optional cosine
    falloff) is added on top. Pixels closer to the blob center than half the
    radius additionally get bloom_offset added, modeling overexposure that
    washes out the band structure there; the term is skipped when the stream
    never emits (no light, no overexposure) and 0 disables it entirely.
    phase_symbols shifts the waveform start, in nominal symbol periods, to
    model the random capture instant. Output is bit-identical for identical
    inputs and seed.
    """
    if falloff not in ("none", "cosine"):
        raise ValueError("falloff must be 'none' or 'cosine'")
    syms, edges, on_before = _waveform_tables(stream, tx)

    h, w = cam.height_px, cam.width_px
    diameter = expected_blob_diameter_px(geom, tx, cam)
    radius = diameter / 2.0
    cx, cy = geom.center_px if geom.center_px is not None else ((w - 1) / 2.0, (h - 1) / 2.0)
    if cx - radius < 0 or cy - radius < 0 or cx + radius > w - 1 or cy + radius > h - 1:
        raise BlobOutOfFrameError(
            f"blob diameter {diameter:.1f} px at ({cx:.0f}, {cy:.0f}) exceeds "
            f"the {w}x{h} frame")

    rng = np.random.default_rng(seed)
    frame = np.full((h, w), float(dark_level))
    if noise_sigma > 0:
        frame += rng.normal(0.0, noise_sigma * (cam.iso / 100.0), size=(h, w))

    # On-fraction per row over the exposure window, phase-shifted.
    t_off = phase_symbols / (2.0 * tx.mod_freq_hz)
    y0 = int(math.ceil(cy - radius))
    y1 = int(math.floor(cy + radius))
    rows = np.arange(y0, y1 + 1)
    t_start = rows * cam.readout_time_s + t_off
    exposure = cam.exposure_time_s
    frac = (_on_time(t_start + exposure, syms, edges, on_before)
            - _on_time(t_start, syms, edges, on_before)) / exposure

    x0 = int(math.ceil(cx - radius))
    x1 = int(math.floor(cx + radius))
    xs = np.arange(x0, x1 + 1)
    dist2 = (xs[None, :] - cx) ** 2 + (rows[:, None] - cy) ** 2
    inside = dist2 <= radius * radius

    patch = 255.0 * frac[:, None] * np.ones_like(dist2)
    if falloff == "cosine":
        ratio = np.sqrt(np.minimum(dist2, radius * radius)) / radius
        patch *= np.cos(0.5 * np.pi * ratio)
    if bloom_offset and syms.any():
        patch += np.where(dist2 < (radius / 2.0) ** 2, float(bloom_offset), 0.0)

    region = frame[y0:y1 + 1, x0:x1 + 1]
    region[inside] += patch[inside]
    return np.clip(np.rint(frame), 0, 255).astype(np.uint8)
