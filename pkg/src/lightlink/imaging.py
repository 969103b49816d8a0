"""Receiver-side image pipeline: from a raw frame to decoded payloads.

The stages run in a fixed order:

    contrast_stretch -> box_blur_3x3 -> adaptive_threshold -> detect_blobs
        -> extract_column (on the thresholded image) -> column_to_symbols

Band structure survives thresholding because the adaptive threshold compares
each pixel against its local block mean, while flat regions (background, or
the washed-out bloom core of an overexposed blob) fall below the mean plus
margin and binarize dark. detect_blobs then closes the bands vertically so a
striped blob labels as one region. Decoding samples a single pixel column at
half the blob radius off center: the center column runs through the bloom
core where bands are unreadable, the offset column does not.

Frames are 2-D uint8 arrays. No function mutates its input; everything is
safe to use concurrently on distinct frames.
"""

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .codec import (DEFAULT_FRAMING, DEFAULT_PAYLOAD_BITS, NoPacketError,
                    parse_packet)


class ImagingError(ValueError):
    """Base class for pipeline errors."""


class FrameTooSmallError(ImagingError):
    """Frame is smaller than the operation's kernel."""


class OffsetOutsideBlobError(ImagingError):
    """The requested sampling column misses the blob circle."""


class ColumnTooShortError(ImagingError):
    """Too few samples in the column to carry any band structure."""


class NoTransitionsError(ImagingError):
    """The column is constant (or only fragments), nothing to decode."""


class DegenerateRangeWarning(UserWarning):
    """Contrast stretch found no dynamic range and returned the frame as is."""


@dataclass
class Blob:
    """A detected light region: centroid and max-distance radius, in pixels."""

    center_x: float
    center_y: float
    radius_px: float


def contrast_stretch(frame, lo_pct=2.0, hi_pct=98.0):
    """Linearly remap the lo/hi intensity percentiles to 0/255, clipping.

    A frame with no spread between the two percentiles is returned unchanged
    and a DegenerateRangeWarning is issued.
    """
    if not 0.0 <= lo_pct < hi_pct <= 100.0:
        raise ValueError("need 0 <= lo_pct < hi_pct <= 100")
    arr = np.asarray(frame)
    lo = float(np.percentile(arr, lo_pct))
    hi = float(np.percentile(arr, hi_pct))
    if hi <= lo:
        warnings.warn("no dynamic range between percentiles, frame unchanged",
                      DegenerateRangeWarning, stacklevel=2)
        return arr.copy()
    scaled = (arr.astype(np.float64) - lo) * (255.0 / (hi - lo))
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)


def box_blur_3x3(frame):
    """Mean filter with a 3x3 kernel, replicated edges, rounded result."""
    arr = np.asarray(frame)
    if arr.shape[0] < 3 or arr.shape[1] < 3:
        raise FrameTooSmallError("box blur needs at least a 3x3 frame")
    blurred = ndimage.uniform_filter(arr.astype(np.float64), size=3, mode="nearest")
    return np.clip(np.rint(blurred), 0, 255).astype(np.uint8)


def adaptive_threshold(frame, block=15, c=5.0):
    """Binarize against the local block mean: 255 where pixel > mean - c.

    Note the sign: positive c lowers the threshold below the local mean, so a
    perfectly flat frame binarizes to all 255. The decode pipeline drives
    this with a negative c (threshold above the mean) so that flat background
    goes dark and only locally bright band structure survives.
    """
    if block < 3 or block % 2 == 0:
        raise ValueError("block must be an odd integer >= 3")
    arr = np.asarray(frame)
    mean = ndimage.uniform_filter(arr.astype(np.float64), size=block, mode="nearest")
    return np.where(arr > mean - c, 255, 0).astype(np.uint8)


def detect_blobs(binary, w_px, min_area_px=None):
    """Find light regions in a thresholded frame.

    Noise clutter is removed first with a horizontal morphological opening
    about one band wide: real bands span the whole blob chord, while noise
    specks (and the vertical chains the closing would otherwise build out of
    them, inflating the measured extent) are only a few pixels wide and
    vanish. Bands are then merged with a vertical closing tall enough to
    bridge the widest dark gap a packet produces (the closing element is
    2*ceil(2*W)+1 rows). 8-connected components of the closed image smaller
    than min_area_px (default (2*W)^2) are dropped. Each surviving component
    yields a Blob at its centroid whose radius is the maximum
    centroid-to-pixel distance, a measure that stays accurate on banded discs
    because band ends lie on the blob's circumference. Blobs come back sorted
    by descending area.
    """
    if w_px < 1:
        raise ValueError("band width must be >= 1 px")
    if min_area_px is None:
        min_area_px = int(round((2.0 * w_px) ** 2))
    fg = (np.asarray(binary) > 0)

    k = 2 * math.ceil(2.0 * w_px) + 1
    k_open = 2 * math.ceil(w_px / 2.0) + 1
    eroded = ndimage.minimum_filter1d(fg, size=k_open, axis=1,
                                      mode="constant", cval=False)
    opened = ndimage.maximum_filter1d(eroded, size=k_open, axis=1,
                                      mode="constant", cval=False)
    padded = np.pad(opened, ((k, k), (0, 0)))
    dilated = ndimage.maximum_filter1d(padded, size=k, axis=0)
    closed = ndimage.minimum_filter1d(dilated, size=k, axis=0)[k:-k]

    labels, n = ndimage.label(closed, structure=np.ones((3, 3), dtype=int))
    blobs = []
    for sl, idx in zip(ndimage.find_objects(labels), range(1, n + 1)):
        ys, xs = np.nonzero(labels[sl] == idx)
        area = ys.size
        if area < min_area_px:
            continue
        ys = ys + sl[0].start
        xs = xs + sl[1].start
        cy = float(ys.mean())
        cx = float(xs.mean())
        radius = float(np.sqrt(((xs - cx) ** 2 + (ys - cy) ** 2).max()))
        blobs.append((area, Blob(center_x=cx, center_y=cy, radius_px=radius)))
    blobs.sort(key=lambda t: -t[0])
    return [b for _, b in blobs]


def extract_column(frame, blob, offset_fraction=0.5):
    """Vertical pixel column at center_x + offset_fraction*radius, inside the circle."""
    if not 0.0 <= offset_fraction < 1.0:
        raise ValueError("offset_fraction must lie in [0, 1)")
    arr = np.asarray(frame)
    h, w = arr.shape
    x = int(round(blob.center_x + offset_fraction * blob.radius_px))
    half2 = blob.radius_px ** 2 - (x - blob.center_x) ** 2
    if x < 0 or x >= w or half2 < 1.0:
        raise OffsetOutsideBlobError(
            f"column x={x} misses the blob (center {blob.center_x:.1f}, "
            f"radius {blob.radius_px:.1f})")
    half = math.sqrt(half2)
    y0 = max(0, int(math.ceil(blob.center_y - half)))
    y1 = min(h - 1, int(math.floor(blob.center_y + half)))
    if y1 < y0:
        raise OffsetOutsideBlobError("blob circle spans no full row at this column")
    return arr[y0:y1 + 1, x].copy()


def _runs(bits):
    """Lengths of maximal runs of identical values: list of (value, length)."""
    change = np.nonzero(np.diff(bits))[0]
    starts = np.concatenate([[0], change + 1])
    ends = np.concatenate([change + 1, [bits.size]])
    return [(int(bits[s]), int(e - s)) for s, e in zip(starts, ends)]


def column_to_symbols(column, w_px, duty=0.5):
    """Turn an intensity column into channel symbols by run-length clocking.

    The column (minus 2 guard pixels at each end) is binarized at the
    midpoint of its min and max, then each run of identical values emits
    round(run / unit) symbols, at least one. The per-level unit accounts for
    the transmit duty cycle: bright runs span 2*duty*W rows per symbol and
    dark runs 2*(1-duty)*W, which reduces to W at the default duty of 0.5.
    End runs shorter than half their unit are cut-off fragments from the
    circle boundary and are dropped.
    """
    if w_px < 2:
        raise ValueError("band width below 2 px cannot be decoded")
    col = np.asarray(column).ravel()
    if col.size < 3 * w_px:
        raise ColumnTooShortError(f"{col.size} samples < 3 band widths")
    trimmed = col[2:-2].astype(np.float64)
    lo, hi = trimmed.min(), trimmed.max()
    if hi <= lo:
        raise NoTransitionsError("column is constant")
    bits = (trimmed > (lo + hi) / 2.0).astype(np.uint8)
    runs = _runs(bits)

    unit = {1: 2.0 * duty * w_px, 0: 2.0 * (1.0 - duty) * w_px}
    if runs and runs[0][1] < 0.5 * unit[runs[0][0]]:
        runs = runs[1:]
    if runs and runs[-1][1] < 0.5 * unit[runs[-1][0]]:
        runs = runs[:-1]
    if not runs:
        raise NoTransitionsError("only fragmentary runs in column")

    symbols = []
    for value, length in runs:
        count = max(1, int(length / unit[value] + 0.5))
        symbols.extend([value] * count)
    return np.asarray(symbols, dtype=np.uint8)


def estimate_band_width_px(column):
    """Fallback band-width estimate when the modulation clock is unknown.

    Binarizes like column_to_symbols and returns the median of the shortest
    quartile of run lengths (interior runs only), which approximates the
    single-symbol band width.
    """
    col = np.asarray(column).ravel()
    if col.size < 8:
        raise ColumnTooShortError("column too short to estimate a band width")
    trimmed = col[2:-2].astype(np.float64)
    lo, hi = trimmed.min(), trimmed.max()
    if hi <= lo:
        raise NoTransitionsError("column is constant")
    bits = (trimmed > (lo + hi) / 2.0).astype(np.uint8)
    lengths = sorted(length for _, length in _runs(bits)[1:-1])
    if not lengths:
        raise NoTransitionsError("no interior runs in column")
    quartile = lengths[:max(1, len(lengths) // 4)]
    return float(np.median(quartile))


@dataclass
class BlobDecode:
    """Decode outcome for one detected blob."""

    blob: Blob
    payload: np.ndarray | None
    fail_reason: str | None
    decode_ms: float


@dataclass
class PipelineResult:
    """Full pipeline output, intermediate frames included for debugging."""

    blobs: list
    stretched: np.ndarray
    blurred: np.ndarray
    binary: np.ndarray


_FAIL_REASONS = {
    OffsetOutsideBlobError: "offset_outside_blob",
    ColumnTooShortError: "column_too_short",
    NoTransitionsError: "no_transitions",
    NoPacketError: "no_packet",
}


def run_pipeline(frame, w_px, duty=0.5, n_bits=DEFAULT_PAYLOAD_BITS,
                 offset_fraction=0.5, lo_pct=2.0, hi_pct=98.0, block=31,
                 c=-5.0, min_area_px=None, framing=DEFAULT_FRAMING):
    """Run the full decode pipeline on a frame and return per-blob results.

    The threshold block defaults to 31 here: it must be wider than the widest
    band a packet produces (two symbols, up to about 24 px at W=12), because
    any bright plateau wider than the block equals its own local mean and
    would binarize dark.
    """
    stretched = contrast_stretch(frame, lo_pct, hi_pct)
    blurred = box_blur_3x3(stretched)
    binary = adaptive_threshold(blurred, block, c)
    results = []
    for blob in detect_blobs(binary, w_px, min_area_px):
        t0 = time.perf_counter()
        payload, reason = None, None
        try:
            col = extract_column(binary, blob, offset_fraction)
            symbols = column_to_symbols(col, w_px, duty)
            payload = parse_packet(symbols, framing, n_bits)
        except tuple(_FAIL_REASONS) as exc:
            reason = _FAIL_REASONS[type(exc)]
        ms = (time.perf_counter() - t0) * 1000.0
        results.append(BlobDecode(blob=blob, payload=payload,
                                  fail_reason=reason, decode_ms=ms))
    return PipelineResult(blobs=results, stretched=stretched,
                          blurred=blurred, binary=binary)
