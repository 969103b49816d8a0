"""Shared fixtures-in-code for the test suite.

Most image tests need a link whose blob is large enough to carry packets at
desk distances. The library default focal length (0.28 mm, the reference
hardware's documented constant) puts such blobs at millimeter range, so the
helpers configure a few-millimeter focal length instead; band physics and
decode behavior do not depend on that choice.
"""

import numpy as np

from lightlink import (CameraParams, LinkGeometry, TxParams,
                       distance_for_blob_diameter)


def link_setup(diameter_px=690.0, iso=100, focal_mm=5.0, duty=0.40):
    """Transmitter, camera, and geometry giving the requested blob diameter."""
    tx = TxParams(duty_cycle=duty)
    cam = CameraParams(iso=iso, focal_length_m=focal_mm * 1e-3)
    geom = LinkGeometry(distance_m=distance_for_blob_diameter(diameter_px, tx, cam))
    return tx, cam, geom


def binary_runs(values, threshold=127.5):
    """Runs of a 1-D intensity sequence binarized at threshold: (value, length)."""
    bits = (np.asarray(values).ravel() > threshold).astype(np.uint8)
    change = np.nonzero(np.diff(bits))[0]
    starts = np.concatenate([[0], change + 1])
    ends = np.concatenate([change + 1, [bits.size]])
    return [(int(bits[s]), int(e - s)) for s, e in zip(starts, ends)]


def solid_disc(height, width, cx, cy, radius):
    """Binary frame (uint8 0/255) containing one filled disc."""
    ys, xs = np.mgrid[0:height, 0:width]
    frame = np.zeros((height, width), dtype=np.uint8)
    frame[(xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2] = 255
    return frame


def two_led_frame(payload_a, payload_b, diameter_px=600.0, noise=0.0, seed=0,
                  duty=0.40):
    """Frame with two transmitting LEDs side by side (pixel-wise max overlay)."""
    from lightlink import build_packet, synthesize_frame

    tx, cam, _ = link_setup(diameter_px=diameter_px, duty=duty)
    dist = distance_for_blob_diameter(diameter_px, tx, cam)
    left = synthesize_frame(build_packet(payload_a),
                            LinkGeometry(distance_m=dist, center_px=(320.0, 359.5)),
                            tx, cam, noise_sigma=noise, seed=seed)
    right = synthesize_frame(build_packet(payload_b),
                             LinkGeometry(distance_m=dist, center_px=(960.0, 359.5)),
                             tx, cam, dark_level=0.0, phase_symbols=7.0)
    return np.maximum(left, right), tx, cam
