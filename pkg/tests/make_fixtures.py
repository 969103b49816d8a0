"""Builders for the checked-in golden files.

Run `python3 tests/make_fixtures.py` to regenerate tests/data/. The golden
tests call the same builders into a temp directory and byte-compare, so a
regeneration is only needed when the synthesis or pipeline intentionally
changes; the band audit in test_golden keeps a regenerated file honest.

The simulate golden uses an 8 mm focal length (flag recorded below) so the
frame shows a large banded blob worth auditing; everything else is command
defaults.
"""

from pathlib import Path

from lightlink import cli
from lightlink.camera import CameraParams, LinkGeometry, synthesize_frame, TxParams
from lightlink.codec import build_packet, payload_from_hex
from lightlink.imaging import adaptive_threshold, box_blur_3x3, contrast_stretch
from lightlink.pgm import write_pgm

DATA_DIR = Path(__file__).parent / "data"

SIMULATE_GOLDEN = "simulate_golden.pgm"
SIMULATE_ARGS = ["simulate", "--payload", "0x5a", "--distance-cm", "20",
                 "--iso", "800", "--seed", "42", "--focal-length-mm", "8"]

BINARY_GOLDEN = "binary_golden.pgm"


def build_simulate_golden(path):
    rc = cli.main(SIMULATE_ARGS + ["--out", str(path)])
    assert rc == 0


def build_binary_golden(path):
    """Thresholded pipeline view of a small noisy banded blob."""
    tx = TxParams()
    cam = CameraParams(width_px=256, height_px=256, iso=100,
                       focal_length_m=5e-3)
    frame = synthesize_frame(build_packet(payload_from_hex("0xc3", 8)),
                             LinkGeometry(distance_m=0.2), tx, cam,
                             noise_sigma=6.0, seed=5)
    binary = adaptive_threshold(box_blur_3x3(contrast_stretch(frame)),
                                block=31, c=-5.0)
    write_pgm(path, binary)


if __name__ == "__main__":
    DATA_DIR.mkdir(exist_ok=True)
    build_simulate_golden(DATA_DIR / SIMULATE_GOLDEN)
    build_binary_golden(DATA_DIR / BINARY_GOLDEN)
    print(f"fixtures written to {DATA_DIR}")
