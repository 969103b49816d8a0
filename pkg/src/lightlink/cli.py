"""Command line for the light link: encode, simulate, decode, train, sweep.

    lightlink encode   --payload 0x5a --bits 8
    lightlink simulate --payload 0x5a --distance-cm 20 --iso 800 --seed 42 \\
                       --out frame.pgm
    lightlink decode   --in frame.pgm --model model.json
    lightlink train    --csv samples.csv --iso 100 --out model.json
    lightlink sweep    --iso 100,400,800 --dmin-cm 10 --dmax-cm 100 \\
                       --step-cm 10 --trials 3 --seed 7 --out sweep.csv

Frames are binary PGM (P5), training data is CSV with header
distance_cm,blob_diameter_px,iso, models are flat JSON, and decode reports
are a single JSON object on stdout. Exit codes: 0 success, 1 usage or
parameter error, 2 frame processed but nothing decoded, 3 I/O error. Every
command is deterministic given its flags and --seed.
"""

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import camera, imaging, ranging
from .codec import (DEFAULT_PAYLOAD_BITS, build_packet, payload_from_hex,
                    payload_to_hex, symbols_to_text)
from .pgm import PgmError, read_pgm, write_pgm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_DECODE = 2
EXIT_IO = 3

SWEEP_CSV_HEADER = ["iso", "distance_cm", "mean_diameter_px", "decode_rate",
                    "conv_err_cm", "reg_err_cm"]


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad flags; the contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_tx_flags(p):
    p.add_argument("--freq-hz", type=float, default=2500.0,
                   help="modulation frequency (default 2500)")
    p.add_argument("--duty", type=float, default=0.40,
                   help="fraction of a symbol pair spent light-on (default 0.40)")
    p.add_argument("--led-radius-mm", type=float, default=10.9,
                   help="physical LED radius (default 10.9)")


def _add_camera_flags(p, with_iso=True):
    p.add_argument("--width", type=int, default=1280)
    p.add_argument("--height", type=int, default=720)
    p.add_argument("--readout-us", type=float, default=camera.DEFAULT_READOUT_S * 1e6,
                   help="row readout time in microseconds (default 16.667)")
    p.add_argument("--exposure-us", type=float, default=None,
                   help="exposure time in microseconds (default: one row time)")
    if with_iso:
        p.add_argument("--iso", type=int, default=100)
    p.add_argument("--pixel-pitch-um", type=float, default=1.55)
    p.add_argument("--focal-length-mm", type=float, default=0.28)
    p.add_argument("--kappa", type=float, default=0.15,
                   help="ISO blob-growth coefficient (simulation knob)")


def _tx_from(args):
    return camera.TxParams(mod_freq_hz=args.freq_hz, duty_cycle=args.duty,
                           led_radius_m=args.led_radius_mm * 1e-3)


def _camera_from(args, iso=None):
    exposure = None if args.exposure_us is None else args.exposure_us * 1e-6
    return camera.CameraParams(
        width_px=args.width, height_px=args.height,
        readout_time_s=args.readout_us * 1e-6, exposure_time_s=exposure,
        iso=args.iso if iso is None else iso,
        pixel_pitch_m=args.pixel_pitch_um * 1e-6,
        focal_length_m=args.focal_length_mm * 1e-3,
        iso_gain_kappa=args.kappa)


def cmd_encode(args):
    payload = payload_from_hex(args.payload, args.bits)
    print(symbols_to_text(build_packet(payload)))
    return EXIT_OK


def cmd_simulate(args):
    tx = _tx_from(args)
    cam = _camera_from(args)
    payload = payload_from_hex(args.payload, args.bits)
    stream = build_packet(payload)
    center = None
    if args.center_x is not None or args.center_y is not None:
        if args.center_x is None or args.center_y is None:
            raise ValueError("give both --center-x and --center-y or neither")
        center = (args.center_x, args.center_y)
    geom = camera.LinkGeometry(distance_m=args.distance_cm / 100.0, center_px=center)
    frame = camera.synthesize_frame(
        stream, geom, tx, cam, noise_sigma=args.noise, seed=args.seed,
        dark_level=args.dark_level, bloom_offset=args.bloom,
        falloff=args.falloff, phase_symbols=args.phase_symbols)
    write_pgm(args.out, frame)
    diameter = camera.expected_blob_diameter_px(geom, tx, cam)
    bound = camera.decodability_bound_px(args.bits, tx, cam)
    print(f"expected blob diameter: {diameter:.1f} px", file=sys.stderr)
    print(f"decodability bound: {bound:.1f} px", file=sys.stderr)
    return EXIT_OK


def _blob_record(result, tx, cam, model):
    diameter = 2.0 * result.blob.radius_px
    record = {
        "center_x": round(result.blob.center_x, 2),
        "center_y": round(result.blob.center_y, 2),
        "radius_px": round(result.blob.radius_px, 2),
        "payload_hex": None if result.payload is None else payload_to_hex(result.payload),
        "failure": result.fail_reason,
        "conventional_distance_cm": ranging.conventional_distance(diameter, tx, cam) * 100.0,
        "regression_distance_cm": None,
        "decode_ms": round(result.decode_ms, 3),
    }
    if model is not None:
        record["regression_distance_cm"] = ranging.predict_distance(model, diameter) * 100.0
    return record


def cmd_decode(args):
    frame = read_pgm(args.infile)
    tx = _tx_from(args)
    cam = _camera_from(args)
    model = ranging.load_model(args.model) if args.model else None
    w = camera.band_width_px(tx, cam)

    t0 = time.perf_counter()
    result = imaging.run_pipeline(
        frame, w, duty=args.duty, n_bits=args.bits,
        offset_fraction=args.offset, block=args.block, c=args.c,
        min_area_px=args.min_area)
    total_ms = (time.perf_counter() - t0) * 1000.0

    if args.debug_dir:
        for name, img in (("stretched", result.stretched),
                          ("blurred", result.blurred),
                          ("binary", result.binary)):
            write_pgm(f"{args.debug_dir}/{name}.pgm", img)

    report = {
        "frame": {"path": args.infile, "width": int(frame.shape[1]),
                  "height": int(frame.shape[0])},
        "band_width_px": w,
        "decode_ms": round(total_ms, 3),
        "blobs": [_blob_record(r, tx, cam, model) for r in result.blobs],
    }
    print(json.dumps(report, indent=2))
    decoded = any(r.payload is not None for r in result.blobs)
    return EXIT_OK if decoded else EXIT_NO_DECODE


def cmd_train(args):
    samples = [s for s in ranging.read_samples_csv(args.csv) if s.iso == args.iso]
    if len(samples) < 2:
        raise ValueError(f"need at least 2 rows at iso {args.iso}, got {len(samples)}")
    feature_kind = {"reciprocal": "reciprocal_diameter",
                    "raw": "raw_diameter"}[args.feature]
    model = ranging.fit_regression(samples, feature_kind=feature_kind)
    ranging.save_model(args.out, model)
    predicted_cm = [ranging.predict_distance(model, s.blob_diameter_px) * 100.0
                    for s in samples]
    truth_cm = [s.distance_m * 100.0 for s in samples]
    mse = ranging.mean_squared_error(predicted_cm, truth_cm)
    print(f"training MSE: {mse:.6g} cm^2 ({len(samples)} samples, "
          f"{feature_kind} feature)")
    return EXIT_OK


def _sweep_trial(args, tx, cam, d_idx, distance_m, trial, iso):
    """One seeded synthesis + decode; returns (diameter, success, conv, reg ok)."""
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=args.seed, spawn_key=(iso, d_idx, trial)))
    payload = rng.integers(0, 2, size=args.bits, dtype=np.uint8)
    phase = float(rng.uniform(0.0, len(build_packet(payload))))
    frame_seed = int(rng.integers(np.iinfo(np.int64).max))
    geom = camera.LinkGeometry(distance_m=distance_m)
    frame = camera.synthesize_frame(
        build_packet(payload), geom, tx, cam, noise_sigma=args.noise,
        seed=frame_seed, phase_symbols=phase)
    w = camera.band_width_px(tx, cam)
    result = imaging.run_pipeline(frame, w, duty=args.duty, n_bits=args.bits,
                                  offset_fraction=args.offset)
    if not result.blobs:
        return None, False
    best = result.blobs[0]
    success = (best.payload is not None
               and np.array_equal(best.payload, payload))
    return 2.0 * best.blob.radius_px, success


def cmd_sweep(args):
    if args.dmin_cm >= args.dmax_cm or args.step_cm <= 0:
        raise ValueError("need dmin < dmax and a positive step")
    if args.trials < 1:
        raise ValueError("need at least one trial")
    isos = [int(s) for s in args.iso.split(",") if s]
    model = ranging.load_model(args.model) if args.model else None
    tx = _tx_from(args)
    distances_cm = np.arange(args.dmin_cm, args.dmax_cm + args.step_cm / 2.0,
                             args.step_cm)

    rows = []
    for iso in isos:
        cam = _camera_from(args, iso=iso)
        for d_idx, d_cm in enumerate(distances_cm):
            diameters, successes = [], 0
            for trial in range(args.trials):
                try:
                    diameter, ok = _sweep_trial(args, tx, cam, d_idx,
                                                d_cm / 100.0, trial, iso)
                except camera.BlobOutOfFrameError:
                    diameter, ok = None, False
                if diameter is not None:
                    diameters.append(diameter)
                successes += ok
            mean_diam = float(np.mean(diameters)) if diameters else float("nan")
            conv = reg = float("nan")
            if diameters:
                conv_preds = [ranging.conventional_distance(d, tx, cam) for d in diameters]
                conv = float(np.mean([abs(p - d_cm / 100.0) for p in conv_preds])) * 100.0
                if model is not None:
                    reg_preds = [ranging.predict_distance(model, d) for d in diameters]
                    reg = float(np.mean([abs(p - d_cm / 100.0) for p in reg_preds])) * 100.0
            rows.append([iso, f"{d_cm:.6g}", f"{mean_diam:.6g}",
                         f"{successes / args.trials:.6g}", f"{conv:.6g}",
                         f"{reg:.6g}"])

    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_CSV_HEADER)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def read_sweep_csv(path):
    """Parse a sweep CSV back into a list of dicts (the tool's own reader)."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != SWEEP_CSV_HEADER:
            raise ValueError(f"expected header {','.join(SWEEP_CSV_HEADER)}, got {header}")
        out = []
        for row in reader:
            if not row:
                continue
            out.append({"iso": int(row[0]), "distance_cm": float(row[1]),
                        "mean_diameter_px": float(row[2]),
                        "decode_rate": float(row[3]),
                        "conv_err_cm": float(row[4]),
                        "reg_err_cm": float(row[5])})
        return out


def build_parser():
    parser = _Parser(prog="lightlink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="print a packet as a '0'/'1' string")
    p.add_argument("--payload", required=True, help="payload as hex, e.g. 0x5a")
    p.add_argument("--bits", type=int, default=DEFAULT_PAYLOAD_BITS)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("simulate", help="render a rolling-shutter frame to PGM")
    p.add_argument("--payload", default="0x5a", help="payload as hex")
    p.add_argument("--bits", type=int, default=DEFAULT_PAYLOAD_BITS)
    p.add_argument("--distance-cm", type=float, required=True)
    p.add_argument("--noise", type=float, default=0.0,
                   help="background noise sigma at ISO 100 (default 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output PGM path")
    p.add_argument("--dark-level", type=float, default=10.0)
    p.add_argument("--bloom", type=float, default=250.0,
                   help="overexposure offset near the blob center (0 disables)")
    p.add_argument("--falloff", choices=["none", "cosine"], default="none")
    p.add_argument("--phase-symbols", type=float, default=0.0,
                   help="waveform phase at row 0, in symbol periods")
    p.add_argument("--center-x", type=float, default=None)
    p.add_argument("--center-y", type=float, default=None)
    _add_tx_flags(p)
    _add_camera_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decode", help="decode a PGM frame, JSON report to stdout")
    p.add_argument("--in", dest="infile", required=True, help="input PGM path")
    p.add_argument("--model", default=None, help="range model JSON (optional)")
    p.add_argument("--offset", type=float, default=0.5,
                   help="sampling column offset as a fraction of the radius")
    p.add_argument("--bits", type=int, default=DEFAULT_PAYLOAD_BITS)
    p.add_argument("--block", type=int, default=31,
                   help="adaptive threshold block size (odd, wider than the "
                        "widest band)")
    p.add_argument("--c", type=float, default=-5.0,
                   help="threshold margin; negative puts it above the local mean")
    p.add_argument("--min-area", type=int, default=None,
                   help="smallest accepted blob area in px (default (2W)^2)")
    p.add_argument("--debug-dir", default=None,
                   help="directory for intermediate pipeline frames")
    _add_tx_flags(p)
    _add_camera_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("train", help="fit a range model from a training CSV")
    p.add_argument("--csv", required=True, help="CSV with distance_cm,blob_diameter_px,iso")
    p.add_argument("--iso", type=int, required=True, help="ISO rows to train on")
    p.add_argument("--feature", choices=["reciprocal", "raw"], default="reciprocal")
    p.add_argument("--out", required=True, help="output model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="ISO x distance study, CSV output")
    p.add_argument("--iso", default="100,400,800", help="comma-separated ISO list")
    p.add_argument("--dmin-cm", type=float, required=True)
    p.add_argument("--dmax-cm", type=float, required=True)
    p.add_argument("--step-cm", type=float, required=True)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--bits", type=int, default=DEFAULT_PAYLOAD_BITS)
    p.add_argument("--offset", type=float, default=0.5)
    p.add_argument("--model", default=None, help="range model JSON (optional)")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_tx_flags(p)
    _add_camera_flags(p, with_iso=False)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PgmError, OSError) as exc:
        print(f"lightlink: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"lightlink: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
