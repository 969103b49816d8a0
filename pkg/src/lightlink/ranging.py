"""Link-distance estimation from the observed blob size.

Two routes are implemented. The closed-form route inverts the lens scaling
directly:

    D = f_L + S_r * f_L / (S_ip * S_p)

with S_ip the blob diameter in pixels. It is exact for an ideal sensor but
systematically biased on real frames, where film speed and overexposure
inflate the blob. The trained route fits ordinary least squares of distance
against a feature of the diameter on labeled samples; because it learns from
the same biased measurements it later predicts from, the bias cancels. The
default feature is the reciprocal diameter, in which the lens model is
exactly linear, so on clean data the fit recovers the physics (slope close
to S_r*f_L/S_p, intercept close to f_L); a raw-diameter feature is kept for
comparison.

Distances are meters internally; the CSV and CLI surfaces speak centimeters.
Models are immutable after fitting and safe to share across threads.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

FEATURE_KINDS = ("reciprocal_diameter", "raw_diameter")
SAMPLES_CSV_HEADER = ["distance_cm", "blob_diameter_px", "iso"]
_MODEL_KEYS = ["slope", "intercept", "feature_kind", "iso", "trained_on"]


class DegenerateFitError(ValueError):
    """All feature values coincide, the regression line is undetermined."""


@dataclass
class RangeSample:
    """One labeled observation: true distance, measured diameter, ISO."""

    distance_m: float
    blob_diameter_px: float
    iso: int

    def __post_init__(self):
        if self.distance_m <= 0 or self.blob_diameter_px <= 0:
            raise ValueError("distance and diameter must be positive")


@dataclass(frozen=True)
class RangeModel:
    """Fitted line mapping a diameter feature to distance in meters."""

    slope: float
    intercept: float
    feature_kind: str = "reciprocal_diameter"
    iso: int = 100
    trained_on: int = 0


def _feature(feature_kind, diameters):
    if feature_kind == "reciprocal_diameter":
        return 1.0 / diameters
    if feature_kind == "raw_diameter":
        return diameters
    raise ValueError(f"unknown feature_kind {feature_kind!r}")


def conventional_distance(blob_diameter_px, tx, cam):
    """Closed-form distance from the blob diameter via lens scaling."""
    if blob_diameter_px <= 0:
        raise ValueError("blob diameter must be positive")
    f_l = cam.focal_length_m
    return f_l + (tx.led_radius_m * f_l) / (blob_diameter_px * cam.pixel_pitch_m)


def fit_regression(samples, feature_kind="reciprocal_diameter"):
    """Least-squares fit of distance against the diameter feature.

    Needs at least two samples with distinct feature values, all at the same
    ISO setting (one model per ISO).
    """
    if len(samples) < 2:
        raise ValueError("need at least 2 samples to fit")
    isos = {s.iso for s in samples}
    if len(isos) > 1:
        raise ValueError(f"samples span multiple ISO settings {sorted(isos)}; "
                         "fit one model per ISO")
    diam = np.array([s.blob_diameter_px for s in samples], dtype=np.float64)
    dist = np.array([s.distance_m for s in samples], dtype=np.float64)
    x = _feature(feature_kind, diam)
    if np.ptp(x) == 0:
        raise DegenerateFitError("all feature values are equal")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, dist, rcond=None)
    return RangeModel(slope=float(slope), intercept=float(intercept),
                      feature_kind=feature_kind, iso=isos.pop(),
                      trained_on=len(samples))


def predict_distance(model, blob_diameter_px):
    """Distance in meters predicted by a fitted model."""
    if blob_diameter_px <= 0:
        raise ValueError("blob diameter must be positive")
    x = _feature(model.feature_kind, np.float64(blob_diameter_px))
    return float(model.slope * x + model.intercept)


def mean_squared_error(predicted, truth):
    """Mean of squared differences between two equal-length lists."""
    p = np.asarray(predicted, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.size == 0 or p.shape != t.shape:
        raise ValueError("predicted and truth must be non-empty and equal length")
    return float(np.mean((p - t) ** 2))


def write_samples_csv(path, samples):
    """Write training samples with the canonical header, distances in cm."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SAMPLES_CSV_HEADER)
        for s in samples:
            writer.writerow([repr(s.distance_m * 100.0),
                             repr(s.blob_diameter_px), s.iso])


def read_samples_csv(path):
    """Read the training CSV (header distance_cm,blob_diameter_px,iso)."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SAMPLES_CSV_HEADER:
            raise ValueError(f"expected header {','.join(SAMPLES_CSV_HEADER)}, "
                             f"got {header}")
        samples = []
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"expected 3 columns, got {row}")
            samples.append(RangeSample(distance_m=float(row[0]) / 100.0,
                                       blob_diameter_px=float(row[1]),
                                       iso=int(row[2])))
    return samples


def save_model(path, model):
    """Persist a RangeModel as a flat key-value JSON document."""
    doc = {"slope": model.slope, "intercept": model.intercept,
           "feature_kind": model.feature_kind, "iso": model.iso,
           "trained_on": model.trained_on}
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_model(path):
    """Load a RangeModel written by save_model."""
    with open(path) as f:
        doc = json.load(f)
    missing = [k for k in _MODEL_KEYS if k not in doc]
    if missing:
        raise ValueError(f"model file missing keys {missing}")
    if doc["feature_kind"] not in FEATURE_KINDS:
        raise ValueError(f"unknown feature_kind {doc['feature_kind']!r}")
    return RangeModel(slope=float(doc["slope"]), intercept=float(doc["intercept"]),
                      feature_kind=doc["feature_kind"], iso=int(doc["iso"]),
                      trained_on=int(doc["trained_on"]))
