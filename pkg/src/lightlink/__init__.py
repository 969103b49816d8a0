"""LED-to-camera visible light link in software.

Subpackages cover the full path of a transmission: `codec` frames and
Manchester-encodes payload bits, `camera` models the rolling-shutter sensor
and renders frames of a looping transmitter, `imaging` runs the receiver
pipeline that turns a frame back into payloads, `ranging` estimates the link
distance from the observed blob size (closed-form and regression), `pgm`
moves frames to and from disk, and `cli` ties everything to a command line.
"""

from .camera import (BlobOutOfFrameError, CameraParams, LinkGeometry, TxParams,
                     band_width_px, decodability_bound_px,
                     distance_for_blob_diameter, expected_blob_diameter_px,
                     iso_gain, synthesize_frame)
from .codec import (DEFAULT_FRAMING, FramingConfig, InvalidPairError,
                    NoPacketError, OddLengthError, build_packet, find_preamble,
                    manchester_decode, manchester_encode, packet_size,
                    parse_packet, payload_from_hex, payload_to_hex,
                    symbols_to_text, text_to_symbols)
from .imaging import (Blob, BlobDecode, ColumnTooShortError,
                      DegenerateRangeWarning, FrameTooSmallError,
                      NoTransitionsError, OffsetOutsideBlobError,
                      PipelineResult, adaptive_threshold, box_blur_3x3,
                      column_to_symbols, contrast_stretch, detect_blobs,
                      estimate_band_width_px, extract_column, run_pipeline)
from .pgm import PgmError, read_pgm, write_pgm
from .ranging import (DegenerateFitError, RangeModel, RangeSample,
                      conventional_distance, fit_regression, load_model,
                      mean_squared_error, predict_distance, read_samples_csv,
                      save_model, write_samples_csv)

__version__ = "0.1.0"
