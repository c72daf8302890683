"""Locate where a photo was taken and who is in it.

Places are matched with ORB features and perceptual hashes, faces are found
with a Haar cascade and identified with Eigenfaces, Fisherfaces or LBPH.
"""

from .errors import (
    BoundsError,
    ConflictError,
    ContractError,
    DecodeError,
    ManifestError,
    ModelParseError,
    ShapeError,
    SingularityError,
    SomiapError,
    UnsupportedModelError,
)
from .facedetect import CascadeModel, Detection, detect_multiscale, load_cascade
from .facerecog import Gallery, Prediction, normalize_face, predict, train
from .features import DescriptorSet, match_descriptors, orb_detect_describe
from .hashing import HashAlgo, HashDigest, calibrate, compute_hash, hamming
from .imagecore import Rect, read_image, resize_bilinear, to_gray, write_image
from .manifest import Manifest
from .numerics import dct2, generalized_symmetric_eig, jacobi_eigh
from .pipeline import AnalysisReport, PlaceConfig, PlaceIndex, analyze, enroll_place, match_place

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "BoundsError", "CascadeModel", "ConflictError", "ContractError",
    "DecodeError", "DescriptorSet", "Detection", "Gallery", "HashAlgo", "HashDigest",
    "Manifest", "ManifestError", "ModelParseError", "PlaceConfig", "PlaceIndex",
    "Prediction", "Rect", "ShapeError", "SingularityError", "SomiapError",
    "UnsupportedModelError", "analyze", "calibrate", "compute_hash", "dct2",
    "detect_multiscale", "enroll_place", "generalized_symmetric_eig", "hamming",
    "jacobi_eigh", "load_cascade", "match_descriptors", "match_place", "normalize_face",
    "orb_detect_describe", "predict", "read_image", "resize_bilinear", "to_gray",
    "train", "write_image",
]
