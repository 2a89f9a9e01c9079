"""styletrace: forensic analysis of repeated style-transfer manipulation.

Estimates whether a face image went through one or two generative
style-transfer passes, from the Laplacian scales of its blockwise DCT
coefficients, and probes the algebra of the transfer operation itself.
"""

__version__ = "0.1.0"

from . import ballistics, classifiers, dct_features, imaging, similarity, synthetic
from .ballistics import (
    ExternalTransferOp,
    ProxyTransferOp,
    StyleTransferOp,
    aggregate,
    associativity_batch,
    build_dataset,
    check_associativity,
    check_commutativity,
    check_neutral,
)
from .dct_features import (
    BetaVector,
    average_betas,
    dct2_8x8,
    estimate_beta,
    extract_features,
    extract_many,
    zigzag,
)
from .errors import (
    DataValidationError,
    DecodeError,
    DegenerateDataError,
    DimensionMismatchError,
    DisjointnessError,
    OperatorError,
    StyletraceError,
    UnsupportedColorModelError,
)
from .imaging import Block8, LumaImage, RasterImage, load_image, partition_blocks, to_luminance
from .similarity import RgbHistogram, SsimResult, compare, rgb_histogram, ssim
