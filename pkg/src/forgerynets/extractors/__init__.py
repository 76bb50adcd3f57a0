from . import functional
from .functional import (
    DEFAULT_SRM_KERNELS,
    SRM_KERNELS,
    check_bayar,
    default_bayar_kernel,
    extract_bayar,
    extract_hpr,
    extract_npr,
    extract_srm,
    gaussian_kernel1d,
    gaussian_kernel2d,
    project_bayar,
)
from .extractor import ExtractorKind, ModalityExtractor, extract_all, validate_kinds
