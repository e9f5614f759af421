"""Phase retrieval from one-bit comparisons of paired intensity measurements."""

from .numkit import (
    align_phase,
    cgls,
    dense_top_eigenvector,
    dft,
    dist_sq,
    idft,
    inner,
    phase_op,
    power_iteration,
)
from .sensing import (
    CdpOperator,
    PairedEnsemble,
    PlainEnsemble,
    build_cdp_operator,
    build_paired_ensemble,
    build_plain_ensemble,
    cdp_adjoint,
    cdp_apply,
    cdp_intensities,
    intensity,
    paired_intensities,
    sample_complex_gaussian,
    sample_exponential,
    sample_poisson,
    substream,
)
from .channels import (
    ClippedGaussianNoise,
    ExponentialNoise,
    Identity,
    MeasurementModel,
    PoissonNoise,
    QuantizedData,
    TanhDistortion,
    apply_model,
    format_model,
    lambda_closed_form,
    lambda_monte_carlo,
    parse_model,
    quantize,
    quantize_signal,
    quantized_from_intensities,
    ratio_weights,
)
from .recovery import (
    InitKind,
    MatrixOperator,
    RecoveryReport,
    alt_min,
    alt_min_resampled,
    multi_init_select,
    one_bit_matvec,
    one_bit_phase,
    random_init,
    subexp_phase,
    weighted_one_bit_phase,
)

__version__ = "0.1.0"

__all__ = [
    "align_phase",
    "cgls",
    "dense_top_eigenvector",
    "dft",
    "dist_sq",
    "idft",
    "inner",
    "phase_op",
    "power_iteration",
    "CdpOperator",
    "PairedEnsemble",
    "PlainEnsemble",
    "build_cdp_operator",
    "build_paired_ensemble",
    "build_plain_ensemble",
    "cdp_adjoint",
    "cdp_apply",
    "cdp_intensities",
    "intensity",
    "paired_intensities",
    "sample_complex_gaussian",
    "sample_exponential",
    "sample_poisson",
    "substream",
    "ClippedGaussianNoise",
    "ExponentialNoise",
    "Identity",
    "MeasurementModel",
    "PoissonNoise",
    "QuantizedData",
    "TanhDistortion",
    "apply_model",
    "format_model",
    "lambda_closed_form",
    "lambda_monte_carlo",
    "parse_model",
    "quantize",
    "quantize_signal",
    "quantized_from_intensities",
    "ratio_weights",
    "InitKind",
    "MatrixOperator",
    "RecoveryReport",
    "alt_min",
    "alt_min_resampled",
    "multi_init_select",
    "one_bit_matvec",
    "one_bit_phase",
    "random_init",
    "subexp_phase",
    "weighted_one_bit_phase",
    "__version__",
]
