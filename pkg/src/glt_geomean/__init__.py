"""glt-geomean - Geometric means of GLT matrix sequences and their spectral distribution."""

__all__ = (
    "CoefficientProvider",
    "ExperimentReport",
    "ExperimentSpec",
    "HermitianMatrix",
    "QuantileCurve",
    "SpectrumSample",
    "SymbolFunction",
    "alt_mean",
    "build_pair",
    "candidate_point",
    "candidate_symbol",
    "catalog_specs",
    "certify_hpd",
    "decay_exponents",
    "diag_sampling",
    "evaluate_sequence",
    "expected_symbol",
    "extremal_stats",
    "fourier_coefficient",
    "fractional_power",
    "geometric_mean",
    "glt_symbol",
    "hermitian_eig",
    "hpd_function",
    "load_config",
    "quantile_distance",
    "rearranged_quantile",
    "run_experiment",
    "schatten_norm",
    "spectrum_of",
    "toeplitz",
    "zero_distribution_diagnostic",
    "zero_fraction",
    "zero_measure",
)

from .coefficients import CoefficientProvider, fourier_coefficient
from .config import load_config
from .experiments import (
    ExperimentSpec,
    build_pair,
    catalog_specs,
    expected_symbol,
    run_experiment,
)
from .matfun import (
    alt_mean,
    certify_hpd,
    fractional_power,
    geometric_mean,
    hermitian_eig,
    hpd_function,
    schatten_norm,
)
from .sequences import diag_sampling, evaluate_sequence, glt_symbol, toeplitz
from .spectra import (
    decay_exponents,
    extremal_stats,
    quantile_distance,
    spectrum_of,
    zero_distribution_diagnostic,
    zero_fraction,
)
from .symbol import (
    SymbolFunction,
    candidate_point,
    candidate_symbol,
    rearranged_quantile,
    zero_measure,
)
from .types import ExperimentReport, HermitianMatrix, QuantileCurve, SpectrumSample
