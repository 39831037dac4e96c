"""Deformed complex Ginibre ensembles.

Tools for the matrix model X = X0 + G with a fixed diagonal deformation
X0 and iid complex Gaussian noise of variance tau/N: limit-support
geometry, bulk scaling parameters, reproducible spectrum sampling,
local statistics against the Ginibre kernel predictions, and
independent numerical checks of the underlying variational identities.
"""

from .bulk import BulkParameters, bulk_parameters, rescale_factor, solve_t0
from .checks import (MaxCheckResult, check_amplitude_maximum, check_hciz,
                     check_potential_peak)
from .config import ExperimentConfig, load_config, validate_config
from .errors import GinlabError
from .kernel import ginibre_kernel, npoint_correlation, predicted_pair_correlation
from .matrixlab import (SpectrumSample, eigenvalues, haar_unitary,
                        haar_unitaries, sample_matrix)
from .model import (BoundaryCurve, DeformationSpec, PointClass,
                    build_mean_matrix, classify_point, p00, trace_boundary,
                    validate_spec)
from .pipeline import run_campaign, verify_all
from .stats import (ECDF, ComparisonReport, LocalStatistics, PairHistogram,
                    collect_local, density_estimate, extract_local,
                    ks_distance, nn_spacing_ecdf, pair_correlation_estimate)

__version__ = "0.1.0"

__all__ = [
    "BulkParameters", "BoundaryCurve", "ComparisonReport", "DeformationSpec",
    "ECDF", "ExperimentConfig", "GinlabError", "LocalStatistics",
    "MaxCheckResult", "PairHistogram", "PointClass", "SpectrumSample",
    "build_mean_matrix", "bulk_parameters", "check_amplitude_maximum",
    "check_hciz", "check_potential_peak", "classify_point", "collect_local",
    "density_estimate", "eigenvalues", "extract_local", "ginibre_kernel",
    "haar_unitaries", "haar_unitary", "ks_distance", "load_config",
    "nn_spacing_ecdf", "npoint_correlation", "p00", "pair_correlation_estimate",
    "predicted_pair_correlation", "rescale_factor", "run_campaign",
    "sample_matrix", "solve_t0", "trace_boundary", "validate_config",
    "validate_spec", "verify_all",
]
