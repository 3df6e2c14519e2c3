"""
MNNTS - Multivariate nonnegative trigonometric sums on the hypertorus

Densities f(theta) = |c^H (e_1 x ... x e_n)|^2 with closed-form:
- Normalization, density and CDF evaluation
- Marginals as finite mixtures of lower-dimensional models
- Conditionals given any subset of the angles
- Independence scores and likelihood-ratio tests
- MD and ML estimation on the parameter sphere
- Seeded, portable sampling
"""

from .config import ESTIMATORS, UNITS
from .config_default import (
    load_config,
    load_settings,
    save_config,
    show_config,
    CONFIG_DIR,
    CONFIG_FILE,
)
from .errors import (
    MnntsError,
    ArgumentError,
    MultiIndexError,
    DataError,
    DegenerateDataError,
    NumericError,
    DegenerateInputError,
    DegenerateConditioningError,
)
from .core import (
    DimVector,
    MnntsParams,
    linear_index,
    multi_index,
    kronecker,
    normalize,
    permute_vars,
    inverse_permutation,
)
from .linalg import HermitianEig, hermitian_eig
from .density import (
    trig_moments,
    moment_vector,
    moment_matrix,
    density,
    density_batch,
    sum_form_density,
    log_likelihood,
    cdf_univariate,
    cdf_gram,
    torus_grid,
    quadrature_integral,
)
from .marginal import MarginalMixture, marginal, marginal_gram, mixture_density, mixture_density_batch, mixture_cdf
from .conditional import ConditionalSpec, conditional, conditional_marginal, conditioning_density
from .estimation import FitReport, fit, fit_md, fit_ml, loglik_gradient, mean_resultant
from .independence import (
    IndependenceTestResult,
    product_model,
    independence_score,
    free_parameters,
    lr_test,
    lr_calibration,
)
from .dataset import AngularDataset, ingest_csv, write_csv, synthetic_wind_dataset
from .modelfile import ModelFile, save_model, load_model, load_params
from .sampling import RngState, sample, sample_univariate, sample_mixture
from .stats import CircularSummary, circular_summary, circular_correlation, correlation_matrix
from .hardware import HardwareDetector

__all__ = [
    "ESTIMATORS",
    "UNITS",
    "load_config",
    "load_settings",
    "save_config",
    "show_config",
    "CONFIG_DIR",
    "CONFIG_FILE",
    "MnntsError",
    "ArgumentError",
    "MultiIndexError",
    "DataError",
    "DegenerateDataError",
    "NumericError",
    "DegenerateInputError",
    "DegenerateConditioningError",
    "DimVector",
    "MnntsParams",
    "linear_index",
    "multi_index",
    "kronecker",
    "normalize",
    "permute_vars",
    "inverse_permutation",
    "HermitianEig",
    "hermitian_eig",
    "trig_moments",
    "moment_vector",
    "moment_matrix",
    "density",
    "density_batch",
    "sum_form_density",
    "log_likelihood",
    "cdf_univariate",
    "cdf_gram",
    "torus_grid",
    "quadrature_integral",
    "MarginalMixture",
    "marginal",
    "marginal_gram",
    "mixture_density",
    "mixture_density_batch",
    "mixture_cdf",
    "ConditionalSpec",
    "conditional",
    "conditional_marginal",
    "conditioning_density",
    "FitReport",
    "fit",
    "fit_md",
    "fit_ml",
    "loglik_gradient",
    "mean_resultant",
    "IndependenceTestResult",
    "product_model",
    "independence_score",
    "free_parameters",
    "lr_test",
    "lr_calibration",
    "AngularDataset",
    "ingest_csv",
    "write_csv",
    "synthetic_wind_dataset",
    "ModelFile",
    "save_model",
    "load_model",
    "load_params",
    "RngState",
    "sample",
    "sample_univariate",
    "sample_mixture",
    "CircularSummary",
    "circular_summary",
    "circular_correlation",
    "correlation_matrix",
    "HardwareDetector",
]

__version__ = "1.0.0"
