"""Time-varying ARMA models through their Green functions.

Solutions, moments, forecasts and invertibility of ARMA processes whose
coefficients change over time, with random-coefficient and abrupt-break
special cases.
"""

from .breaks import (
    BreakAR,
    PersistenceReport,
    SegmentedAR,
    dab_variance,
    dabar_variance,
    fit_segmented_ar,
    forecast_eval,
    persistence_measures,
)
from .coefficients import (
    PathSpec,
    Segment,
    StochasticCoeffSpec,
    constant_path,
    gegenbauer_coefficients,
    make_break_path,
    make_exponential_path,
    make_gegenbauer_path,
    make_logistic_path,
    make_periodic_path,
    sample_stochastic_path,
    table_path,
)
from .errors import (
    Assumption1Violated,
    ConditionViolated,
    ConfigError,
    DataError,
    InsufficientHistory,
    NonSummable,
    NotInvertible,
    NumericalError,
    OutOfWindow,
    SeriesTooShort,
    TvArmaError,
)
from .forecast import (
    ForecastReport,
    TvArmaForecaster,
    forward_efficiency,
    mse_time_comparison,
    predict_finite,
    predict_infinite,
)
from .green import GreenTable, green_column, green_row, theta_green, widom_xi, xi, xi_m, xi_q, xi_sq
from .inversion import invertibility_report, recover_errors
from .moments import (
    TruncationPolicy,
    autocovariance,
    stability_report,
    unconditional_mean,
    unconditional_variance,
    wold_weights,
)
from .path import CoefficientPath
from .polyops import TvPoly, ar_operator, ma_operator, skew_mul, truncated_inverse
from .process import TvArmaModel, companion_product, represent, simulate, simulate_many
from .stochastic import (
    DsarSpec,
    GrcMomentInputs,
    dsar_moments_mc,
    dsar_predict,
    grc_autocov,
    grc_mean,
    grc_sigma2,
    rcar_stability_diag,
)

__version__ = "0.1.0"
