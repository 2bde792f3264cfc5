"""pcscreen: find highly correlated asset pairs and groups from the
low-variance principal components of a return correlation matrix.

Typical library use:

    from pcscreen import (
        parse_prices, parse_dividends, filter_complete, compute_returns,
        correlation, eigendecompose, detect, DetectorConfig,
    )

    panel = filter_complete(parse_prices(open("prices.csv")))
    rp = compute_returns(panel)
    groups = detect(eigendecompose(correlation(rp)))

or, sklearn-style, fit a CorrelatedGroupDetector on an
(n_samples, n_assets) returns matrix.
"""

from .detector import (
    DetectorConfig,
    RelationshipGroup,
    WindowResult,
    detect,
    rolling_detect,
    significant_loadings,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    DegenerateSeriesError,
    DuplicateKeyError,
    EmptyUniverseError,
    InsufficientHistoryError,
    ParseError,
    PCScreenError,
    SynthSpecError,
    UnknownEventError,
)
from .estimator import CorrelatedGroupDetector
from .panel import (
    PricePanel,
    completeness_report,
    filter_complete,
    parse_dividends,
    parse_prices,
    write_dividends_csv,
    write_prices_csv,
)
from .report import (
    BiplotSheet,
    biplot,
    eigen_table,
    price_tracks,
    write_eigen_tail_csv,
)
from .returns import (
    ReturnPanel,
    adjust_prices,
    compute_returns,
    dividend_factors,
    write_adjusted_prices_csv,
    write_returns_csv,
)
from .spectra import (
    CorrelationMatrix,
    EigenDecomposition,
    correlation,
    correlation_from_matrix,
    eigendecompose,
    write_correlation_csv,
    write_eigenvalues_csv,
)
from .synth import (
    DividendEvent,
    Plant,
    SynthSpec,
    answer_key,
    generate,
    spec_from_dict,
    spec_from_json,
    spec_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "BiplotSheet",
    "ConfigError",
    "ConvergenceError",
    "CorrelatedGroupDetector",
    "CorrelationMatrix",
    "DataError",
    "DegenerateSeriesError",
    "DetectorConfig",
    "DividendEvent",
    "DuplicateKeyError",
    "EigenDecomposition",
    "EmptyUniverseError",
    "InsufficientHistoryError",
    "PCScreenError",
    "ParseError",
    "Plant",
    "PricePanel",
    "RelationshipGroup",
    "ReturnPanel",
    "SynthSpec",
    "SynthSpecError",
    "UnknownEventError",
    "WindowResult",
    "adjust_prices",
    "answer_key",
    "biplot",
    "completeness_report",
    "compute_returns",
    "correlation",
    "correlation_from_matrix",
    "detect",
    "dividend_factors",
    "eigen_table",
    "eigendecompose",
    "filter_complete",
    "generate",
    "parse_dividends",
    "parse_prices",
    "price_tracks",
    "rolling_detect",
    "significant_loadings",
    "spec_from_dict",
    "spec_from_json",
    "spec_to_dict",
    "write_adjusted_prices_csv",
    "write_correlation_csv",
    "write_dividends_csv",
    "write_eigen_tail_csv",
    "write_eigenvalues_csv",
    "write_prices_csv",
    "write_returns_csv",
]
