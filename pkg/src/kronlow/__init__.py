"""Low-discrepancy point sets in [0,1)^d.

Construction of Kronecker, Fibonacci and Sobol' point sets, exact
L-infinity star discrepancy evaluation with a witness box, per-size
CMA-ES parameter search, and an interval racing tuner.
"""

from kronlow.pointset import (
    PointSet,
    KroneckerParams,
    kronecker_set,
    kronecker_with_unit_first,
    fibonacci_set,
    sobol_set,
    save_csv,
    load_csv,
)
from kronlow.discrepancy import (
    DiscrepancyResult,
    local_discrepancy,
    star_discrepancy_oracle,
    star_discrepancy_exact,
)
from kronlow.optimize import (
    OptimizerConfig,
    OptResult,
    cmaes_minimize,
    random_search_minimize,
    optimize_kronecker,
)
from kronlow.tune import (
    TuningScenario,
    TunedConfig,
    race_tune,
    evaluate_config_over_interval,
    interval_study,
)
from kronlow.bench import (
    BenchmarkRecord,
    reference_table,
    reproduce_table1,
    heatmap_scan,
    inverse_discrepancy,
)

__version__ = "0.1.0"

__all__ = [
    "PointSet",
    "KroneckerParams",
    "kronecker_set",
    "kronecker_with_unit_first",
    "fibonacci_set",
    "sobol_set",
    "save_csv",
    "load_csv",
    "DiscrepancyResult",
    "local_discrepancy",
    "star_discrepancy_oracle",
    "star_discrepancy_exact",
    "OptimizerConfig",
    "OptResult",
    "cmaes_minimize",
    "random_search_minimize",
    "optimize_kronecker",
    "TuningScenario",
    "TunedConfig",
    "race_tune",
    "evaluate_config_over_interval",
    "interval_study",
    "BenchmarkRecord",
    "reference_table",
    "reproduce_table1",
    "heatmap_scan",
    "inverse_discrepancy",
    "__version__",
]
