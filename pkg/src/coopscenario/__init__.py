"""Probabilistically robust stability certificates for cooperative games
whose coalition values are uncertain and known only through samples."""

__version__ = "0.1.0"

from .certificates import (
    CertificateReport,
    core_certificate,
    eps_apriori,
    eps_posteriori,
    risk_interval,
    risk_roots,
    theta_bound,
)
from .config import ExperimentConfig, load_config
from .core import (
    CompressionResult,
    CorePolytope,
    apriori_complexity,
    build_core,
    coalition_minima,
    compression_set,
    is_empty,
    membership,
)
from .game import (
    GameDefinition,
    ScenarioGame,
    UncertaintyModel,
    enumerate_coalitions,
    sample_scenarios,
    worst_case_values,
)
from .relaxation import RelaxationResult, certify_relaxed, count_active_samples, solve_relaxed
from .validation import (
    ViolationEstimate,
    core_violates,
    estimate_core_instability,
    estimate_point_instability,
    point_violates,
)
