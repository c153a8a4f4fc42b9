"""Probabilistic tactical flow-and-capacity planning.

Propagates trajectory timing uncertainty onto sector occupancy counts in
closed form (Poisson-Binomial per bin) and searches the space of target
times with a bi-objective evolutionary optimizer trading expected delay
against expected congestion.
"""

from .errors import (
    ConstraintViolationError,
    DegenerateSpecError,
    FlowcapError,
    HorizonOverflowError,
    ModelInconsistencyError,
    NormalizationError,
    SchemaError,
    SizeCapError,
)
from .montecarlo import McConfig, McResult, simulate
from .nsga2 import MoeaConfig, MoeaResult, hypervolume, run
from .objectives import CostConfig, Evaluator, ObjectivePoint, decode, dominates, genome_length
from .occupancy import (
    Alarm,
    OccupancyField,
    Sector,
    congestion_pmf_direct,
    congestion_pmf_enumerate,
    congestion_pmf_fft,
    monitor_alarms,
    occupancy_field,
    presence_probability,
)
from .prob import DiscretePdf, TimeGrid, TriangularSpec, discretize_triangular
from .scenario import (
    Scenario,
    apply_disruption,
    generate_grid_instance,
    generate_x_instance,
    load_scenario,
    nominal_intents,
    save_scenario,
    scenario_hash,
)
from .trajectory import (
    FlightPlan,
    Segment,
    SpeedEnvelope,
    Waypoint,
    feasible_bounds,
    propagate_marginals,
)

__version__ = "0.1.0"

__all__ = [
    "Alarm",
    "ConstraintViolationError",
    "CostConfig",
    "DegenerateSpecError",
    "DiscretePdf",
    "Evaluator",
    "FlightPlan",
    "FlowcapError",
    "HorizonOverflowError",
    "McConfig",
    "McResult",
    "ModelInconsistencyError",
    "MoeaConfig",
    "MoeaResult",
    "NormalizationError",
    "ObjectivePoint",
    "OccupancyField",
    "Scenario",
    "SchemaError",
    "Sector",
    "Segment",
    "SizeCapError",
    "SpeedEnvelope",
    "TimeGrid",
    "TriangularSpec",
    "Waypoint",
    "apply_disruption",
    "congestion_pmf_direct",
    "congestion_pmf_enumerate",
    "congestion_pmf_fft",
    "decode",
    "discretize_triangular",
    "dominates",
    "feasible_bounds",
    "generate_grid_instance",
    "generate_x_instance",
    "genome_length",
    "hypervolume",
    "load_scenario",
    "monitor_alarms",
    "nominal_intents",
    "occupancy_field",
    "presence_probability",
    "propagate_marginals",
    "run",
    "save_scenario",
    "scenario_hash",
    "simulate",
]
