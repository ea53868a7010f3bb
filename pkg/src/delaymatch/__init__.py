"""Min-cost perfect matching with delays: an online dual-growth matcher, an
independent run certifier, offline optima, and instance generators."""

from .certify import (
    DualCertificate,
    PathCheck,
    RatioReport,
    ViolationReport,
    certify,
    certify_events,
    marked_path_check,
    ratio_report,
)
from .engine import (
    EngineInvariantError,
    EventRecord,
    GreedyDualEngine,
    RunResult,
    SetRecord,
    events_from_jsonl,
    events_to_jsonl,
    run,
)
from .generators import gen_random_instance, gen_ring_instance, gen_tightness_instance
from .instance import (
    MBPMD,
    MPMD,
    Instance,
    InstanceError,
    Request,
    dump_instance,
    edge_cost,
    instance_json,
    make_instance,
    parse_instance,
    surplus,
)
from .metric import (
    EuclideanMetric,
    InvalidPointError,
    LineMetric,
    MatrixMetric,
    Metric,
    MetricViolation,
    RingMetric,
    validate_metric,
)
from .offline import (
    BruteForceSizeError,
    OptSolution,
    VariantError,
    opt_brute,
    opt_hungarian,
)
from .scalars import EXACT, FLOAT, ScalarError, dump_scalar, parse_scalar

__version__ = "0.1.0"

__all__ = [
    "DualCertificate",
    "PathCheck",
    "RatioReport",
    "ViolationReport",
    "certify",
    "certify_events",
    "marked_path_check",
    "ratio_report",
    "EngineInvariantError",
    "EventRecord",
    "GreedyDualEngine",
    "RunResult",
    "SetRecord",
    "events_from_jsonl",
    "events_to_jsonl",
    "run",
    "gen_random_instance",
    "gen_ring_instance",
    "gen_tightness_instance",
    "MBPMD",
    "MPMD",
    "Instance",
    "InstanceError",
    "Request",
    "dump_instance",
    "edge_cost",
    "instance_json",
    "make_instance",
    "parse_instance",
    "surplus",
    "EuclideanMetric",
    "InvalidPointError",
    "LineMetric",
    "MatrixMetric",
    "Metric",
    "MetricViolation",
    "RingMetric",
    "validate_metric",
    "BruteForceSizeError",
    "OptSolution",
    "VariantError",
    "opt_brute",
    "opt_hungarian",
    "EXACT",
    "FLOAT",
    "ScalarError",
    "dump_scalar",
    "parse_scalar",
]
