"""Request sequences, eligibility, validation and JSON serialization.

An instance is a metric, a numeric mode and an even-length list of requests
in nondecreasing arrival order.  The bipartite variant ("mbpmd") carries
balanced +1/-1 polarities; the plain variant ("mpmd") has polarity 0
everywhere.  Instances are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .metric import (
    Metric,
    InvalidPointError,
    default_mode,
    dump_metric,
    parse_metric,
    validate_metric,
)
from .scalars import EXACT, FLOAT, MODES, Scalar, ScalarError, dump_scalar, parse_scalar

MPMD = "mpmd"
MBPMD = "mbpmd"
VARIANTS = (MPMD, MBPMD)


class InstanceError(ValueError):
    """The document or constructor arguments do not form a valid instance."""


@dataclass(frozen=True)
class Request:
    """One arriving demand: stable index, location, arrival time, polarity."""

    index: int
    pos: object
    atime: Scalar
    sgn: int = 0


@dataclass(frozen=True)
class Edge:
    """An eligible pair with its dual-constraint budget."""

    u: int
    v: int
    cost: Scalar


@dataclass(frozen=True)
class Instance:
    variant: str
    mode: str
    metric: Metric
    requests: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _validate(self)

    @property
    def m(self) -> int:
        return len(self.requests) // 2

    def eligible(self, u: int, v: int) -> bool:
        """Whether requests u and v may be matched with each other."""
        if u == v:
            return False
        return self.requests[u].sgn == -self.requests[v].sgn

    def eligible_pairs(self):
        """All eligible index pairs (u, v) with u < v."""
        n = len(self.requests)
        return [
            (u, v) for u in range(n) for v in range(u + 1, n) if self.eligible(u, v)
        ]


def edge_cost(inst: Instance, u: int, v: int) -> Optional[Scalar]:
    """Constraint budget dist + |arrival gap|, or None for an ineligible pair.

    Ineligibility (equal nonzero polarities) is a value, not a failure.
    """
    n = len(inst.requests)
    if not (0 <= u < n and 0 <= v < n):
        raise InstanceError(f"request index out of range: ({u}, {v})")
    if u == v:
        raise InstanceError(f"edge endpoints must differ, got ({u}, {v})")
    if not inst.eligible(u, v):
        return None
    ru, rv = inst.requests[u], inst.requests[v]
    return inst.metric.distance(ru.pos, rv.pos) + abs(ru.atime - rv.atime)


def edge(inst: Instance, u: int, v: int) -> Optional[Edge]:
    cost = edge_cost(inst, u, v)
    if cost is None:
        return None
    return Edge(min(u, v), max(u, v), cost)


def surplus(inst: Instance, members) -> int:
    """Requests left over by a maximum matching inside ``members``.

    Plain variant: parity of the set size.  Bipartite: absolute polarity
    imbalance.
    """
    members = set(members)
    for u in members:
        if not 0 <= u < len(inst.requests):
            raise InstanceError(f"request index out of range: {u}")
    if inst.variant == MPMD:
        return len(members) % 2
    return abs(sum(inst.requests[u].sgn for u in members))


def _validate(inst: Instance) -> None:
    if inst.variant not in VARIANTS:
        raise InstanceError(f"unknown variant {inst.variant!r}")
    if inst.mode not in MODES:
        raise InstanceError(f"unknown mode {inst.mode!r}")
    if inst.metric.kind == "euclidean" and inst.mode == EXACT:
        raise InstanceError("euclidean metrics produce irrational distances; use float mode")
    violation = validate_metric(inst.metric)
    if violation is not None:
        raise InstanceError(f"metric invalid: {violation.describe()}")
    if len(inst.requests) % 2 != 0:
        raise InstanceError(f"request count must be even, got {len(inst.requests)}")
    prev = None
    balance = 0
    for i, req in enumerate(inst.requests):
        if req.index != i:
            raise InstanceError(f"request {i} carries index {req.index}")
        try:
            inst.metric.check_point(req.pos)
        except InvalidPointError as exc:
            raise InstanceError(f"request {i}: {exc}") from None
        if req.atime < 0:
            raise InstanceError(f"request {i}: negative arrival time {req.atime}")
        if prev is not None and req.atime < prev:
            raise InstanceError(
                f"arrival times must be nondecreasing; request {i} arrives at "
                f"{req.atime} after {prev}"
            )
        prev = req.atime
        if inst.variant == MPMD:
            if req.sgn != 0:
                raise InstanceError(f"request {i}: polarity must be 0 in mpmd")
        else:
            if req.sgn not in (-1, 1):
                raise InstanceError(f"request {i}: polarity must be +1/-1 in mbpmd")
            balance += req.sgn
    if inst.variant == MBPMD and balance != 0:
        raise InstanceError(f"unbalanced polarities: sum of signs is {balance}")


def make_instance(variant, metric, requests, mode=None) -> Instance:
    """Build an instance from (pos, atime, sgn) triples, indexing in order.

    ``metric`` may be a Metric or a metric document like {"kind": "line"}.
    """
    if isinstance(metric, dict):
        if mode is None:
            mode = FLOAT if metric.get("kind") == "euclidean" else EXACT
        metric = parse_metric(metric, mode)
    elif mode is None:
        mode = default_mode(metric)
    reqs = tuple(
        Request(index=i, pos=pos, atime=atime, sgn=sgn)
        for i, (pos, atime, sgn) in enumerate(requests)
    )
    return Instance(variant=variant, mode=mode, metric=metric, requests=reqs)


def parse_instance(doc, default: str = None) -> Instance:
    """Validate an instance document (dict or JSON text) into an Instance.

    ``default`` overrides the metric-derived default mode when the document
    does not declare one (the CLI wires DM_MODE through here).
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceError(f"instance document must be an object, got {type(doc).__name__}")
    unknown = set(doc) - {"variant", "mode", "metric", "requests"}
    if unknown:
        raise InstanceError(f"unknown instance fields: {sorted(unknown)}")
    variant = doc.get("variant")
    if variant not in VARIANTS:
        raise InstanceError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if "metric" not in doc:
        raise InstanceError("instance document lacks a 'metric'")

    mode = doc.get("mode")
    if mode is None:
        # Payload scalars are parsed in the mode we settle on, so peek at the
        # kind before constructing the metric.
        kind = doc["metric"].get("kind") if isinstance(doc["metric"], dict) else None
        mode = default if default is not None else (FLOAT if kind == "euclidean" else EXACT)
    if mode not in MODES:
        raise InstanceError(f"mode must be one of {MODES}, got {mode!r}")

    try:
        metric = parse_metric(doc["metric"], mode)
    except (InvalidPointError, ScalarError) as exc:
        raise InstanceError(f"bad metric: {exc}") from None

    raw = doc.get("requests")
    if not isinstance(raw, list):
        raise InstanceError("'requests' must be a list")
    reqs = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or not {"pos", "atime"} <= set(entry):
            raise InstanceError(f"request {i} must be an object with pos and atime")
        sgn = entry.get("sgn", 0)
        if isinstance(sgn, bool) or not isinstance(sgn, int):
            raise InstanceError(f"request {i}: sgn must be an integer")
        try:
            pos = metric.parse_point(entry["pos"], mode)
            atime = parse_scalar(entry["atime"], mode)
        except (InvalidPointError, ScalarError) as exc:
            raise InstanceError(f"request {i}: {exc}") from None
        reqs.append(Request(index=i, pos=pos, atime=atime, sgn=sgn))
    return Instance(variant=variant, mode=mode, metric=metric, requests=tuple(reqs))


def dump_instance(inst: Instance) -> dict:
    """The JSON-ready document; ``parse_instance`` round-trips it exactly."""
    return {
        "variant": inst.variant,
        "mode": inst.mode,
        "metric": dump_metric(inst.metric, inst.mode),
        "requests": [
            {
                "pos": inst.metric.dump_point(r.pos, inst.mode),
                "atime": dump_scalar(r.atime, inst.mode),
                "sgn": r.sgn,
            }
            for r in inst.requests
        ],
    }


def instance_json(inst: Instance) -> str:
    """Canonical serialized form (byte-deterministic for equal instances)."""
    return json.dumps(dump_instance(inst), indent=2) + "\n"
