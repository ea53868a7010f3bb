"""Metric spaces instances live on.

Four kinds: an explicit distance matrix, the real line, the Euclidean plane
and a ring of fixed circumference.  Matrix/line/ring support exact rational
arithmetic; the plane produces irrational distances and is float-only.
Metric objects are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .scalars import EXACT, FLOAT, Scalar, parse_scalar, dump_scalar


class InvalidPointError(ValueError):
    """A point does not fit the declared metric kind."""


@dataclass(frozen=True)
class MetricViolation:
    """Names the metric axiom a distance matrix breaks, and where."""

    axiom: str  # 'identity' | 'symmetry' | 'triangle' | 'negative'
    points: tuple

    def describe(self) -> str:
        return f"{self.axiom} violated at {self.points}"


class Metric:
    """Common surface: ``distance``, ``check_point``, ``validate``."""

    kind: str

    def distance(self, a, b) -> Scalar:
        raise NotImplementedError

    def check_point(self, p) -> None:
        raise NotImplementedError

    def validate(self) -> Optional[MetricViolation]:
        """None when the metric axioms hold; a report otherwise."""
        return None

    def parse_point(self, value, mode: str):
        raise NotImplementedError

    def dump_point(self, p, mode: str):
        raise NotImplementedError

    def payload(self, mode: str) -> dict:
        """JSON payload merged into ``{"kind": ...}``."""
        return {}


@dataclass(frozen=True)
class LineMetric(Metric):
    """The real line; points are scalars, distance is absolute difference."""

    kind: str = "line"

    def distance(self, a, b):
        return abs(a - b)

    def check_point(self, p):
        _require_scalar(self, p)

    def parse_point(self, value, mode):
        return parse_scalar(value, mode)

    def dump_point(self, p, mode):
        return dump_scalar(p, mode)


@dataclass(frozen=True)
class RingMetric(Metric):
    """A circle of circumference ``h``; distance is the shorter arc.

    Point values are arc positions, normalized into [0, h) at construction
    so equal positions compare equal.
    """

    h: Scalar
    kind: str = "ring"

    def __post_init__(self):
        if self.h <= 0:
            raise InvalidPointError(f"ring circumference must be positive, got {self.h}")

    def normalize(self, p):
        return p % self.h

    def distance(self, a, b):
        d = abs(a - b)
        return min(d, self.h - d)

    def check_point(self, p):
        _require_scalar(self, p)
        if not (0 <= p < self.h):
            raise InvalidPointError(f"ring position {p} outside [0, {self.h})")

    def parse_point(self, value, mode):
        return self.normalize(parse_scalar(value, mode))

    def dump_point(self, p, mode):
        return dump_scalar(p, mode)

    def payload(self, mode):
        return {"h": dump_scalar(self.h, mode)}


@dataclass(frozen=True)
class EuclideanMetric(Metric):
    """The plane; points are (x, y) pairs.  Float mode only."""

    kind: str = "euclidean"

    def distance(self, a, b):
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def check_point(self, p):
        if (
            not isinstance(p, tuple)
            or len(p) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in p)
        ):
            raise InvalidPointError(f"euclidean point must be an (x, y) pair, got {p!r}")

    def parse_point(self, value, mode):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise InvalidPointError(f"euclidean point must be [x, y], got {value!r}")
        return (parse_scalar(value[0], mode), parse_scalar(value[1], mode))

    def dump_point(self, p, mode):
        return [dump_scalar(p[0], mode), dump_scalar(p[1], mode)]


@dataclass(frozen=True)
class MatrixMetric(Metric):
    """An explicit symmetric distance matrix; points are row indices."""

    dist: tuple
    kind: str = "matrix"

    @property
    def size(self) -> int:
        return len(self.dist)

    def distance(self, a, b):
        return self.dist[a][b]

    def check_point(self, p):
        if isinstance(p, bool) or not isinstance(p, int):
            raise InvalidPointError(f"matrix point must be an index, got {p!r}")
        if not 0 <= p < self.size:
            raise InvalidPointError(f"matrix index {p} outside 0..{self.size - 1}")

    def validate(self):
        n = self.size
        for row in self.dist:
            if len(row) != n:
                return MetricViolation("shape", (n, len(row)))
        for i in range(n):
            if self.dist[i][i] != 0:
                return MetricViolation("identity", (i,))
            for j in range(n):
                if self.dist[i][j] < 0:
                    return MetricViolation("negative", (i, j))
                if self.dist[i][j] != self.dist[j][i]:
                    return MetricViolation("symmetry", (i, j))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.dist[i][j] > self.dist[i][k] + self.dist[k][j]:
                        return MetricViolation("triangle", (i, j, k))
        return None

    def parse_point(self, value, mode):
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidPointError(f"matrix point must be an integer index, got {value!r}")
        return value

    def dump_point(self, p, mode):
        return p

    def payload(self, mode):
        return {"dist": [[dump_scalar(x, mode) for x in row] for row in self.dist]}


def distance(metric: Metric, a, b) -> Scalar:
    """Distance between two points valid for ``metric``."""
    metric.check_point(a)
    metric.check_point(b)
    return metric.distance(a, b)


def validate_metric(metric: Metric) -> Optional[MetricViolation]:
    """Exhaustive axiom check for matrix metrics; built-ins hold by construction."""
    return metric.validate()


def parse_metric(doc: dict, mode: str) -> Metric:
    """Build a metric from its JSON form, raising on malformed payloads."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidPointError(f"metric must be an object with a 'kind', got {doc!r}")
    kind = doc["kind"]
    if kind == "line":
        return LineMetric()
    if kind == "euclidean":
        return EuclideanMetric()
    if kind == "ring":
        if "h" not in doc:
            raise InvalidPointError("ring metric needs a circumference 'h'")
        return RingMetric(h=parse_scalar(doc["h"], mode))
    if kind == "matrix":
        rows = doc.get("dist")
        if not isinstance(rows, list) or not rows:
            raise InvalidPointError("matrix metric needs a nonempty 'dist' matrix")
        dist = tuple(tuple(parse_scalar(x, mode) for x in row) for row in rows)
        return MatrixMetric(dist=dist)
    raise InvalidPointError(f"unknown metric kind {kind!r}")


def dump_metric(metric: Metric, mode: str) -> dict:
    doc = {"kind": metric.kind}
    doc.update(metric.payload(mode))
    return doc


def default_mode(metric: Metric) -> str:
    """Exact for matrix/line/ring, float for the plane."""
    return FLOAT if metric.kind == "euclidean" else EXACT


def _require_scalar(metric, p):
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction)):
        raise InvalidPointError(f"{metric.kind} point must be a scalar, got {p!r}")
