from fractions import Fraction

import pytest

from delaymatch.metric import (
    EuclideanMetric,
    InvalidPointError,
    LineMetric,
    MatrixMetric,
    RingMetric,
    default_mode,
    distance,
    dump_metric,
    parse_metric,
    validate_metric,
)
from delaymatch.scalars import EXACT, FLOAT


def test_line_distance_is_absolute_difference():
    m = LineMetric()
    assert m.distance(Fraction(3), Fraction(-2)) == 5
    assert m.distance(Fraction(1, 2), Fraction(1, 2)) == 0


def test_ring_distance_wraps_the_short_way():
    m = RingMetric(Fraction(1))
    assert m.distance(Fraction(1, 8), Fraction(7, 8)) == Fraction(1, 4)
    assert m.distance(Fraction(0), Fraction(1, 2)) == Fraction(1, 2)
    # positions are taken modulo the circumference
    assert m.distance(Fraction(9, 8), Fraction(1, 8)) == 0


def test_ring_rejects_nonpositive_circumference():
    with pytest.raises(InvalidPointError):
        RingMetric(Fraction(0))


def test_euclidean_distance():
    m = EuclideanMetric()
    assert m.distance((0.0, 0.0), (3.0, 4.0)) == 5.0


def test_matrix_distance_looks_up_entries():
    m = MatrixMetric(((0, 2), (2, 0)))
    assert m.distance(0, 1) == 2
    with pytest.raises(InvalidPointError):
        distance(m, 0, 5)


def test_matrix_validation_catches_axiom_breaches():
    asym = MatrixMetric(((0, 1), (2, 0)))
    assert validate_metric(asym).axiom == "symmetry"
    tri = MatrixMetric(((0, 1, 5), (1, 0, 1), (5, 1, 0)))
    assert validate_metric(tri).axiom == "triangle"
    neg = MatrixMetric(((0, -1), (-1, 0)))
    assert validate_metric(neg).axiom == "negative"
    diag = MatrixMetric(((1, 2), (2, 0)))
    assert validate_metric(diag).axiom == "identity"
    ok = MatrixMetric(((0, 1, 2), (1, 0, 1), (2, 1, 0)))
    assert validate_metric(ok) is None


def test_metric_violation_describes_itself():
    v = validate_metric(MatrixMetric(((0, 1, 5), (1, 0, 1), (5, 1, 0))))
    text = v.describe()
    assert "triangle" in text


def test_parse_dump_round_trip():
    for doc, mode in [
        ({"kind": "line"}, EXACT),
        ({"kind": "ring", "h": "5/2"}, EXACT),
        ({"kind": "euclidean"}, FLOAT),
        ({"kind": "matrix", "dist": [[0, 2], [2, 0]]}, EXACT),
    ]:
        metric = parse_metric(doc, mode)
        again = parse_metric(dump_metric(metric, mode), mode)
        assert dump_metric(again, mode) == dump_metric(metric, mode)


def test_parse_rejects_unknown_kind_and_bad_payload():
    with pytest.raises(InvalidPointError):
        parse_metric({"kind": "hyperbolic"}, EXACT)
    with pytest.raises(InvalidPointError):
        parse_metric({"kind": "matrix"}, EXACT)


def test_default_mode_is_float_only_for_euclidean():
    assert default_mode(EuclideanMetric()) == FLOAT
    assert default_mode(LineMetric()) == EXACT
    assert default_mode(RingMetric(Fraction(1))) == EXACT


def test_point_parsing_per_kind():
    line = LineMetric()
    assert line.parse_point("7/3", EXACT) == Fraction(7, 3)
    eu = EuclideanMetric()
    assert eu.parse_point([1.5, -2.0], FLOAT) == (1.5, -2.0)
    with pytest.raises(InvalidPointError):
        eu.parse_point([1.0], FLOAT)
    mat = MatrixMetric(((0, 2), (2, 0)))
    assert mat.parse_point(1, EXACT) == 1
    with pytest.raises(InvalidPointError):
        mat.check_point(2)  # decoding is typed; range lives in check_point
    with pytest.raises(InvalidPointError):
        mat.parse_point(True, EXACT)
