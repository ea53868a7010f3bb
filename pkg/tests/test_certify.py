from dataclasses import replace
from fractions import Fraction

import pytest

from delaymatch.certify import (
    certify,
    certify_events,
    marked_path_check,
    ratio_report,
)
from delaymatch.engine import (
    GROW,
    MATCH,
    TIGHT,
    EventRecord,
    events_from_jsonl,
    events_to_jsonl,
    run,
)
from delaymatch.generators import gen_random_instance, gen_ring_instance, gen_tightness_instance
from delaymatch.instance import MBPMD, MPMD, make_instance
from delaymatch.offline import opt_brute

LINE = {"kind": "line"}


@pytest.fixture(scope="module")
def tight4():
    inst = gen_tightness_instance(4)
    return inst, run(inst)


def test_clean_runs_certify(tight4):
    inst, res = tight4
    cert = certify(inst, res)
    assert cert.ok
    assert cert.total_cost == res.total_cost
    assert cert.dual_objective == res.dual_objective
    assert cert.num_marked_edges == res.num_marked_edges
    assert cert.min_slack == 0  # marked edges sit exactly at budget
    assert all(s >= 0 for _, _, s in cert.edge_slacks)


def test_certificate_serializes(tight4):
    inst, res = tight4
    doc = certify(inst, res).to_json()
    assert doc["ok"] is True
    assert doc["total_cost"] == "23/2"
    assert doc["min_slack"] == 0


def test_trace_round_trip_certifies(tight4):
    inst, res = tight4
    events = events_from_jsonl(events_to_jsonl(res), inst.mode)
    cert = certify_events(inst, events)
    assert cert.ok
    assert cert.total_cost == res.total_cost


def _tamper(events, index, **changes):
    ev = events[index]
    payload = dict(ev.payload)
    payload.update({k: v for k, v in changes.items() if k not in ("t",)})
    t = changes.get("t", ev.t)
    return events[:index] + [EventRecord(t=t, kind=ev.kind, payload=payload)] + events[index + 1 :]


def test_inflated_growth_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == GROW)
    ev = events[idx]
    bump = Fraction(1, 100)
    verdict = certify_events(
        inst, _tamper(events, idx, t=ev.t + bump, to=ev.payload["to"] + bump)
    )
    assert not verdict.ok
    assert verdict.prop in ("potential", "dual-feasibility")
    assert verdict.event_index == idx


def test_incoherent_growth_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == GROW)
    verdict = certify_events(
        inst, _tamper(events, idx, to=events[idx].payload["to"] + Fraction(1, 100))
    )
    assert not verdict.ok
    assert verdict.prop == "trace-shape"


def test_dropped_growth_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == GROW)
    verdict = certify_events(inst, events[:idx] + events[idx + 1 :])
    assert not verdict.ok


def test_dropped_match_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == MATCH)
    verdict = certify_events(inst, events[:idx] + events[idx + 1 :])
    assert not verdict.ok
    assert verdict.prop in ("surplus", "matching-validity")


def test_shifted_match_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == MATCH)
    verdict = certify_events(inst, _tamper(events, idx, t=events[idx].t + 1))
    assert not verdict.ok
    assert verdict.prop == "trace-shape"


def test_swapped_tight_pair_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = next(i for i, e in enumerate(events) if e.kind == TIGHT)
    verdict = certify_events(inst, _tamper(events, idx, u=0, v=3))
    assert not verdict.ok


def test_truncated_trace_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    verdict = certify_events(inst, events[: len(events) // 2])
    assert not verdict.ok
    assert verdict.prop == "matching-validity"


def test_double_match_is_caught(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == MATCH)
    verdict = certify_events(inst, events + [events[idx]])
    assert not verdict.ok
    assert verdict.prop in ("matching-validity", "trace-shape")


def test_tampered_summary_is_caught(tight4):
    inst, res = tight4
    verdict = certify(inst, replace(res, total_cost=res.total_cost + 1))
    assert not verdict.ok
    assert verdict.prop == "summary-consistency"
    verdict = certify(inst, replace(res, dual_objective=res.dual_objective - Fraction(1, 7)))
    assert not verdict.ok
    assert verdict.prop == "summary-consistency"


def test_violation_report_serializes(tight4):
    inst, res = tight4
    events = list(res.event_log)
    idx = max(i for i, e in enumerate(events) if e.kind == MATCH)
    verdict = certify_events(inst, _tamper(events, idx, t=events[idx].t + 1))
    doc = verdict.to_json()
    assert doc["ok"] is False
    assert doc["property"] == verdict.prop
    assert doc["event_index"] == idx


def test_marked_path_check_on_matched_pairs(tight4):
    inst, res = tight4
    dual = res.dual_objective
    for u, v, _ in res.matching:
        check = marked_path_check(inst, res, (u, v))
        assert check.path[0] == u and check.path[-1] == v
        assert check.distance <= check.path_length
        assert check.max_crossings <= 2
        assert check.distance <= 2 * dual


def test_marked_path_check_rejects_disconnected_pairs():
    # two far groups merge internally; no marked path joins them
    inst = make_instance(MPMD, LINE, [(0, 0, 0), (0, 0, 0), (100, 0, 0), (100, 0, 0)])
    res = run(inst)
    with pytest.raises(ValueError):
        marked_path_check(inst, res, (0, 2))


def test_ratio_report_against_dual_and_opt(tight4):
    inst, res = tight4
    sol = opt_brute(inst)
    report = ratio_report(inst, res, sol.value)
    assert report.bound_factor == 2 * 4 + 1
    assert report.ratio_vs_opt == Fraction(23, 2) / Fraction(7, 2)
    assert report.ratio_vs_dual == Fraction(23, 2) / Fraction(7, 2)
    assert report.within_bound
    doc = report.to_json()
    assert doc["ratio_vs_opt"] == "23/7"
    assert doc["within_bound"] is True


def test_ratio_report_handles_zero_cost_instances():
    inst = make_instance(MPMD, LINE, [(0, 0, 0), (0, 0, 0)])
    res = run(inst)
    report = ratio_report(inst, res, Fraction(0))
    assert report.ratio_vs_dual is None
    assert report.ratio_vs_opt is None
    assert report.within_bound


def test_certifier_covers_all_generator_families():
    cases = [
        gen_tightness_instance(6),
        gen_tightness_instance(6, variant=MBPMD),
        gen_ring_instance(6),
        gen_random_instance(seed=1, m=4, variant=MPMD, metric_kind="matrix"),
        gen_random_instance(seed=2, m=4, variant=MBPMD, metric_kind="ring"),
        gen_random_instance(seed=3, m=3, variant=MPMD, metric_kind="euclidean"),
    ]
    for inst in cases:
        res = run(inst)
        cert = certify(inst, res)
        assert cert.ok, cert.to_json()
