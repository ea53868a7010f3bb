"""Independent certification of engine runs.

The certifier replays an event log against the instance it claims to solve,
rebuilding every dual variable, potential, active set, marked edge, and match
from the events alone.  It never reads engine caches, so a bug (or a tampered
trace) has to re-derive consistent state to slip through.  Checks fall into
three groups:

* admissibility of each event against the replayed state (clock discipline,
  arrival order, growth bookkeeping, merge references);
* state properties re-verified during the replay: partition of arrived
  requests by active sets, surplus counts, potential-equals-waiting for free
  requests, dual feasibility of every eligible pair;
* endgame properties: marked edges form a spanning forest with one tree per
  active set and exactly tight budgets, waiting cost equals the dual
  objective, matched pairs connect through the marked forest cheaply, and the
  total cost respects the guarantee factor (2m + 1).

The first failed check wins: certification returns a ViolationReport naming
the property, a witness, and the index of the offending event.  Clean replays
return a DualCertificate with the re-derived totals and per-pair slacks.

Dual feasibility is re-checked after every single growth event, not only at
settled instants.  Growth is linear, so values between two checked endpoints
stay between the endpoint values; checking each endpoint makes an inflated or
misattributed growth step surface immediately as a feasibility or potential
violation instead of hiding inside a batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import ARRIVAL, GROW, MATCH, MERGE, TIGHT, RunResult
from .instance import Instance, edge_cost, surplus
from .scalars import EPS_TIGHT, EXACT, Scalar, dump_scalar

GUARANTEE_SLOPE = 2  # total cost is bounded by (2m + 1) times the dual objective


@dataclass(frozen=True)
class DualCertificate:
    """A verified run: re-derived totals plus the slack of every constraint."""

    mode: str
    m: int
    connection_cost: Scalar
    waiting_cost: Scalar
    total_cost: Scalar
    dual_objective: Scalar
    num_events: int
    num_sets: int
    num_marked_edges: int
    edge_slacks: tuple  # ((u, v, slack), ...) sorted by pair, final values

    @property
    def ok(self) -> bool:
        return True

    @property
    def min_slack(self):
        return min((s for _, _, s in self.edge_slacks), default=None)

    def to_json(self) -> dict:
        mode = self.mode
        return {
            "ok": True,
            "m": self.m,
            "connection_cost": dump_scalar(self.connection_cost, mode),
            "waiting_cost": dump_scalar(self.waiting_cost, mode),
            "total_cost": dump_scalar(self.total_cost, mode),
            "dual_objective": dump_scalar(self.dual_objective, mode),
            "num_events": self.num_events,
            "num_sets": self.num_sets,
            "num_marked_edges": self.num_marked_edges,
            "min_slack": None if self.min_slack is None else dump_scalar(self.min_slack, mode),
            "edge_slacks": [
                [u, v, dump_scalar(s, mode)] for u, v, s in self.edge_slacks
            ],
        }


@dataclass(frozen=True)
class ViolationReport:
    """The earliest property breach found while replaying a run."""

    prop: str
    detail: str
    witness: dict
    event_index: int  # index into the event log; -1 for endgame checks

    @property
    def ok(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {
            "ok": False,
            "property": self.prop,
            "detail": self.detail,
            "witness": self.witness,
            "event_index": self.event_index,
        }


@dataclass(frozen=True)
class PathCheck:
    """Marked-forest route for one matched pair, with the bound inputs."""

    pair: tuple
    path: tuple  # request indices from u to v through the marked forest
    path_length: Scalar
    distance: Scalar
    max_crossings: int  # worst number of times the path leaves any one set


class _Violation(Exception):
    def __init__(self, prop, detail, witness, event_index):
        super().__init__(f"{prop}: {detail}")
        self.report = ViolationReport(prop, detail, witness, event_index)


class _RSet:
    __slots__ = (
        "set_id",
        "members",
        "sur",
        "y",
        "free",
        "active",
        "created_at",
        "growth_end",
    )

    def __init__(self, set_id, members, sur, created_at, zero):
        self.set_id = set_id
        self.members = members
        self.sur = sur
        self.y = zero
        self.free = set(members)
        self.active = True
        self.created_at = created_at
        self.growth_end = created_at


class _Replay:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.mode = inst.mode
        n = len(inst.requests)
        self.zero = Fraction(0) if self.mode == EXACT else 0.0
        self.clock = self.zero
        self.next_arrival = 0
        self.potential = [self.zero] * n
        self.assign = [None] * n
        self.sets: list[_RSet] = []
        self.frozen = {}
        self.marked = []
        self.matching = []
        self.matched = [False] * n
        self.pending_tight = None
        self.index = -1
        self.pairs = []  # (u, v, cost) over all eligible pairs
        for u in range(n):
            for v in range(u + 1, n):
                c = edge_cost(inst, u, v)
                if c is not None:
                    self.pairs.append((u, v, c))
        self.cost = {(u, v): c for u, v, c in self.pairs}

    # -- plumbing ----------------------------------------------------------

    def _fail(self, prop, detail, **witness):
        raise _Violation(prop, detail, self._dump_witness(witness), self.index)

    def _dump_witness(self, witness):
        out = {}
        for k, v in witness.items():
            if isinstance(v, (Fraction, float)):
                out[k] = dump_scalar(v, self.mode)
            else:
                out[k] = v
        return out

    def _eq(self, a, b):
        if self.mode == EXACT:
            return a == b
        return abs(a - b) <= EPS_TIGHT * max(1.0, abs(a), abs(b))

    def _leq(self, a, b):
        if self.mode == EXACT:
            return a <= b
        return a <= b + EPS_TIGHT * max(1.0, abs(a), abs(b))

    def pair_value(self, u, v):
        key = (u, v) if u < v else (v, u)
        if key in self.frozen:
            return self.frozen[key]
        return self.potential[key[0]] + self.potential[key[1]]

    # -- event admission ----------------------------------------------------

    def apply(self, index, ev):
        self.index = index
        handler = {
            ARRIVAL: self._ev_arrival,
            GROW: self._ev_grow,
            TIGHT: self._ev_tight,
            MERGE: self._ev_merge,
            MATCH: self._ev_match,
        }.get(ev.kind)
        if handler is None:
            self._fail("trace-shape", f"unknown event kind {ev.kind!r}", kind=ev.kind)
        if ev.kind not in (MERGE,) and self.pending_tight is not None:
            self._fail("trace-shape", "tight event not followed by its merge")
        handler(ev)

    def _move_clock(self, t):
        if t < self.clock:
            self._fail("trace-shape", "clock moved backwards", at=t, clock=self.clock)
        if t > self.clock:
            self._settle()
            self.clock = t

    def _require_settled(self, t, kind):
        if t != self.clock:
            self._fail(
                "trace-shape",
                f"{kind} event at {dump_scalar(t, self.mode)} but clock is "
                f"{dump_scalar(self.clock, self.mode)}",
                at=t,
                clock=self.clock,
            )

    def _ev_arrival(self, ev):
        u = ev.payload.get("u")
        n = len(self.inst.requests)
        if not isinstance(u, int) or not 0 <= u < n:
            self._fail("trace-shape", "arrival of unknown request", u=u)
        if u != self.next_arrival:
            self._fail("trace-shape", f"arrival out of order: expected {self.next_arrival}, got {u}", u=u)
        req = self.inst.requests[u]
        if ev.t != req.atime:
            self._fail("trace-shape", f"request {u} arrived at the wrong time", u=u, at=ev.t, atime=req.atime)
        self._move_clock(ev.t)
        self.next_arrival += 1
        sid = len(self.sets)
        self.sets.append(_RSet(sid, frozenset({u}), 1, self.clock, self.zero))
        self.assign[u] = sid

    def _ev_grow(self, ev):
        sid = ev.payload.get("set")
        start = ev.payload.get("from")
        end = ev.payload.get("to")
        if not isinstance(sid, int) or not 0 <= sid < len(self.sets):
            self._fail("trace-shape", "growth of unknown set", set=sid)
        rec = self.sets[sid]
        if start is None or end is None:
            self._fail("trace-shape", "growth interval missing an endpoint", set=sid)
        if end != ev.t:
            self._fail("trace-shape", "growth interval must end at the event time", set=sid, to=end, at=ev.t)
        if not start < end:
            self._fail("trace-shape", "empty growth interval", set=sid)
        if not rec.active:
            self._fail("trace-shape", f"set {sid} grew after deactivation", set=sid)
        if not rec.free:
            self._fail("trace-shape", f"set {sid} grew with no free request", set=sid)
        if start != rec.growth_end:
            self._fail(
                "trace-shape",
                f"set {sid} growth starts at {dump_scalar(start, self.mode)}, "
                f"expected {dump_scalar(rec.growth_end, self.mode)}",
                set=sid,
            )
        self._move_clock(ev.t)
        delta = end - start
        rec.y += delta
        rec.growth_end = end
        for u in rec.members:
            self.potential[u] += delta
        # Immediate feasibility sweep: a single inflated growth step must not
        # survive until the end of its batch.
        for u, v, c in self.pairs:
            if self.assign[u] is None or self.assign[v] is None:
                continue
            if not self._leq(self.pair_value(u, v), c):
                self._fail(
                    "dual-feasibility",
                    f"pair ({u}, {v}) over budget after growth of set {sid}",
                    u=u,
                    v=v,
                    value=self.pair_value(u, v),
                    budget=c,
                )

    def _ev_tight(self, ev):
        u, v = ev.payload.get("u"), ev.payload.get("v")
        self._require_settled(ev.t, "tight")
        n = len(self.inst.requests)
        if not (isinstance(u, int) and isinstance(v, int) and 0 <= u < n and 0 <= v < n):
            self._fail("trace-shape", "tight pair out of range", u=u, v=v)
        if self.assign[u] is None or self.assign[v] is None:
            self._fail("trace-shape", "tight pair not fully arrived", u=u, v=v)
        key = (min(u, v), max(u, v))
        if key not in self.cost:
            self._fail("trace-shape", f"tight pair ({u}, {v}) is not eligible", u=u, v=v)
        if self.assign[u] == self.assign[v]:
            self._fail("trace-shape", f"tight pair ({u}, {v}) lies inside one active set", u=u, v=v)
        value = self.pair_value(u, v)
        if not self._eq(value, self.cost[key]):
            self._fail(
                "marked-tightness",
                f"pair ({u}, {v}) declared tight at value {dump_scalar(value, self.mode)}, "
                f"budget {dump_scalar(self.cost[key], self.mode)}",
                u=u,
                v=v,
                value=value,
                budget=self.cost[key],
            )
        self.pending_tight = key

    def _ev_merge(self, ev):
        sid, a, b = ev.payload.get("set"), ev.payload.get("a"), ev.payload.get("b")
        self._require_settled(ev.t, "merge")
        if self.pending_tight is None:
            self._fail("trace-shape", "merge without a preceding tight event")
        if sid != len(self.sets):
            self._fail("trace-shape", f"merge created set {sid}, expected {len(self.sets)}", set=sid)
        if not (isinstance(a, int) and isinstance(b, int) and 0 <= a < len(self.sets) and 0 <= b < len(self.sets)):
            self._fail("trace-shape", "merge of unknown sets", a=a, b=b)
        ra, rb = self.sets[a], self.sets[b]
        if a == b or not (ra.active and rb.active):
            self._fail("trace-shape", f"merge of sets {a} and {b} not currently active", a=a, b=b)
        tu, tv = self.pending_tight
        if {self.assign[tu], self.assign[tv]} != {a, b}:
            self._fail(
                "trace-shape",
                f"merge of sets {a} and {b} does not join the tight pair ({tu}, {tv})",
                a=a,
                b=b,
            )
        members = ra.members | rb.members
        rec = _RSet(sid, members, surplus(self.inst, members), self.clock, self.zero)
        rec.free = ra.free | rb.free
        for x in ra.members:
            for w in rb.members:
                k = (x, w) if x < w else (w, x)
                if k in self.cost:
                    self.frozen[k] = self.potential[x] + self.potential[w]
        ra.active = rb.active = False
        self.sets.append(rec)
        for w in members:
            self.assign[w] = sid
        self.marked.append((self.pending_tight[0], self.pending_tight[1], self.clock))
        self.pending_tight = None

    def _ev_match(self, ev):
        u, v = ev.payload.get("u"), ev.payload.get("v")
        self._require_settled(ev.t, "match")
        n = len(self.inst.requests)
        if not (isinstance(u, int) and isinstance(v, int) and 0 <= u < n and 0 <= v < n and u != v):
            self._fail("matching-validity", "match pair out of range", u=u, v=v)
        if not self.inst.eligible(u, v):
            self._fail("matching-validity", f"matched pair ({u}, {v}) is not eligible", u=u, v=v)
        if self.matched[u] or self.matched[v]:
            self._fail("matching-validity", f"request matched twice in pair ({u}, {v})", u=u, v=v)
        if self.assign[u] is None or self.assign[u] != self.assign[v]:
            self._fail(
                "matching-validity",
                f"pair ({u}, {v}) matched across active sets",
                u=u,
                v=v,
            )
        rec = self.sets[self.assign[u]]
        if u not in rec.free or v not in rec.free:
            self._fail("matching-validity", f"pair ({u}, {v}) was not free", u=u, v=v)
        rec.free.discard(u)
        rec.free.discard(v)
        self.matched[u] = self.matched[v] = True
        self.matching.append((min(u, v), max(u, v), self.clock))

    # -- settled-instant checks ----------------------------------------------

    def _settle(self):
        self._check_partition()
        self._check_surplus()
        self._check_potential()
        self._check_feasibility()

    def _check_partition(self):
        seen = set()
        for rec in self.sets:
            if not rec.active:
                continue
            overlap = seen & rec.members
            if overlap:
                self._fail("partition", f"active sets overlap at request {min(overlap)}", set=rec.set_id)
            seen |= rec.members
            for u in rec.members:
                if self.assign[u] != rec.set_id:
                    self._fail("partition", f"request {u} not assigned to its containing set", u=u)
        if seen != set(range(self.next_arrival)):
            missing = set(range(self.next_arrival)) - seen
            self._fail("partition", "active sets do not cover the arrived requests", missing=sorted(missing))

    def _check_surplus(self):
        for rec in self.sets:
            if not rec.active:
                continue
            s = surplus(self.inst, rec.members)
            if rec.sur != s or len(rec.free) != s:
                self._fail(
                    "surplus",
                    f"set {rec.set_id} has {len(rec.free)} free requests, surplus {s}",
                    set=rec.set_id,
                    free=sorted(rec.free),
                    surplus=s,
                )

    def _check_potential(self):
        for u in range(self.next_arrival):
            bound = self.clock - self.inst.requests[u].atime
            value = self.potential[u]
            if not self._leq(value, bound):
                self._fail(
                    "potential",
                    f"request {u} accumulated {dump_scalar(value, self.mode)}, waited "
                    f"{dump_scalar(bound, self.mode)}",
                    u=u,
                    value=value,
                    waited=bound,
                )
            if not self.matched[u] and not self._eq(value, bound):
                self._fail(
                    "potential",
                    f"free request {u} accumulated {dump_scalar(value, self.mode)}, "
                    f"waited {dump_scalar(bound, self.mode)}",
                    u=u,
                    value=value,
                    waited=bound,
                )

    def _check_feasibility(self):
        for u, v, c in self.pairs:
            if self.assign[u] is None or self.assign[v] is None:
                continue
            if not self._leq(self.pair_value(u, v), c):
                self._fail(
                    "dual-feasibility",
                    f"pair ({u}, {v}) exceeds its budget",
                    u=u,
                    v=v,
                    value=self.pair_value(u, v),
                    budget=c,
                )

    # -- endgame ---------------------------------------------------------------

    def finish(self):
        self.index = -1
        if self.pending_tight is not None:
            self._fail("trace-shape", "trace ends on a dangling tight event")
        self._settle()
        n = len(self.inst.requests)
        if self.next_arrival != n:
            self._fail("matching-validity", f"only {self.next_arrival} of {n} requests arrived")
        unmatched = [u for u in range(n) if not self.matched[u]]
        if unmatched:
            self._fail("matching-validity", "run ended with unmatched requests", unmatched=unmatched)
        self._check_marked_forest()
        self._check_marked_tightness()
        self._check_waiting_equals_dual()
        self._check_paths()
        self._check_total_bound()

    def connection_cost(self):
        total = self.zero
        inst = self.inst
        for u, v, _ in self.matching:
            total += inst.metric.distance(inst.requests[u].pos, inst.requests[v].pos)
        return total

    def waiting_cost(self):
        total = self.zero
        for u, v, t in self.matching:
            total += (t - self.inst.requests[u].atime) + (t - self.inst.requests[v].atime)
        return total

    def dual_objective(self):
        total = self.zero
        for rec in self.sets:
            total += rec.sur * rec.y
        return total

    def _check_marked_forest(self):
        parent = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        for u, v, _ in self.marked:
            ru, rv = find(u), find(v)
            if ru == rv:
                self._fail("marked-forest", f"marked edges close a cycle at ({u}, {v})", u=u, v=v)
            parent[ru] = rv
        for rec in self.sets:
            if not rec.active:
                continue
            inside = sum(1 for u, v, _ in self.marked if u in rec.members and v in rec.members)
            if inside != len(rec.members) - 1:
                self._fail(
                    "marked-forest",
                    f"set {rec.set_id} holds {inside} marked edges over {len(rec.members)} requests",
                    set=rec.set_id,
                )
        for u, v, _ in self.marked:
            if self.assign[u] != self.assign[v]:
                self._fail("marked-forest", f"marked edge ({u}, {v}) crosses active sets", u=u, v=v)

    def _check_marked_tightness(self):
        for u, v, _ in self.marked:
            key = (u, v)
            value = self.frozen.get(key)
            if value is None or not self._eq(value, self.cost[key]):
                self._fail(
                    "marked-tightness",
                    f"marked edge ({u}, {v}) is not tight",
                    u=u,
                    v=v,
                    value=value,
                    budget=self.cost[key],
                )

    def _check_waiting_equals_dual(self):
        waiting = self.waiting_cost()
        dual = self.dual_objective()
        if not self._eq(waiting, dual):
            self._fail(
                "waiting-equals-dual",
                f"waiting cost {dump_scalar(waiting, self.mode)} differs from dual objective "
                f"{dump_scalar(dual, self.mode)}",
                waiting=waiting,
                dual=dual,
            )

    def _check_paths(self):
        dual = self.dual_objective()
        for u, v, _ in self.matching:
            check = marked_path(self.inst, self.marked, self.sets, (u, v), self.mode)
            if check is None:
                self._fail("path-bound", f"no marked path joins matched pair ({u}, {v})", u=u, v=v)
            if not self._leq(check.distance, check.path_length):
                self._fail(
                    "path-bound",
                    f"pair ({u}, {v}): distance exceeds its marked path",
                    u=u,
                    v=v,
                    distance=check.distance,
                    path_length=check.path_length,
                )
            if check.max_crossings > 2:
                self._fail(
                    "path-bound",
                    f"pair ({u}, {v}): marked path crosses one set {check.max_crossings} times",
                    u=u,
                    v=v,
                )
            if not self._leq(check.distance, 2 * dual):
                self._fail(
                    "path-bound",
                    f"pair ({u}, {v}): distance exceeds twice the dual objective",
                    u=u,
                    v=v,
                    distance=check.distance,
                    dual=dual,
                )

    def _check_total_bound(self):
        total = self.connection_cost() + self.waiting_cost()
        dual = self.dual_objective()
        bound = (GUARANTEE_SLOPE * self.inst.m + 1) * dual
        if not self._leq(total, bound):
            self._fail(
                "total-bound",
                f"total cost {dump_scalar(total, self.mode)} exceeds the guarantee "
                f"{dump_scalar(bound, self.mode)}",
                total=total,
                bound=bound,
            )

    def edge_slacks(self):
        out = []
        for u, v, c in self.pairs:
            out.append((u, v, c - self.pair_value(u, v)))
        return tuple(out)


def marked_path(inst, marked, sets, pair, mode):
    """Route ``pair`` through the marked forest; None when disconnected.

    ``sets`` may be engine SetRecords or replay records; only ``members`` is
    read.  Crossing counts consider every recorded set, active or not.
    """
    u, v = pair
    adj = {}
    for a, b, _ in marked:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    prev = {u: None}
    queue = [u]
    while queue:
        nxt = []
        for x in queue:
            for w in adj.get(x, ()):
                if w not in prev:
                    prev[w] = x
                    nxt.append(w)
        queue = nxt
    if v not in prev:
        return None
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    path.reverse()
    length = Fraction(0) if mode == EXACT else 0.0
    for x, w in zip(path, path[1:]):
        length += edge_cost(inst, x, w)
    max_cross = 0
    for rec in sets:
        members = rec.members
        cross = sum(1 for x, w in zip(path, path[1:]) if (x in members) != (w in members))
        max_cross = max(max_cross, cross)
    distance = inst.metric.distance(inst.requests[u].pos, inst.requests[v].pos)
    return PathCheck(
        pair=(u, v),
        path=tuple(path),
        path_length=length,
        distance=distance,
        max_crossings=max_cross,
    )


def marked_path_check(inst: Instance, result: RunResult, pair) -> PathCheck:
    """Public path probe for one matched pair of a finished run."""
    u, v = pair
    check = marked_path(inst, result.marked_edges, result.all_sets, (min(u, v), max(u, v)), result.mode)
    if check is None:
        raise ValueError(f"no marked path joins ({u}, {v})")
    return check


def _certify(inst: Instance, events, result=None):
    replay = _Replay(inst)
    try:
        for i, ev in enumerate(events):
            replay.apply(i, ev)
        replay.finish()
        if result is not None:
            _cross_check(replay, result)
    except _Violation as exc:
        return exc.report
    connection = replay.connection_cost()
    waiting = replay.waiting_cost()
    return DualCertificate(
        mode=inst.mode,
        m=inst.m,
        connection_cost=connection,
        waiting_cost=waiting,
        total_cost=connection + waiting,
        dual_objective=replay.dual_objective(),
        num_events=len(events),
        num_sets=len(replay.sets),
        num_marked_edges=len(replay.marked),
        edge_slacks=replay.edge_slacks(),
    )


def certify_events(inst: Instance, events) -> DualCertificate | ViolationReport:
    """Replay a raw event sequence (e.g. a parsed trace file) and certify it."""
    return _certify(inst, list(events))


def certify(inst: Instance, result: RunResult) -> DualCertificate | ViolationReport:
    """Certify a finished run, cross-checking its reported totals."""
    return _certify(inst, result.event_log, result)


def _cross_check(replay: _Replay, result: RunResult):
    """The run's reported aggregates must equal the replayed ones."""
    checks = [
        ("connection_cost", replay.connection_cost(), result.connection_cost),
        ("waiting_cost", replay.waiting_cost(), result.waiting_cost),
        ("dual_objective", replay.dual_objective(), result.dual_objective),
        ("total_cost", replay.connection_cost() + replay.waiting_cost(), result.total_cost),
    ]
    for name, derived, reported in checks:
        if not replay._eq(derived, reported):
            raise _Violation(
                "summary-consistency",
                f"reported {name} {dump_scalar(reported, replay.mode)} differs from replayed "
                f"{dump_scalar(derived, replay.mode)}",
                replay._dump_witness({"field": name, "reported": reported, "derived": derived}),
                -1,
            )
    if tuple(replay.matching) != tuple(result.matching):
        raise _Violation(
            "summary-consistency",
            "reported matching differs from the replayed one",
            {"reported": [[u, v] for u, v, _ in result.matching]},
            -1,
        )
    if [(u, v) for u, v, _ in replay.marked] != [(u, v) for u, v, _ in result.marked_edges]:
        raise _Violation(
            "summary-consistency",
            "reported marked edges differ from the replayed ones",
            {"reported": [[u, v] for u, v, _ in result.marked_edges]},
            -1,
        )
    if len(replay.sets) != result.num_sets:
        raise _Violation(
            "summary-consistency",
            f"reported {result.num_sets} sets, replay created {len(replay.sets)}",
            {"reported": result.num_sets, "derived": len(replay.sets)},
            -1,
        )


@dataclass(frozen=True)
class RatioReport:
    """Cost ratios of one run against its dual bound and, optionally, the
    offline optimum.  Ratios are None when the denominator is zero."""

    mode: str
    m: int
    total_cost: Scalar
    dual_objective: Scalar
    opt_value: Scalar  # None when no offline optimum was supplied
    ratio_vs_dual: Scalar
    ratio_vs_opt: Scalar
    bound_factor: int  # 2m + 1
    within_bound: bool

    def to_json(self) -> dict:
        mode = self.mode

        def dump(x):
            return None if x is None else dump_scalar(x, mode)

        return {
            "m": self.m,
            "total_cost": dump(self.total_cost),
            "dual_objective": dump(self.dual_objective),
            "opt_value": dump(self.opt_value),
            "ratio_vs_dual": dump(self.ratio_vs_dual),
            "ratio_vs_opt": dump(self.ratio_vs_opt),
            "bound_factor": self.bound_factor,
            "within_bound": self.within_bound,
        }


def ratio_report(inst: Instance, result: RunResult, opt_value=None) -> RatioReport:
    """Compare a run's total cost against its dual objective and an optional
    offline optimum.  ``within_bound`` tests total <= (2m + 1) * reference,
    preferring the optimum when given (the dual never exceeds it)."""
    total = result.total_cost
    dual = result.dual_objective
    factor = GUARANTEE_SLOPE * inst.m + 1
    ratio_dual = None if not dual else total / dual
    ratio_opt = None if (opt_value is None or not opt_value) else total / opt_value
    reference = opt_value if opt_value is not None else dual
    if inst.mode == EXACT:
        within = total <= factor * reference
    else:
        within = total <= factor * reference + EPS_TIGHT * max(1.0, abs(total))
    return RatioReport(
        mode=inst.mode,
        m=inst.m,
        total_cost=total,
        dual_objective=dual,
        opt_value=opt_value,
        ratio_vs_dual=ratio_dual,
        ratio_vs_opt=ratio_opt,
        bound_factor=factor,
        within_bound=within,
    )
