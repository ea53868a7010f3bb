"""Event-driven dual-growth matching engine.

The engine partitions arrived requests into active sets and grows one dual
variable per active set that still contains free (unmatched) requests, at
unit rate.  When the accumulated values on some eligible cross-set pair reach
the pair's budget (distance plus arrival gap), the two sets merge, the
triggering edge is marked, and free requests inside the merged set are
matched greedily.  On exact-mode instances every quantity is a rational and
every comparison is exact; float mode relaxes tightness tests by EPS_TIGHT.

A run is single-threaded and deterministic: simultaneous arrivals are
processed in index order before any tightness processing at the same instant,
and simultaneously tight pairs are consumed in lexicographic order with a
full re-scan after every merge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .instance import Instance, edge_cost, surplus
from .scalars import EPS_TIGHT, EXACT, Scalar, dump_scalar, parse_scalar

GROWING = "active-growing"
NONGROWING = "active-nongrowing"
INACTIVE = "inactive"

ARRIVAL = "arrival"
GROW = "grow-interval"
TIGHT = "tight"
MERGE = "merge"
MATCH = "match"


class EngineInvariantError(RuntimeError):
    """An internal invariant broke mid-run.  Signals a bug, not bad input."""


@dataclass(frozen=True)
class EventRecord:
    t: Scalar
    kind: str
    payload: dict


@dataclass
class SetRecord:
    """One ever-active set: members, surplus, accumulated dual value, links.

    Mutated only by the engine that owns it; treat as read-only afterwards.
    """

    set_id: int
    members: frozenset
    sur: int
    created_at: Scalar
    y: Scalar
    status: str
    free: set
    children: tuple = None  # (set_id, set_id) for merged sets
    parent: int = None  # set_id this one merged into
    deactivated_at: Scalar = None
    grow_intervals: list = field(default_factory=list)


@dataclass(frozen=True)
class RunResult:
    """Everything a run produced; immutable and safe to hand across threads."""

    variant: str
    mode: str
    m: int
    matching: tuple  # ((u, v, match_time), ...) in match order, u < v
    all_sets: tuple  # SetRecord log, index == set_id
    event_log: tuple
    marked_edges: tuple  # ((u, v, mark_time), ...)
    connection_cost: Scalar
    waiting_cost: Scalar
    total_cost: Scalar
    dual_objective: Scalar

    @property
    def num_sets(self) -> int:
        return len(self.all_sets)

    @property
    def num_marked_edges(self) -> int:
        return len(self.marked_edges)

    def summary(self) -> dict:
        mode = self.mode
        return {
            "connection_cost": dump_scalar(self.connection_cost, mode),
            "waiting_cost": dump_scalar(self.waiting_cost, mode),
            "total_cost": dump_scalar(self.total_cost, mode),
            "dual_objective": dump_scalar(self.dual_objective, mode),
            "m": self.m,
            "num_sets": self.num_sets,
            "num_marked_edges": self.num_marked_edges,
        }


def event_to_json(ev: EventRecord, mode: str) -> str:
    payload = {
        k: (dump_scalar(v, mode) if k in ("from", "to") else v)
        for k, v in ev.payload.items()
    }
    return json.dumps({"t": dump_scalar(ev.t, mode), "kind": ev.kind, "payload": payload})


def events_to_jsonl(result: RunResult) -> str:
    return "".join(event_to_json(ev, result.mode) + "\n" for ev in result.event_log)


def events_from_jsonl(text: str, mode: str):
    """Parse a trace back into EventRecords (for post-hoc verification)."""
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            payload = {
                k: (parse_scalar(v, mode) if k in ("from", "to") else v)
                for k, v in doc["payload"].items()
            }
            events.append(EventRecord(t=parse_scalar(doc["t"], mode), kind=doc["kind"], payload=payload))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"trace line {lineno}: {exc}") from None
    return events


class GreedyDualEngine:
    """Stepwise simulator; ``run`` drives it to completion.

    With ``self_check=True`` the full invariant battery runs after every
    event and raises EngineInvariantError naming the first breach.
    """

    def __init__(self, inst: Instance, self_check: bool = False):
        self.inst = inst
        self.mode = inst.mode
        self.self_check = self_check
        n = len(inst.requests)
        zero = Fraction(0) if self.mode == EXACT else 0.0
        self.clock = zero
        self.next_arrival = 0
        self.potential = [zero] * n  # accumulated dual value over sets containing u
        self.assign = [None] * n  # request index -> active set_id
        self.sets: list[SetRecord] = []
        self.active_ids: set[int] = set()
        self.frozen = {}  # (u, v) -> constraint value at the merge that internalized it
        self.marked = []  # (u, v, mark_time)
        self.matching = []  # (u, v, match_time)
        self.matched = [False] * n
        self.match_time = [None] * n
        self.free_count = 0
        self.events: list[EventRecord] = []
        # Eligible pairs among arrived requests, extended on each arrival.
        self.live_pairs = []  # (u, v, cost, float cost)
        self._pair_cost = {}
        # Float shadows let exact runs pre-filter the quadratic scans; every
        # decision is still confirmed in exact arithmetic.
        self._accel = self.mode == EXACT
        self.pot_f = [0.0] * n
        self.clock_f = 0.0
        scale = 1.0
        for u in range(n):
            for v in range(u + 1, n):
                c = edge_cost(inst, u, v)
                if c is not None:
                    self._pair_cost[(u, v)] = c
                    scale = max(scale, abs(float(c)))
        for r in inst.requests:
            scale = max(scale, abs(float(r.atime)))
        if scale > 1e12:
            self._accel = False  # float shadow too coarse; fall back to pure exact
        self._margin = 1e-6 * (1.0 + scale)

    # -- event location ---------------------------------------------------

    def next_event(self):
        """Earliest of the next arrival and the next predicted tight pair.

        Returns (time, kind) with kind 'arrival' or 'tight', arrivals winning
        ties; None once everything has arrived and matched.  A state with
        unmatched requests but nothing to wait for is a stuck-state bug.
        """
        n = len(self.inst.requests)
        t_arr = None
        if self.next_arrival < n:
            t_arr = self.inst.requests[self.next_arrival].atime
        t_tight = self._next_tight_time()
        if t_arr is None and t_tight is None:
            if self.free_count > 0:
                raise EngineInvariantError(
                    "stuck-state: free requests remain but no growth can trigger a merge"
                )
            return None
        if t_tight is None or (t_arr is not None and t_arr <= t_tight):
            return (t_arr, ARRIVAL)
        return (t_tight, TIGHT)

    def _next_tight_time(self):
        best = None
        if self._accel:
            # Float pass finds the approximate minimum; only pairs within the
            # error margin of it are re-evaluated exactly.
            fmin = None
            rates = []
            for u, v, cost, cost_f in self.live_pairs:
                su, sv = self.assign[u], self.assign[v]
                if su == sv:
                    continue
                r = (self.sets[su].status == GROWING) + (self.sets[sv].status == GROWING)
                if r == 0:
                    continue
                tf = self.clock_f + (cost_f - self.pot_f[u] - self.pot_f[v]) / r
                rates.append((u, v, cost, r, tf))
                if fmin is None or tf < fmin:
                    fmin = tf
            if fmin is None:
                return None
            cutoff = fmin + self._margin
            for u, v, cost, r, tf in rates:
                if tf > cutoff:
                    continue
                t = self.clock + (cost - self.potential[u] - self.potential[v]) / r
                if best is None or t < best:
                    best = t
            return best
        for u, v, cost, _ in self.live_pairs:
            su, sv = self.assign[u], self.assign[v]
            if su == sv:
                continue
            r = (self.sets[su].status == GROWING) + (self.sets[sv].status == GROWING)
            if r == 0:
                continue
            t = self.clock + (cost - self.potential[u] - self.potential[v]) / r
            if self.mode != EXACT and t < self.clock:
                t = self.clock
            if best is None or t < best:
                best = t
        return best

    # -- state transitions ------------------------------------------------

    def advance_to(self, t) -> None:
        """Move the clock to ``t``, growing every active growing set by the
        elapsed span.  No event may sit strictly inside the span."""
        if t < self.clock:
            raise EngineInvariantError(f"clock would move backwards: {self.clock} -> {t}")
        if t == self.clock:
            return
        delta = t - self.clock
        delta_f = float(delta)
        for sid in sorted(self.active_ids):
            rec = self.sets[sid]
            if rec.status != GROWING:
                continue
            rec.y += delta
            rec.grow_intervals.append((self.clock, t))
            for u in rec.members:
                self.potential[u] += delta
                self.pot_f[u] += delta_f
            self._log(t, GROW, {"set": sid, "from": self.clock, "to": t})
        self.clock_f = float(t)
        self.clock = t

    def on_arrival(self, u: int) -> None:
        """Admit request ``u`` (the clock must sit at its arrival time) and
        immediately consume any constraints its arrival made tight."""
        self._admit(u)
        self.process_tight()

    def _admit(self, u: int) -> None:
        req = self.inst.requests[u]
        if u != self.next_arrival:
            raise EngineInvariantError(f"arrivals must be admitted in order; expected {self.next_arrival}, got {u}")
        if req.atime != self.clock:
            raise EngineInvariantError(f"arrival of {u} at clock {self.clock}, but atime is {req.atime}")
        self.next_arrival += 1
        sid = len(self.sets)
        rec = SetRecord(
            set_id=sid,
            members=frozenset({u}),
            sur=1,
            created_at=self.clock,
            y=Fraction(0) if self.mode == EXACT else 0.0,
            status=GROWING,
            free={u},
        )
        self.sets.append(rec)
        self.active_ids.add(sid)
        self.assign[u] = sid
        self.free_count += 1
        for v in range(u):
            key = (v, u)
            if key in self._pair_cost:
                c = self._pair_cost[key]
                self.live_pairs.append((v, u, c, float(c)))
        self._log(self.clock, ARRIVAL, {"u": u})

    def process_tight(self) -> None:
        """Merge-and-match until no eligible cross-set pair is tight.

        The scan restarts from scratch after every merge; simultaneously
        tight pairs are consumed in (min index, max index) order.
        """
        while True:
            pair = self._least_tight_pair()
            if pair is None:
                return
            self._merge(*pair)

    def _least_tight_pair(self):
        best = None
        for u, v, cost, cost_f in self.live_pairs:
            su, sv = self.assign[u], self.assign[v]
            if su == sv:
                continue
            if self._accel and self.pot_f[u] + self.pot_f[v] < cost_f - self._margin:
                continue
            value = self.potential[u] + self.potential[v]
            if self.mode == EXACT:
                if value != cost:
                    continue
            elif value < cost - EPS_TIGHT:
                continue
            if best is None or (u, v) < best:
                best = (u, v)
        return best

    def _merge(self, u: int, v: int) -> None:
        a = self.sets[self.assign[u]]
        b = self.sets[self.assign[v]]
        if a.set_id > b.set_id:
            a, b = b, a
        self._log(self.clock, TIGHT, {"u": u, "v": v})

        sid = len(self.sets)
        members = a.members | b.members
        rec = SetRecord(
            set_id=sid,
            members=members,
            sur=surplus(self.inst, members),
            created_at=self.clock,
            y=Fraction(0) if self.mode == EXACT else 0.0,
            status=GROWING,
            free=a.free | b.free,
            children=(a.set_id, b.set_id),
        )
        # Freeze constraint values of pairs that just became internal: no set
        # created from here on can separate their endpoints again.
        for x in a.members:
            for w in b.members:
                key = (x, w) if x < w else (w, x)
                if key in self._pair_cost:
                    self.frozen[key] = self.potential[x] + self.potential[w]
        for child in (a, b):
            child.status = INACTIVE
            child.parent = sid
            child.deactivated_at = self.clock
            self.active_ids.discard(child.set_id)
        self.sets.append(rec)
        self.active_ids.add(sid)
        for w in members:
            self.assign[w] = sid
        self.marked.append((min(u, v), max(u, v), self.clock))
        self._log(self.clock, MERGE, {"set": sid, "a": a.set_id, "b": b.set_id})

        self._match_free(rec)
        if not rec.free:
            rec.status = NONGROWING

    def _match_free(self, rec: SetRecord) -> None:
        # FIFO: earliest-arrived free request first, then the earliest free
        # request it may be matched with (arrival order == index order).
        order = sorted(rec.free)
        while len(order) >= 2:
            x = order[0]
            partner = None
            for w in order[1:]:
                if self.inst.eligible(x, w):
                    partner = w
                    break
            if partner is None:
                return
            order.remove(x)
            order.remove(partner)
            rec.free.discard(x)
            rec.free.discard(partner)
            self.matched[x] = self.matched[partner] = True
            self.match_time[x] = self.match_time[partner] = self.clock
            self.free_count -= 2
            pair = (min(x, partner), max(x, partner))
            self.matching.append((pair[0], pair[1], self.clock))
            self._log(self.clock, MATCH, {"u": pair[0], "v": pair[1]})

    def constraint_value(self, u: int, v: int) -> Scalar:
        """Accumulated dual value charged against the (u, v) budget: the sum
        of the endpoint potentials while the pair crosses active sets, frozen
        at the merge that first put both endpoints in one active set."""
        key = (min(u, v), max(u, v))
        if key not in self._pair_cost:
            raise ValueError(f"pair ({u}, {v}) is not eligible")
        if (
            self.assign[u] is not None
            and self.assign[u] == self.assign[v]
        ):
            return self.frozen[key]
        return self.potential[u] + self.potential[v]

    # -- driving ----------------------------------------------------------

    def step(self) -> bool:
        """Process one event (an arrival batch or a tight instant)."""
        ev = self.next_event()
        if ev is None:
            return False
        t, kind = ev
        self.advance_to(t)
        if kind == ARRIVAL:
            n = len(self.inst.requests)
            while self.next_arrival < n and self.inst.requests[self.next_arrival].atime == t:
                self._admit(self.next_arrival)
        self.process_tight()
        if self.self_check:
            self.check_invariants()
        return True

    def run(self) -> RunResult:
        while self.step():
            pass
        return self._result()

    def _result(self) -> RunResult:
        inst = self.inst
        if any(not m for m in self.matched):
            raise EngineInvariantError("run ended with unmatched requests")
        zero = Fraction(0) if self.mode == EXACT else 0.0
        connection = zero
        waiting = zero
        for u, v, t in self.matching:
            connection += inst.metric.distance(inst.requests[u].pos, inst.requests[v].pos)
            waiting += (t - inst.requests[u].atime) + (t - inst.requests[v].atime)
        dual = zero
        for rec in self.sets:
            dual += rec.sur * rec.y
        result = RunResult(
            variant=inst.variant,
            mode=self.mode,
            m=inst.m,
            matching=tuple(self.matching),
            all_sets=tuple(self.sets),
            event_log=tuple(self.events),
            marked_edges=tuple(self.marked),
            connection_cost=connection,
            waiting_cost=waiting,
            total_cost=connection + waiting,
            dual_objective=dual,
        )
        if self.self_check:
            self._check_final(result)
        return result

    def _log(self, t, kind, payload) -> None:
        self.events.append(EventRecord(t=t, kind=kind, payload=payload))

    # -- invariant battery (debug mode) ------------------------------------

    def check_invariants(self) -> None:
        self._check_partition()
        self._check_laminar()
        self._check_surplus()
        self._check_potential()
        self._check_feasibility()
        self._check_marked_forest()
        self._check_marked_tight()

    def _violated(self, name, detail):
        raise EngineInvariantError(f"{name}: {detail}")

    def _check_partition(self):
        seen = set()
        for sid in self.active_ids:
            members = self.sets[sid].members
            if seen & members:
                self._violated("partition", f"overlap at set {sid}")
            seen |= members
            for u in members:
                if self.assign[u] != sid:
                    self._violated("partition", f"request {u} assigned to {self.assign[u]}, found in {sid}")
        arrived = set(range(self.next_arrival))
        if seen != arrived:
            self._violated("partition", f"active sets cover {sorted(seen)}, arrived {sorted(arrived)}")

    def _check_laminar(self):
        for i, a in enumerate(self.sets):
            for b in self.sets[i + 1 :]:
                inter = a.members & b.members
                if inter and not (a.members <= b.members or b.members <= a.members):
                    self._violated("laminar", f"sets {a.set_id} and {b.set_id} straddle")

    def _check_surplus(self):
        for sid in self.active_ids:
            rec = self.sets[sid]
            s = surplus(self.inst, rec.members)
            if rec.sur != s:
                self._violated("surplus", f"set {sid} cached surplus {rec.sur}, recomputed {s}")
            if len(rec.free) != s:
                self._violated("surplus", f"set {sid} has {len(rec.free)} free, surplus {s}")
            if (rec.status == GROWING) != bool(rec.free):
                self._violated("surplus", f"set {sid} status {rec.status} with free {sorted(rec.free)}")

    def _check_potential(self):
        for u in range(self.next_arrival):
            total = Fraction(0) if self.mode == EXACT else 0.0
            for rec in self.sets:
                if u in rec.members:
                    total += rec.y
            if not self._eq(total, self.potential[u]):
                self._violated("potential", f"request {u}: cached {self.potential[u]}, recomputed {total}")
            bound = self.clock - self.inst.requests[u].atime
            if not self._leq(total, bound):
                self._violated("potential", f"request {u}: value {total} exceeds waiting {bound}")
            if not self.matched[u] and not self._eq(total, bound):
                self._violated("potential", f"free request {u}: value {total} != waiting {bound}")

    def _check_feasibility(self):
        for u, v, cost, _ in self.live_pairs:
            if not self._leq(self.constraint_value(u, v), cost):
                self._violated(
                    "feasibility",
                    f"pair ({u}, {v}): value {self.constraint_value(u, v)} exceeds budget {cost}",
                )

    def _check_marked_forest(self):
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for u, v, _ in self.marked:
            ru, rv = find(u), find(v)
            if ru == rv:
                self._violated("marked-forest", f"cycle closed by edge ({u}, {v})")
            parent[ru] = rv
        for sid in self.active_ids:
            members = self.sets[sid].members
            inside = [(u, v) for u, v, _ in self.marked if u in members and v in members]
            if len(inside) != len(members) - 1:
                self._violated(
                    "marked-forest",
                    f"set {sid}: {len(inside)} marked edges for {len(members)} members",
                )
        for u, v, _ in self.marked:
            su, sv = self.assign[u], self.assign[v]
            if su != sv:
                self._violated("marked-forest", f"marked edge ({u}, {v}) crosses active sets")

    def _check_marked_tight(self):
        for u, v, _ in self.marked:
            key = (u, v)
            cost = self._pair_cost[key]
            if not self._eq(self.frozen[key], cost):
                self._violated(
                    "marked-tight", f"edge ({u}, {v}) frozen at {self.frozen[key]}, budget {cost}"
                )

    def _check_final(self, result: RunResult):
        if not self._eq(result.waiting_cost, result.dual_objective):
            self._violated(
                "waiting-equals-dual",
                f"waiting {result.waiting_cost} vs objective {result.dual_objective}",
            )
        for u, v, t in result.matching:
            if not self.inst.eligible(u, v):
                self._violated("eligibility", f"matched pair ({u}, {v})")
            if t < self.inst.requests[u].atime or t < self.inst.requests[v].atime:
                self._violated("eligibility", f"pair ({u}, {v}) matched before arrival")
            d = self.inst.metric.distance(self.inst.requests[u].pos, self.inst.requests[v].pos)
            if not self._leq(d, 2 * result.dual_objective):
                self._violated("path-bound", f"pair ({u}, {v}) distance {d}")
        bound = (2 * result.m + 1) * result.dual_objective
        if not self._leq(result.total_cost, bound):
            self._violated("total-bound", f"total {result.total_cost} vs {bound}")

    def _eq(self, a, b):
        if self.mode == EXACT:
            return a == b
        return abs(a - b) <= EPS_TIGHT

    def _leq(self, a, b):
        if self.mode == EXACT:
            return a <= b
        return a <= b + EPS_TIGHT


def run(inst: Instance, self_check: bool = False) -> RunResult:
    """Run the matching engine on ``inst`` to completion."""
    return GreedyDualEngine(inst, self_check=self_check).run()
