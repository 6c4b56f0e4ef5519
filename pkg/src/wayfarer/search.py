"""Constrained best-first trip search.

Labels (partial trips) are expanded over the time-dependent graph in
order of cost-so-far plus an admissible remaining-cost estimate. Each
label carries the accumulated state variables and the progressed residual
of the trip constraint; successors whose residual can no longer be
satisfied are pruned. Because the constraint can reference accumulated
resources, plain per-node duplicate detection is unsound: a label is
discarded only when a kept label at the same node has the same residual,
identical values of every constraint-referenced variable, and is no worse
on cost and clock (with a correction for waiting costs, see _dominates).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from wayfarer.errors import WayfarerError
from wayfarer.auxmetrics import AuxOverlay
from wayfarer.geodata import (
    MapEdge,
    MapGraph,
    MODES,
    Mode,
    great_circle_distance,
    next_departure,
)
from wayfarer.ltl import (
    FalseAtom,
    Formula,
    StateSnapshot,
    TRUE,
    VarCmp,
    Verdict,
    atom_truth,
    evaluate,
    iter_atoms,
    progress,
    to_text,
    var_value,
)
from wayfarer.pcf import CoefficientProfile, FareConfig, StateVars, accumulate, pcf

SNAP_RADIUS_M = 500.0

# Numeric grace for float cost comparisons in pruning rules; never applied
# to the optimality-critical priority ordering itself.
_COST_EPS = 1e-9


class UnknownEndpoint(WayfarerError):
    pass


class InvalidPlanRequest(WayfarerError):
    pass


@dataclass(frozen=True)
class PlanRequest:
    origin: str | tuple[float, float]
    destination: str | tuple[float, float]
    depart_at: int                                  # seconds since service-day midnight
    profile: CoefficientProfile
    constraint: Formula = TRUE
    allowed_modes: frozenset[Mode] = frozenset(MODES)
    active_overlays: tuple[str, ...] | None = None  # None = all supplied overlays


@dataclass(frozen=True)
class _StepMeta:
    """Which transit run a public step rides (first-stop departure time)."""

    line_id: str
    run_departure: int


@dataclass
class SearchState:
    """One label: a concrete partial trip ending at `node`."""

    node: str
    arrival_mode: Mode | None
    vars: StateVars
    residual: Formula          # obligation on any continuation
    final_ok: bool             # trip may legally end here
    g: float                   # cost-so-far in dollars
    snapshot: StateSnapshot
    parent: "SearchState | None" = None
    edge: MapEdge | None = None
    step_meta: _StepMeta | None = None
    wait_s: int = 0
    fare_cents: int = 0
    cycle_mark: tuple = ()
    alive: bool = True


@dataclass(frozen=True)
class Leg:
    mode: Mode
    nodes: tuple[str, ...]
    start_s: int               # absolute service-day seconds
    end_s: int
    fare_cents: int
    distance_m: float

    @property
    def duration_s(self) -> int:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class Itinerary:
    legs: tuple[Leg, ...]
    totals: StateVars
    total_cost_usd: float
    constraint_text: str
    depart_at: int

    @property
    def arrival_s(self) -> int:
        return self.depart_at + self.totals.clock


def heuristic(
    state: SearchState,
    goal: str,
    profile: CoefficientProfile,
    graph: MapGraph,
    allowed_modes: frozenset[Mode] = frozenset(MODES),
) -> float:
    """Admissible remaining cost: straight-line distance at the cheapest
    allowed mode's time cost, with fares and overlay exposure bounded
    below by zero."""
    return _heuristic_from(state.node, goal, profile, graph, allowed_modes)


def _heuristic_from(
    node_id: str,
    goal: str,
    profile: CoefficientProfile,
    graph: MapGraph,
    allowed_modes: frozenset[Mode],
) -> float:
    a = graph.nodes[node_id]
    b = graph.nodes[goal]
    d = great_circle_distance((a.lat, a.lon), (b.lat, b.lon))
    if d == 0.0:
        return 0.0
    usable = allowed_modes & graph.modes_present()
    if not usable:
        return math.inf
    rate = min(profile.alpha[m] / graph.mode_speeds[m] for m in usable)
    return profile.beta_t_usd_per_hour * rate * d / 3600.0


# ---------------------------------------------------------------------------
# Constraint-variable signatures
# ---------------------------------------------------------------------------

_UPWARD_KINDS = {"time", "fare", "clock"}
_UPWARD_AGGS = {"sum", "max"}


def _constraint_var_refs(constraint: Formula) -> tuple:
    """Deduplicated refs whose accumulated values future atoms can read.

    aux_here is excluded: it is a property of whichever node a future
    state sits on, not of the label's history.
    """
    refs = {}
    needs_visited = False
    for atom in iter_atoms(constraint):
        if isinstance(atom, VarCmp) and atom.var.kind != "aux_here":
            refs[atom.var] = None
            if atom.var.kind == "aux":
                needs_visited = True
    ordered = tuple(sorted(refs, key=lambda v: (v.kind, v.mode or "", v.dataset or "", v.agg or "")))
    return ordered, needs_visited


def _var_signature(refs_spec, snap: StateSnapshot) -> tuple:
    refs, needs_visited = refs_spec
    sig = tuple(var_value(r, snap) for r in refs)
    if needs_visited:
        sig += (snap.vars.visited,)
    return sig


def _atom_saturated(atom: VarCmp, value, truth: bool) -> bool:
    """Whether this atom's truth can no longer change as the trip grows."""
    kind, agg = atom.var.kind, atom.var.agg
    if kind in _UPWARD_KINDS or (kind == "aux" and agg in _UPWARD_AGGS):
        direction = 1
    elif kind == "aux" and agg == "min":
        direction = -1
    else:
        return False            # averages fluctuate; aux_here is per-node
    ge_like = atom.op in (">=", ">")
    le_like = atom.op in ("<=", "<")
    if atom.op == "=":
        return value > atom.bound if direction > 0 else value < atom.bound
    if direction > 0:
        return truth if ge_like else (not truth) if le_like else False
    return truth if le_like else (not truth) if ge_like else False


def _cycle_atoms(constraint: Formula) -> tuple[VarCmp, ...]:
    atoms = {
        a: None
        for a in iter_atoms(constraint)
        if isinstance(a, VarCmp) and a.var.kind != "aux_here"
    }
    return tuple(atoms)


def _cycle_signature(atoms: tuple[VarCmp, ...], snap: StateSnapshot) -> tuple:
    # Saturated atoms contribute only their frozen truth, so trips may
    # revisit a node while an unsaturated resource atom is still moving
    # toward its threshold, and are cut off once every atom has settled.
    parts = []
    for atom in atoms:
        value = var_value(atom.var, snap)
        truth = atom_truth(atom, snap)
        if _atom_saturated(atom, value, truth):
            parts.append((True, truth))
        else:
            parts.append((False, value))
    return tuple(parts)


# ---------------------------------------------------------------------------
# Expansion
# ---------------------------------------------------------------------------


@dataclass
class _PlanContext:
    graph: MapGraph
    profile: CoefficientProfile
    overlays: dict[str, AuxOverlay]
    fares: FareConfig
    allowed: frozenset[Mode]
    goal: str
    depart_at: int
    attribute_wait: bool
    refs_spec: tuple = field(default=((), False))
    cycle_atoms: tuple = ()
    wait_rate: float = 0.0     # dollars per second of clock lag
    h_rate: float | None = None   # min alpha/speed over usable modes, cached

    def entered_scores(self, node_id: str) -> dict[str, float]:
        return {
            name: overlay.node_scores.get(node_id, 0.0)
            for name, overlay in self.overlays.items()
        }


def _step_quantities(ctx: _PlanContext, state: SearchState, edge: MapEdge):
    """Duration/fare/wait of taking `edge` now, or None if untakeable."""
    abs_clock = ctx.depart_at + state.vars.clock
    if edge.mode is Mode.PUBLIC:
        line = ctx.graph.lines[edge.line_id]
        k = line.leg_index(edge.from_id, edge.to_id)
        dep = next_departure(line, k, abs_clock)
        if dep is None:
            return None
        wait = dep - abs_clock
        ride = line.leg_durations[k]
        run_departure = dep - line.offset_to_stop(k)
        staying_on = (
            state.step_meta is not None
            and state.step_meta.line_id == line.id
            and state.step_meta.run_departure == run_departure
            and wait == 0
        )
        fare = 0 if staying_on else line.fare_cents
        meta = _StepMeta(line.id, run_departure)
        if ctx.attribute_wait:
            return ride + wait, 0, wait, fare, meta
        return ride, wait, wait, fare, meta
    duration = edge.duration_s
    if edge.mode is Mode.TAXI:
        fare = round(ctx.fares.taxi_per_km_cents * edge.length_m / 1000.0)
        if state.arrival_mode is not Mode.TAXI:
            fare += ctx.fares.taxi_base_cents
    elif edge.mode is Mode.CAR:
        fare = round(ctx.fares.car_per_km_cents * edge.length_m / 1000.0)
    else:
        fare = 0
    return duration, 0, 0, fare, None


def _successor(ctx: _PlanContext, state: SearchState, edge: MapEdge) -> SearchState | None:
    step = _step_quantities(ctx, state, edge)
    if step is None:
        return None
    duration, extra_clock, wait, fare, meta = step
    new_vars = accumulate(
        state.vars, edge.mode, duration, fare,
        entered_scores=ctx.entered_scores(edge.to_id),
        extra_clock_s=extra_clock,
    )
    snapshot = StateSnapshot(edge.mode, new_vars, ctx.entered_scores(edge.to_id))
    verdict, residual = progress(state.residual, snapshot, is_final=False)
    final_ok = progress(state.residual, snapshot, is_final=True)[0] is Verdict.TRUE
    if verdict is Verdict.FALSE and not (edge.to_id == ctx.goal and final_ok):
        return None
    g = pcf(new_vars, ctx.profile)
    succ = SearchState(
        node=edge.to_id,
        arrival_mode=edge.mode,
        vars=new_vars,
        residual=residual,
        final_ok=final_ok,
        g=g,
        snapshot=snapshot,
        parent=state,
        edge=edge,
        step_meta=meta,
        wait_s=wait,
        fare_cents=fare,
    )
    # Arrival context that discounts future step costs (an ongoing taxi
    # hire skips the base fare, staying on the same transit run skips the
    # boarding fare) is part of a label's identity for pruning purposes.
    succ.cycle_mark = (
        edge.to_id, residual, final_ok, _cycle_signature(ctx.cycle_atoms, snapshot),
        edge.mode is Mode.TAXI, meta,
    )
    return succ


def _repeats_own_history(ctx: _PlanContext, succ: SearchState) -> bool:
    """Cycle control within one label's own ancestry.

    A revisit is cut when the earlier visit can replicate any continuation
    at no greater cost (the loop's cost covers the worst extra waiting its
    head start could incur), and unconditionally on the second repeat so
    paths stay finite.
    """
    repeats = 0
    anc = succ.parent
    while anc is not None:
        if anc.cycle_mark == succ.cycle_mark:
            lag_cost = ctx.wait_rate * (succ.vars.clock - anc.vars.clock)
            if succ.g - anc.g >= lag_cost - _COST_EPS:
                return True
            repeats += 1
            if repeats >= 2:
                return True
        anc = anc.parent
    return False


def expand(
    state: SearchState,
    graph: MapGraph,
    overlays: dict[str, AuxOverlay],
    profile: CoefficientProfile,
    *,
    fares: FareConfig | None = None,
    allowed_modes: frozenset[Mode] = frozenset(MODES),
    goal: str = "",
    depart_at: int = 0,
    attribute_wait: bool = True,
    constraint: Formula = TRUE,
) -> list[SearchState]:
    """One-step expansion; exposed for tests, plan() drives it internally."""
    ctx = _plan_context(
        graph, profile, overlays, fares or FareConfig(), allowed_modes, goal,
        depart_at, attribute_wait, constraint,
    )
    return _expand(ctx, state)


def _expand(ctx: _PlanContext, state: SearchState) -> list[SearchState]:
    if isinstance(state.residual, FalseAtom):
        return []
    out = []
    for edge in ctx.graph.edges_from(state.node):
        if edge.mode not in ctx.allowed:
            continue
        succ = _successor(ctx, state, edge)
        if succ is None or _repeats_own_history(ctx, succ):
            continue
        out.append(succ)
    return out


def _plan_context(
    graph, profile, overlays, fares, allowed, goal, depart_at, attribute_wait, constraint
) -> _PlanContext:
    wait_rate = 0.0
    if attribute_wait and Mode.PUBLIC in allowed and graph.lines:
        wait_rate = profile.beta_t_usd_per_hour * profile.alpha[Mode.PUBLIC] / 3600.0
    ctx = _PlanContext(
        graph=graph,
        profile=profile,
        overlays=overlays,
        fares=fares,
        allowed=allowed,
        goal=goal,
        depart_at=depart_at,
        attribute_wait=attribute_wait,
    )
    ctx.refs_spec = _constraint_var_refs(constraint)
    ctx.cycle_atoms = _cycle_atoms(constraint)
    ctx.wait_rate = wait_rate
    usable = allowed & graph.modes_present()
    if usable:
        ctx.h_rate = min(profile.alpha[m] / graph.mode_speeds[m] for m in usable)
    return ctx


# ---------------------------------------------------------------------------
# Dominance
# ---------------------------------------------------------------------------


def _dominates(ctx: _PlanContext, kept: dict, new: dict, clock_sensitive: bool) -> bool:
    """kept label can replicate any continuation of new at no greater cost.

    The wait-rate term charges the kept label for the extra transit
    waiting its earlier clock could incur before the two continuations
    synchronize on a departure.
    """
    if kept["key"] != new["key"]:
        return False
    if clock_sensitive and kept["clock"] != new["clock"]:
        return False
    if kept["clock"] > new["clock"]:
        return False
    lag_cost = ctx.wait_rate * (new["clock"] - kept["clock"])
    return kept["g"] + lag_cost <= new["g"] + _COST_EPS


# ---------------------------------------------------------------------------
# plan() and itinerary extraction
# ---------------------------------------------------------------------------


def _resolve_endpoint(graph: MapGraph, endpoint, what: str) -> str:
    if isinstance(endpoint, str):
        if endpoint not in graph.nodes:
            raise UnknownEndpoint(f"{what}: unknown node {endpoint!r}")
        return endpoint
    try:
        lat, lon = float(endpoint[0]), float(endpoint[1])
    except (TypeError, ValueError, IndexError):
        raise UnknownEndpoint(f"{what}: expected node id or (lat, lon)") from None
    node = graph.nearest_node(lat, lon, SNAP_RADIUS_M)
    if node is None:
        raise UnknownEndpoint(f"{what}: no node within {SNAP_RADIUS_M:.0f} m of ({lat}, {lon})")
    return node.id


def plan(
    request: PlanRequest,
    graph: MapGraph,
    overlays: dict[str, AuxOverlay] | None = None,
    fares: FareConfig | None = None,
    *,
    attribute_wait_to_public: bool = True,
    on_pop=None,
) -> Itinerary | None:
    """Find the cheapest constraint-satisfying trip, or None if none exists.

    The search is deterministic: ties on estimated total cost prefer the
    deeper label, then the lexicographically smaller (node, mode).
    """
    if not 0 <= request.depart_at < 86_400:
        raise InvalidPlanRequest(f"depart_at {request.depart_at} outside the service day")
    origin = _resolve_endpoint(graph, request.origin, "origin")
    goal = _resolve_endpoint(graph, request.destination, "destination")
    if origin == goal:
        raise UnknownEndpoint("origin and destination snap to the same node")

    all_overlays = overlays or {}
    if request.active_overlays is not None:
        missing = set(request.active_overlays) - set(all_overlays)
        if missing:
            raise InvalidPlanRequest(f"unknown overlay datasets: {sorted(missing)}")
        active = {name: all_overlays[name] for name in request.active_overlays}
    else:
        active = dict(all_overlays)

    ctx = _plan_context(
        graph, request.profile, active, fares or FareConfig(), request.allowed_modes,
        goal, request.depart_at, attribute_wait_to_public, request.constraint,
    )

    start_scores = ctx.entered_scores(origin)
    start_vars = StateVars.at_start(start_scores)
    start_snap = StateSnapshot(None, start_vars, start_scores)
    verdict, residual = progress(request.constraint, start_snap, is_final=False)
    if verdict is Verdict.FALSE:
        return None
    start = SearchState(
        node=origin,
        arrival_mode=None,
        vars=start_vars,
        residual=residual,
        final_ok=False,        # origin != goal, the trip cannot end here
        g=pcf(start_vars, request.profile),
        snapshot=start_snap,
    )
    start.cycle_mark = (
        origin, residual, False, _cycle_signature(ctx.cycle_atoms, start_snap),
        False, None,
    )

    clock_sensitive = attribute_wait_to_public and any(
        isinstance(a, VarCmp) and a.var.kind == "time" and a.var.mode is Mode.PUBLIC
        for a in iter_atoms(request.constraint)
    )

    counter = itertools.count()
    open_heap: list = []
    kept: dict[str, list[dict]] = {}

    def push(label: SearchState):
        rec = {
            "key": (
                label.residual,
                label.final_ok,
                _var_signature(ctx.refs_spec, label.snapshot),
                label.arrival_mode is Mode.TAXI,
                label.step_meta,
            ),
            "g": label.g,
            "clock": label.vars.clock,
            "label": label,
        }
        bucket = kept.setdefault(label.node, [])
        for other in bucket:
            if other["label"].alive and _dominates(ctx, other, rec, clock_sensitive):
                return
        for other in bucket:
            if other["label"].alive and _dominates(ctx, rec, other, clock_sensitive):
                other["label"].alive = False
        bucket[:] = [r for r in bucket if r["label"].alive] + [rec]
        if label.node == goal:
            h = 0.0
        elif ctx.h_rate is None:
            h = math.inf
        else:
            a = graph.nodes[label.node]
            b = graph.nodes[goal]
            d = great_circle_distance((a.lat, a.lon), (b.lat, b.lon))
            h = request.profile.beta_t_usd_per_hour * ctx.h_rate * d / 3600.0
        mode_rank = label.arrival_mode.value if label.arrival_mode else ""
        heapq.heappush(
            open_heap, (label.g + h, -label.g, label.node, mode_rank, next(counter), label)
        )

    push(start)
    while open_heap:
        f, _, _, _, _, label = heapq.heappop(open_heap)
        if not label.alive:
            continue
        if on_pop is not None:
            on_pop(label, label.g, f - label.g)
        if label.node == goal and label.final_ok:
            itinerary = extract_itinerary(label, request)
            _check_itinerary(label, request)
            return itinerary
        for succ in _expand(ctx, label):
            push(succ)
    return None


def _label_chain(goal_state: SearchState) -> list[SearchState]:
    chain = []
    cur = goal_state
    while cur is not None:
        chain.append(cur)
        cur = cur.parent
    chain.reverse()
    return chain


def _check_itinerary(goal_state: SearchState, request: PlanRequest) -> None:
    # Belt-and-braces: the direct evaluator must agree with progression.
    trajectory = [s.snapshot for s in _label_chain(goal_state)]
    if not evaluate(request.constraint, trajectory):
        raise RuntimeError("internal error: returned trip violates its constraint")


def extract_itinerary(goal_state: SearchState, request: PlanRequest) -> Itinerary:
    """Walk the parent chain and merge consecutive same-mode steps."""
    chain = _label_chain(goal_state)
    legs: list[Leg] = []
    i = 1
    while i < len(chain):
        mode = chain[i].edge.mode
        j = i
        nodes = [chain[i - 1].node]
        fare = 0
        dist = 0.0
        while j < len(chain) and chain[j].edge.mode == mode:
            nodes.append(chain[j].node)
            fare += chain[j].fare_cents
            dist += chain[j].edge.length_m
            j += 1
        legs.append(
            Leg(
                mode=mode,
                nodes=tuple(nodes),
                start_s=request.depart_at + chain[i - 1].vars.clock,
                end_s=request.depart_at + chain[j - 1].vars.clock,
                fare_cents=fare,
                distance_m=dist,
            )
        )
        i = j

    totals = goal_state.vars
    leg_fares = sum(leg.fare_cents for leg in legs)
    var_fares = sum(totals.fares_cents.values())
    leg_time = sum(leg.duration_s for leg in legs)
    if leg_fares != var_fares or leg_time != totals.clock:
        raise RuntimeError("internal error: legs disagree with accumulated totals")

    return Itinerary(
        legs=tuple(legs),
        totals=totals,
        total_cost_usd=round(goal_state.g, 2),
        constraint_text=to_text(request.constraint),
        depart_at=request.depart_at,
    )
