"""Controller synthesis: credit-capped arena expansion, attractor-based
parity solving (Zielonka's recursion, min-even convention) and Moore-machine
extraction.

The capped engine unfolds the transformed game into a finite arena of
(state, clamped credit vector) nodes plus a losing sink, solves the parity
game on it and doubles the cap until the initial state wins or the budget is
exhausted.  Clamping only weakens the controller, so WINNING verdicts are
sound at any cap; LOSING is only ever claimed from two sound pre-checks
(losing the plain parity game, or an EXACT empty energy fixpoint).
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from itertools import product as iter_product

from . import antichain as ac
from .gdl import StrategyDoc
from .model import (
    EnergyUnderflow,
    GameStructure,
    GamesmithError,
    ObjectiveSpec,
    PLAYER_1,
    PLAYER_2,
    TransformReport,
    Vector,
    apply_edge,
    credit_slice,
    mp_transform,
)

BOTTOM = "⊥"  # losing sink marker used in arena node keys


class ArenaTooLarge(GamesmithError):
    def __init__(self, nodes: int, limit: int):
        super().__init__(f"arena would need {nodes} nodes (limit {limit})")
        self.nodes = nodes
        self.limit = limit


@dataclass
class Arena:
    """Finite parity game over (state, credit) nodes plus a losing sink.

    The sink is player-1 owned with an odd priority and a self loop, so any
    play reaching it is lost for the controller.
    """

    keys: list  # index -> (state_id, credit Vector); sink is keys[bottom]
    owner: list[int]
    priority: list[int]
    succ: list[list[int]]
    index: dict
    bottom: int
    cap: int
    credit_dims: tuple[int, ...]

    def node_count(self) -> int:
        return len(self.keys)


def state_priorities(game: GameStructure, spec: ObjectiveSpec | None = None) -> dict[str, int]:
    """Priority per state: declared values under parity, the 0/1 encoding of
    Büchi targets otherwise (target 0, rest 1; all 0 without a recurrence
    objective).  Minimal priority seen infinitely often even = player 1 wins."""
    spec = spec or game.objectives
    if spec.use_parity:
        return {s.id: s.priority for s in game.states}
    if spec.buchi_targets:
        return {s.id: 0 if s.id in spec.buchi_targets else 1 for s in game.states}
    return {s.id: 0 for s in game.states}


def expand_capped(
    game: GameStructure,
    report: TransformReport,
    priorities: dict[str, int],
    cap: int,
    node_limit: int = 500_000,
) -> Arena:
    """Unfold the transformed game into the cap-clamped credit arena.

    Node (s, c) moves to (s', min(cap, c+w)) for every edge that keeps all
    credit components non-negative.  An underflowing player-2 edge becomes a
    move to the sink (the adversary may exploit it); underflowing player-1
    edges simply disappear, and a player-1 node left with no moves gets a
    sink move so the arena stays non-blocking.
    """
    dims = report.credit_dims
    d = len(dims)
    n_states = len(game.states)
    total = n_states * (cap + 1) ** d + 1
    if total > node_limit:
        raise ArenaTooLarge(total, node_limit)

    keys: list = []
    owner: list[int] = []
    priority: list[int] = []
    index: dict = {}
    for st in game.states:
        for credit in iter_product(range(cap + 1), repeat=d):
            index[(st.id, credit)] = len(keys)
            keys.append((st.id, credit))
            owner.append(st.owner)
            priority.append(priorities[st.id])
    bottom = len(keys)
    keys.append((BOTTOM, None))
    owner.append(PLAYER_1)
    priority.append(1)
    index[(BOTTOM, None)] = bottom

    out_slices = {
        st.id: [
            (e.dst, credit_slice(e.weight, dims)) for e in game.out_edges[st.id]
        ]
        for st in game.states
    }
    succ: list[list[int]] = []
    for sid, credit in keys[:-1]:
        moves: list[int] = []
        saw_bottom = False
        own = game.owner(sid)
        for dst, weight in out_slices[sid]:
            # inlined apply_edge(credit, weight, cap) for the hot loop
            nxt = tuple(
                v if v < cap else cap
                for v in (c + w for c, w in zip(credit, weight))
            )
            if any(v < 0 for v in nxt):
                if own == PLAYER_2 and not saw_bottom:
                    moves.append(bottom)
                    saw_bottom = True
                continue
            moves.append(index[(dst, nxt)])
        if not moves:
            moves.append(bottom)
        succ.append(moves)
    succ.append([bottom])
    return Arena(keys, owner, priority, succ, index, bottom, cap, dims)


def _attract(
    owner: list[int],
    succ: list[list[int]],
    pred: list[list[int]],
    alive: list[bool],
    player: int,
    targets,
    witness: dict[int, int] | None = None,
) -> set[int]:
    """Least set containing targets that `player` can force the play into.

    Records, per player-owned node pulled in, one move that witnesses the
    attraction (targets themselves get no witness).
    """
    attracted = set(targets)
    queue = deque(sorted(attracted))
    live_out: dict[int, int] = {}
    while queue:
        v = queue.popleft()
        for u in pred[v]:
            if not alive[u] or u in attracted:
                continue
            if owner[u] == player:
                attracted.add(u)
                if witness is not None:
                    witness[u] = v
                queue.append(u)
            else:
                left = live_out.get(u)
                if left is None:
                    left = sum(1 for x in succ[u] if alive[x])
                left -= 1
                live_out[u] = left
                if left == 0:
                    attracted.add(u)
                    queue.append(u)
    return attracted


def attractor(arena: Arena, player: int, targets) -> tuple[frozenset[int], dict[int, int]]:
    """Public attractor over a whole arena; returns the set and the witness
    moves for player-owned members outside the target set."""
    pred = _predecessors(arena.succ)
    alive = [True] * len(arena.keys)
    wit: dict[int, int] = {}
    got = _attract(arena.owner, arena.succ, pred, alive, player, set(targets), wit)
    return frozenset(got), wit


def _predecessors(succ: list[list[int]]) -> list[list[int]]:
    pred: list[list[int]] = [[] for _ in succ]
    for v, targets in enumerate(succ):
        seen = set()
        for u in targets:
            if u not in seen:
                pred[u].append(v)
                seen.add(u)
    return pred


@dataclass
class ParityResult:
    winner: list[int]  # node -> 1 | 2
    moves1: dict[int, int]
    moves2: dict[int, int]

    def moves_for(self, player: int) -> dict[int, int]:
        return self.moves1 if player == PLAYER_1 else self.moves2


def solve_parity(owner: list[int], priority: list[int], succ: list[list[int]]) -> ParityResult:
    """Zielonka's algorithm with memoryless strategies for both players.

    Min-even convention: player 1 wins a play iff the smallest priority seen
    infinitely often is even.  The recursion descends only when the minimal
    priority is removed, so its depth is bounded by the number of distinct
    priorities; peeling opponent regions is done iteratively.
    """
    n = len(owner)
    pred = _predecessors(succ)
    winner = [0] * n
    moves1: dict[int, int] = {}
    moves2: dict[int, int] = {}
    alive = [False] * n

    def solve(region: list[int]) -> None:
        # invariant: alive is True exactly on `region` at entry and exit
        while region:
            p = min(priority[v] for v in region)
            me = PLAYER_1 if p % 2 == 0 else PLAYER_2
            opp = PLAYER_2 if me == PLAYER_1 else PLAYER_1
            my_moves = moves1 if me == PLAYER_1 else moves2
            opp_moves = moves2 if me == PLAYER_1 else moves1
            targets = [v for v in region if priority[v] == p]
            wit: dict[int, int] = {}
            pulled = _attract(owner, succ, pred, alive, me, targets, wit)
            sub = [v for v in region if v not in pulled]
            for v in pulled:
                alive[v] = False
            solve(sub)
            for v in region:  # the recursion may have peeled parts of sub
                alive[v] = True
            opp_region = [v for v in sub if winner[v] == opp]
            if not opp_region:
                for v in region:
                    winner[v] = me
                my_moves.update(wit)
                for v in targets:
                    if owner[v] == me:
                        my_moves[v] = next(u for u in succ[v] if alive[u])
                return
            wit_b: dict[int, int] = {}
            peeled = _attract(owner, succ, pred, alive, opp, opp_region, wit_b)
            opp_moves.update(wit_b)
            for v in peeled:
                winner[v] = opp
                alive[v] = False
            region = [v for v in region if v not in peeled]

    todo = list(range(n))
    for v in todo:
        alive[v] = True
    solve(todo)
    return ParityResult(winner, moves1, moves2)


@dataclass
class SynthesisResult:
    status: str  # WINNING | LOSING | UNKNOWN
    credits: frozenset | None = None  # antichain over the declared energy dims
    chosen_credit: Vector | None = None
    strategy: StrategyDoc | None = None
    engine: str = "capped"
    reason: str | None = None
    mp_slack: dict[int, int] = field(default_factory=dict)
    caps_tried: list[int] = field(default_factory=list)
    arena_nodes: list[int] = field(default_factory=list)
    final_cap: int | None = None
    timings: dict[str, float] = field(default_factory=dict)


@dataclass
class SynthConfig:
    engine: str = "auto"  # auto | capped | antichain
    max_cap: int = 4096
    node_limit: int = 500_000
    ceiling: int | None = None
    strategy_name: str | None = None


def _memory_name(credit: Vector) -> str:
    return "m" + "_".join(map(str, credit)) if credit else "m"


def extract_strategy(
    arena: Arena,
    moves1: dict[int, int],
    game: GameStructure,
    report: TransformReport,
    c0: Vector,
    name: str,
) -> StrategyDoc:
    """Read a Moore machine off the winning arena moves.

    Memory states are the clamped credit vectors reachable from (initial, c0);
    the update on any observed edge is plain clamped credit arithmetic, so the
    machine tracks credits for adversary moves too.
    """
    start = arena.index[(game.initial, c0)]
    memories: list[str] = []
    mem_seen: set[Vector] = set()
    moves: dict[tuple[str, str], str] = {}
    updates: dict[tuple[str, str, str], str] = {}

    def note_memory(credit: Vector) -> str:
        if credit not in mem_seen:
            mem_seen.add(credit)
            memories.append(_memory_name(credit))
        return _memory_name(credit)

    visited = {start}
    queue = deque([start])
    note_memory(c0)
    while queue:
        idx = queue.popleft()
        sid, credit = arena.keys[idx]
        mem = _memory_name(credit)
        if game.owner(sid) == PLAYER_1:
            nxts = [moves1[idx]]
        else:
            nxts = arena.succ[idx]
        for nxt in nxts:
            nsid, ncredit = arena.keys[nxt]
            if nsid == BOTTOM:  # pragma: no cover - winning regions avoid it
                raise AssertionError("winning play routed to the losing sink")
            nmem = note_memory(ncredit)
            if game.owner(sid) == PLAYER_1:
                moves[(mem, sid)] = nsid
            updates[(mem, sid, nsid)] = nmem
            if nxt not in visited:
                visited.add(nxt)
                queue.append(nxt)
    return StrategyDoc(
        name=name,
        game_name=game.name,
        memories=tuple(memories),
        initial_memory=_memory_name(c0),
        moves=moves,
        updates=updates,
    )


def _winning_pick(
    wins: list[Vector], report: TransformReport
) -> tuple[frozenset, Vector, Vector]:
    """Antichain over declared energy dims, plus the full credit vector the
    strategy will be extracted for (smallest minimal projection, then
    lexicographically smallest slack)."""
    projections = {report.project_true(c) for c in wins}
    antich = ac.min_elements(projections)
    target = min(sorted(antich)) if antich else ()
    candidates = sorted(c for c in wins if report.project_true(c) == target)
    return antich, target, candidates[0]


def _result_from_arena(
    game: GameStructure,
    report: TransformReport,
    arena: Arena,
    parity: ParityResult,
    res: SynthesisResult,
    name: str,
) -> bool:
    wins = [
        credit
        for (sid, credit), idx in arena.index.items()
        if sid == game.initial and parity.winner[idx] == PLAYER_1
    ]
    if not wins:
        return False
    antich, chosen, full = _winning_pick(wins, report)
    res.status = "WINNING"
    res.credits = antich
    res.chosen_credit = chosen
    res.final_cap = arena.cap
    res.mp_slack = {
        dim: full[i]
        for i, dim in enumerate(report.credit_dims)
        if dim in report.mp_derived_dims
    }
    res.strategy = extract_strategy(arena, parity.moves1, game, report, full, name)
    return True


def _game_parity_winner(game: GameStructure, priorities: dict[str, int]) -> int:
    idx = game.state_index
    owner = [s.owner for s in game.states]
    prio = [priorities[s.id] for s in game.states]
    succ = [
        [idx[e.dst] for e in game.out_edges[s.id]] for s in game.states
    ]
    return solve_parity(owner, prio, succ).winner[idx[game.initial]]


def _synth_antichain(
    game: GameStructure,
    transformed: GameStructure,
    report: TransformReport,
    config: SynthConfig,
    name: str,
) -> SynthesisResult:
    res = SynthesisResult(status="UNKNOWN", engine="antichain")
    fx = ac.energy_fixpoint(transformed, report, config.ceiling)
    start = fx.credits[game.initial]
    if not start:
        if fx.exact:
            return SynthesisResult(status="LOSING", engine="antichain", reason="energy")
        res.reason = f"no sufficient credit within ceiling {fx.ceiling}"
        return res
    res.status = "WINNING"
    res.credits = start
    c0 = min(sorted(start))
    res.chosen_credit = c0
    res.final_cap = fx.ceiling
    res.strategy = _extract_from_fixpoint(transformed, report, fx, c0, name)
    return res


def _extract_from_fixpoint(
    game: GameStructure,
    report: TransformReport,
    fx: ac.FixpointResult,
    c0: Vector,
    name: str,
) -> StrategyDoc:
    """Moore machine walking the fixpoint: memory is the running credit
    clamped at the ceiling; player-1 picks the first edge whose clamped
    successor credit still dominates a sufficient credit of the target."""
    dims = report.credit_dims
    cap = fx.ceiling
    memories: list[str] = []
    seen: set[tuple[str, Vector]] = set()
    moves: dict[tuple[str, str], str] = {}
    updates: dict[tuple[str, str, str], str] = {}

    def note(credit: Vector) -> str:
        nm = _memory_name(credit)
        if nm not in memories:
            memories.append(nm)
        return nm

    start = (game.initial, c0)
    note(c0)
    queue = deque([start])
    seen.add(start)
    while queue:
        sid, credit = queue.popleft()
        mem = _memory_name(credit)
        out = game.out_edges[sid]
        if game.owner(sid) == PLAYER_1:
            chosen = None
            for e in out:
                try:
                    nxt = apply_edge(credit, credit_slice(e.weight, dims), cap)
                except EnergyUnderflow:
                    continue
                if any(ac.dominates(nxt, u) for u in fx.credits[e.dst]):
                    chosen = (e, nxt)
                    break
            if chosen is None:  # pragma: no cover - fixpoint guarantees a move
                raise AssertionError(f"no sufficient move at {sid} with {credit}")
            out = (chosen[0],)
        for e in out:
            nxt = apply_edge(credit, credit_slice(e.weight, dims), cap)
            nmem = note(nxt)
            if game.owner(sid) == PLAYER_1:
                moves[(mem, sid)] = e.dst
            updates[(mem, sid, e.dst)] = nmem
            if (e.dst, nxt) not in seen:
                seen.add((e.dst, nxt))
                queue.append((e.dst, nxt))
    return StrategyDoc(
        name=name,
        game_name=game.name,
        memories=tuple(memories),
        initial_memory=_memory_name(c0),
        moves=moves,
        updates=updates,
    )


def synthesize(game: GameStructure, config: SynthConfig | None = None) -> SynthesisResult:
    """Decide the conjunction of the game's declared objectives and extract a
    winning controller with its minimal initial credits when one exists.

    Verdicts: WINNING with the credit antichain over the declared energy
    dimensions (rewritten mean-payoff slack is reported separately), LOSING
    from one of the two sound pre-checks, UNKNOWN when the cap schedule or the
    arena budget is exhausted.
    """
    config = config or SynthConfig()
    spec = game.objectives
    name = config.strategy_name or f"{game.name}_synth"
    transformed, report = mp_transform(game)
    priorities = state_priorities(game)

    engine = config.engine
    energy_only = (
        not spec.mean_payoff and not spec.buchi_targets and not spec.use_parity
    )
    if engine == "auto":
        engine = "antichain" if energy_only else "capped"
    if engine == "antichain":
        if not energy_only:
            raise GamesmithError(
                "the antichain engine handles pure multi-energy objectives only"
            )
        t0 = time.perf_counter()
        res = _synth_antichain(game, transformed, report, config, name)
        res.timings["total"] = time.perf_counter() - t0
        return res
    if engine != "capped":
        raise GamesmithError(f"unknown engine '{engine}'")

    res = SynthesisResult(status="UNKNOWN", engine="capped")
    t0 = time.perf_counter()

    if _game_parity_winner(game, priorities) == PLAYER_2:
        res.status = "LOSING"
        res.reason = "parity"
        res.timings["total"] = time.perf_counter() - t0
        return res
    if report.credit_dims:
        fx = ac.energy_fixpoint(transformed, report, config.ceiling)
        if not fx.credits[game.initial] and fx.exact:
            res.status = "LOSING"
            res.reason = "energy"
            res.timings["total"] = time.perf_counter() - t0
            return res

    cap = max(1, min(report.weight_magnitude or 1, config.max_cap))
    while True:
        res.caps_tried.append(cap)
        try:
            arena = expand_capped(transformed, report, priorities, cap, config.node_limit)
        except ArenaTooLarge as exc:
            res.reason = str(exc)
            break
        res.arena_nodes.append(arena.node_count())
        parity = solve_parity(arena.owner, arena.priority, arena.succ)
        if _result_from_arena(game, report, arena, parity, res, name):
            break
        if cap >= config.max_cap:
            res.reason = f"cap schedule exhausted at {cap}"
            break
        cap = min(cap * 2, config.max_cap)
    res.timings["total"] = time.perf_counter() - t0
    return res
