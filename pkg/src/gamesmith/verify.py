"""Checks a candidate controller against every declared objective.

The controller is composed with the game into a product graph where only
adversary choices remain; objectives are then graph questions on the product:

* energy: minimum running weight sum over all reachable finite paths
  (label-correcting relaxation; an improvement after |nodes| rounds means a
  reachable negative cycle, i.e. -infinity),
* mean payoff: exact maximum cycle mean per reachable strongly connected
  component via Karp's algorithm, in exact rational arithmetic, on the
  original (untransformed) weights so reported values keep their units,
* Büchi / parity: reachable-cycle analysis per odd priority.

Every failure carries a lasso witness (finite prefix + repeatable cycle,
the cycle empty for violations reached in finitely many steps) that replays
on the product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .gdl import StrategyDoc
from .model import (
    GameStructure,
    GamesmithError,
    ObjectiveSpec,
    PLAYER_1,
    SemanticError,
    Vector,
)

Node = tuple[str, str]  # (game state, memory)


class UndefinedMove(GamesmithError):
    def __init__(self, memory: str, state: str, path: list[str]):
        super().__init__(
            f"strategy has no move for memory '{memory}' at state '{state}' "
            f"(reached via {' -> '.join(path)})"
        )
        self.memory = memory
        self.state = state
        self.path = path


class UndefinedUpdate(GamesmithError):
    def __init__(self, memory: str, src: str, dst: str, path: list[str]):
        super().__init__(
            f"strategy has no update for memory '{memory}' on edge "
            f"{src} -> {dst} (reached via {' -> '.join(path)})"
        )
        self.memory = memory
        self.edge = (src, dst)
        self.path = path


@dataclass(frozen=True)
class Witness:
    """Lasso counterexample: prefix from the initial node, whose last element
    is the knot where the (possibly empty) cycle starts; the cycle lists its
    nodes once, closing back on the knot."""

    prefix: tuple[Node, ...]
    cycle: tuple[Node, ...] = ()

    def states(self) -> list[str]:
        return [s for s, _ in self.prefix] + [s for s, _ in self.cycle[1:]]


@dataclass
class ProductGraph:
    """Strategy x game composition, restricted to the reachable part.

    Player-1 nodes keep exactly the strategy's move; player-2 nodes keep all
    game edges.  Weights are the original k-dimensional ones.
    """

    game: GameStructure
    strategy: StrategyDoc
    c0: Vector
    nodes: list[Node]
    index: dict[Node, int]
    succ: list[list[int]]
    weights: list[list[Vector]]
    edges: list[list[tuple[str, str]]]
    accepting: list[bool]
    priority: list[int]
    spec: ObjectiveSpec
    warnings: list[str] = field(default_factory=list)

    def node_count(self) -> int:
        return len(self.nodes)


def build_product(
    game: GameStructure,
    strategy: StrategyDoc,
    c0: Vector,
    spec: ObjectiveSpec | None = None,
) -> ProductGraph:
    """Breadth-first composition from (initial state, initial memory).

    Raises UndefinedMove / UndefinedUpdate with the offending reachable path
    when the strategy is partial where it matters; coverage gaps outside the
    reachable part are only warnings.
    """
    if strategy.game_name != game.name:
        raise SemanticError(
            f"strategy targets game '{strategy.game_name}', not '{game.name}'"
        )
    if spec is None:
        spec = game.objectives
    start: Node = (game.initial, strategy.initial_memory)
    nodes: list[Node] = [start]
    index: dict[Node, int] = {start: 0}
    parents: dict[Node, Node | None] = {start: None}
    succ: list[list[int]] = []
    weights: list[list[Vector]] = []
    edges: list[list[tuple[str, str]]] = []

    def path_to(node: Node) -> list[str]:
        chain: list[str] = []
        cur: Node | None = node
        while cur is not None:
            chain.append(cur[0])
            cur = parents[cur]
        return list(reversed(chain))

    queue = deque([start])
    while queue:
        node = queue.popleft()
        sid, mem = node
        if game.owner(sid) == PLAYER_1:
            dst = strategy.moves.get((mem, sid))
            if dst is None:
                raise UndefinedMove(mem, sid, path_to(node))
            if (sid, dst) not in game.edge_map:
                raise SemanticError(
                    f"strategy move {sid} -> {dst} is not a game edge"
                )
            outgoing = [game.edge_map[(sid, dst)]]
        else:
            outgoing = list(game.out_edges[sid])
        row_succ: list[int] = []
        row_w: list[Vector] = []
        row_e: list[tuple[str, str]] = []
        for e in outgoing:
            nmem = strategy.updates.get((mem, e.src, e.dst))
            if nmem is None:
                raise UndefinedUpdate(mem, e.src, e.dst, path_to(node))
            nxt: Node = (e.dst, nmem)
            if nxt not in index:
                index[nxt] = len(nodes)
                nodes.append(nxt)
                parents[nxt] = node
                queue.append(nxt)
            row_succ.append(index[nxt])
            row_w.append(e.weight)
            row_e.append((e.src, e.dst))
        succ.append(row_succ)
        weights.append(row_w)
        edges.append(row_e)

    warnings = []
    used_memories = {mem for _, mem in nodes}
    for m in strategy.memories:
        if m not in used_memories:
            warnings.append(f"memory '{m}' is unreachable")

    if spec.use_parity:
        priority = [game.state_by_id[s].priority for s, _ in nodes]
        accepting = [False] * len(nodes)
    else:
        accepting = [s in spec.buchi_targets for s, _ in nodes]
        priority = [0 if a else 1 for a in accepting]
    return ProductGraph(
        game, strategy, c0, nodes, index, succ, weights, edges,
        accepting, priority, spec, warnings,
    )


@dataclass(frozen=True)
class EnergyVerdict:
    dim: int
    passed: bool
    initial_credit: int
    min_prefix: int | None  # None means -infinity
    witness: Witness | None = None

    @property
    def neg_inf(self) -> bool:
        return self.min_prefix is None


def _bfs_path(product: ProductGraph, target: int) -> list[int]:
    """Shortest edge-count path from the initial node, deterministic by
    successor order; returns node indices including both endpoints."""
    parent: dict[int, int] = {0: -1}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        if v == target:
            break
        for u in product.succ[v]:
            if u not in parent:
                parent[u] = v
                queue.append(u)
    chain = [target]
    while parent[chain[-1]] != -1:
        chain.append(parent[chain[-1]])
    return list(reversed(chain))


def check_energy(product: ProductGraph, dim: int, credit: int) -> EnergyVerdict:
    """Minimum over all reachable finite paths of the running dim-sum.

    Relaxation for |nodes| rounds; a round-|nodes| improvement exposes a
    reachable negative cycle and the verdict becomes -infinity.  Passes iff
    credit + minimum >= 0.
    """
    n = product.node_count()
    INF = float("inf")
    dist: list = [INF] * n
    parent = [-1] * n
    dist[0] = 0
    has_negative_cycle = False
    for round_ in range(n):
        changed = False
        for v in range(n):
            dv = dist[v]
            if dv is INF:
                continue
            for j, u in enumerate(product.succ[v]):
                w = product.weights[v][j][dim - 1]
                if dv + w < dist[u]:
                    dist[u] = dv + w
                    parent[u] = v
                    changed = True
                    if round_ == n - 1:
                        has_negative_cycle = True
        if not changed:
            break

    if has_negative_cycle:
        # witness via the cycle-mean machinery on negated weights: the
        # minimum-mean cycle is strictly negative here, so pumping it
        # reproduces the divergence
        wmap = {
            (v, u): product.weights[v][j][dim - 1]
            for v in range(n)
            for j, u in enumerate(product.succ[v])
        }
        value, cycle_idx = max_cycle_mean(
            n, product.succ, lambda v, u: -wmap[(v, u)]
        )
        assert value is not None and value > 0, "relaxation and cycle scan disagree"
        knot = cycle_idx[0]
        prefix_idx = _bfs_path(product, knot)
        witness = Witness(
            prefix=tuple(product.nodes[i] for i in prefix_idx),
            cycle=tuple(product.nodes[i] for i in cycle_idx),
        )
        return EnergyVerdict(dim, False, credit, None, witness)

    best = min(dist)
    if credit + best >= 0:
        return EnergyVerdict(dim, True, credit, best)
    # deterministic offender: smallest sum, then smallest node key
    target = min(range(n), key=lambda v: (dist[v], product.nodes[v]))
    chain = [target]
    while parent[chain[-1]] != -1:
        chain.append(parent[chain[-1]])
    chain.reverse()
    witness = Witness(prefix=tuple(product.nodes[i] for i in chain))
    return EnergyVerdict(dim, False, credit, best, witness)


def _sccs(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Tarjan's strongly connected components, iterative, deterministic."""
    indexes = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    result: list[list[int]] = []
    counter = 0
    for root in range(n):
        if indexes[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                indexes[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for j in range(pi, len(succ[v])):
                u = succ[v][j]
                if indexes[u] == -1:
                    work[-1] = (v, j + 1)
                    work.append((u, 0))
                    recurse = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], indexes[u])
            if recurse:
                continue
            work.pop()
            if low[v] == indexes[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                result.append(sorted(comp))
            if work:
                pv, _ = work[-1]
                low[pv] = min(low[pv], low[v])
    return result


def _karp(
    comp: list[int], succ: list[list[int]], wfun
) -> tuple[Fraction, list[int]]:
    """Maximum cycle mean within one strongly connected component, plus a
    cycle attaining it (Karp's rounds-of-longest-walks recurrence; every
    cycle embedded in the optimal length-n walk attains the maximum)."""
    pos = {v: i for i, v in enumerate(comp)}
    n = len(comp)
    NEG = None
    dist = [[NEG] * n for _ in range(n + 1)]
    back: list[list[int]] = [[-1] * n for _ in range(n + 1)]
    dist[0][0] = 0
    for k in range(1, n + 1):
        for i, v in enumerate(comp):
            dv = dist[k - 1][i]
            if dv is NEG:
                continue
            for u in succ[v]:
                j = pos.get(u)
                if j is None:
                    continue
                cand = dv + wfun(v, u)
                if dist[k][j] is NEG or cand > dist[k][j]:
                    dist[k][j] = cand
                    back[k][j] = i
    best: Fraction | None = None
    best_i = -1
    for i in range(n):
        if dist[n][i] is NEG:
            continue
        worst: Fraction | None = None
        for k in range(n):
            if dist[k][i] is NEG:
                continue
            ratio = Fraction(dist[n][i] - dist[k][i], n - k)
            if worst is None or ratio < worst:
                worst = ratio
        if worst is not None and (best is None or worst > best):
            best = worst
            best_i = i
    assert best is not None, "component without a cycle"
    walk = [best_i]
    for k in range(n, 0, -1):
        walk.append(back[k][walk[-1]])
    walk.reverse()  # positions along the optimal length-n walk
    seen: dict[int, int] = {}
    for step, i in enumerate(walk):
        if i in seen:
            cycle = [comp[j] for j in walk[seen[i]:step]]
            return best, cycle
        seen[i] = step
    raise AssertionError("length-n walk contains no repeat")  # pragma: no cover


@dataclass(frozen=True)
class MeanPayoffVerdict:
    dim: int
    passed: bool
    value: Fraction
    threshold: Fraction
    witness: Witness | None = None


def max_cycle_mean(
    n: int, succ: list[list[int]], wfun
) -> tuple[Fraction | None, list[int]]:
    """Maximum cycle mean over a graph, None when it is acyclic."""
    best: Fraction | None = None
    best_cycle: list[int] = []
    for comp in _sccs(n, succ):
        cyclic = len(comp) > 1 or comp[0] in succ[comp[0]]
        if not cyclic:
            continue
        value, cycle = _karp(comp, succ, wfun)
        if best is None or value > best:
            best = value
            best_cycle = cycle
    return best, best_cycle


def check_mean_payoff(
    product: ProductGraph, dim: int, threshold: Fraction
) -> MeanPayoffVerdict:
    """Exact maximum cycle mean of the dim-weights over reachable cycles;
    passes iff it stays <= threshold."""

    wmap = {
        (v, u): product.weights[v][j][dim - 1]
        for v in range(product.node_count())
        for j, u in enumerate(product.succ[v])
    }
    value, cycle = max_cycle_mean(
        product.node_count(), product.succ, lambda v, u: wmap[(v, u)]
    )
    assert value is not None, "non-blocking product must contain a cycle"
    if value <= threshold:
        return MeanPayoffVerdict(dim, True, value, threshold)
    prefix_idx = _bfs_path(product, cycle[0])
    witness = Witness(
        prefix=tuple(product.nodes[i] for i in prefix_idx),
        cycle=tuple(product.nodes[i] for i in cycle),
    )
    return MeanPayoffVerdict(dim, False, value, threshold, witness)


@dataclass(frozen=True)
class RecurrenceVerdict:
    kind: str  # buchi | parity
    passed: bool
    witness: Witness | None = None


def _shortest_cycle_through(
    v: int, succ: list[list[int]], allowed: set[int]
) -> list[int]:
    """Shortest cycle through v inside the allowed node set (BFS)."""
    parent = {u: v for u in succ[v] if u in allowed}
    queue = deque(sorted(parent))
    if v in parent:
        return [v]
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w == v:
                chain = [u]
                while chain[-1] != v:
                    chain.append(parent[chain[-1]])
                chain.reverse()
                return [v] + chain[1:]
            if w in allowed and w not in parent:
                parent[w] = u
                queue.append(w)
    raise AssertionError("no cycle through node flagged as cyclic")  # pragma: no cover


def check_recurrence(product: ProductGraph, spec: ObjectiveSpec | None = None) -> RecurrenceVerdict:
    """Büchi: no reachable cycle may avoid every accepting node.  Parity: no
    reachable cycle may have an odd minimal priority; checked per odd priority
    d on the subgraph of priorities >= d.  Witness lassos prefer the shortest
    prefix, breaking ties by node key."""
    spec = spec or product.spec
    kind = "parity" if spec.use_parity else "buchi"
    n = product.node_count()
    dist = [-1] * n
    dist[0] = 0
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in product.succ[v]:
            if dist[u] == -1:
                dist[u] = dist[v] + 1
                queue.append(u)

    candidates: list[tuple[int, Node, int, frozenset[int]]] = []
    odd_priorities = sorted({p for p in product.priority if p % 2 == 1})
    for d in odd_priorities:
        allowed = {v for v in range(n) if product.priority[v] >= d}
        sub_succ = [
            [u for u in product.succ[v] if u in allowed] if v in allowed else []
            for v in range(n)
        ]
        for comp in _sccs(n, sub_succ):
            comp_set = frozenset(c for c in comp if c in allowed)
            if not comp_set:
                continue
            cyclic = len(comp_set) > 1 or any(
                v in sub_succ[v] for v in comp_set
            )
            if not cyclic:
                continue
            for v in sorted(comp_set):
                if product.priority[v] == d:
                    candidates.append((dist[v], product.nodes[v], v, comp_set))
    if not candidates:
        return RecurrenceVerdict(kind, True)
    _, _, knot, comp_set = min(candidates, key=lambda c: (c[0], c[1]))
    sub_succ = [
        [u for u in product.succ[v] if u in comp_set] if v in comp_set else []
        for v in range(n)
    ]
    cycle_idx = _shortest_cycle_through(knot, sub_succ, set(comp_set))
    prefix_idx = _bfs_path(product, knot)
    witness = Witness(
        prefix=tuple(product.nodes[i] for i in prefix_idx),
        cycle=tuple(product.nodes[i] for i in cycle_idx),
    )
    return RecurrenceVerdict(kind, False, witness)


@dataclass
class VerificationReport:
    passed: bool
    energy: dict[int, EnergyVerdict]
    mean_payoff: dict[int, MeanPayoffVerdict]
    recurrence: RecurrenceVerdict | None
    product_nodes: int
    warnings: list[str]
    c0: Vector

    def to_json_dict(self) -> dict:
        def lasso(w: Witness | None):
            if w is None:
                return None
            return {
                "prefix": [f"{s}@{m}" for s, m in w.prefix],
                "cycle": [f"{s}@{m}" for s, m in w.cycle],
            }

        objectives: list[dict] = []
        for dim in sorted(self.energy):
            v = self.energy[dim]
            objectives.append(
                {
                    "type": "energy",
                    "dim": dim,
                    "verdict": "PASS" if v.passed else "FAIL",
                    "initial_credit": v.initial_credit,
                    "min_prefix_sum": (
                        {"neg_inf": True} if v.neg_inf else v.min_prefix
                    ),
                    "witness": lasso(v.witness),
                }
            )
        for dim in sorted(self.mean_payoff):
            v = self.mean_payoff[dim]
            objectives.append(
                {
                    "type": "meanpayoff",
                    "dim": dim,
                    "verdict": "PASS" if v.passed else "FAIL",
                    "value": {
                        "num": v.value.numerator,
                        "den": v.value.denominator,
                    },
                    "threshold": {
                        "num": v.threshold.numerator,
                        "den": v.threshold.denominator,
                    },
                    "witness": lasso(v.witness),
                }
            )
        if self.recurrence is not None:
            objectives.append(
                {
                    "type": self.recurrence.kind,
                    "verdict": "PASS" if self.recurrence.passed else "FAIL",
                    "witness": lasso(self.recurrence.witness),
                }
            )
        return {
            "overall": "PASS" if self.passed else "FAIL",
            "objectives": objectives,
            "product_nodes": self.product_nodes,
            "initial_credit": list(self.c0),
            "warnings": list(self.warnings),
        }


def verify_all(
    game: GameStructure,
    strategy: StrategyDoc,
    c0: Vector,
    spec: ObjectiveSpec | None = None,
) -> VerificationReport:
    """Aggregate every declared objective; overall PASS iff all pass."""
    spec = spec or game.objectives
    dims = sorted(spec.energy_dims)
    if len(c0) != len(dims):
        raise SemanticError(
            f"initial credit has {len(c0)} components, "
            f"expected {len(dims)} (energy dims {dims})"
        )
    product = build_product(game, strategy, c0, spec)
    energy = {
        dim: check_energy(product, dim, c0[i]) for i, dim in enumerate(dims)
    }
    mean_payoff = {
        b.dim: check_mean_payoff(product, b.dim, b.threshold)
        for b in spec.mean_payoff
    }
    recurrence = None
    if spec.buchi_targets or spec.use_parity:
        recurrence = check_recurrence(product, spec)
    passed = (
        all(v.passed for v in energy.values())
        and all(v.passed for v in mean_payoff.values())
        and (recurrence is None or recurrence.passed)
    )
    return VerificationReport(
        passed=passed,
        energy=energy,
        mean_payoff=mean_payoff,
        recurrence=recurrence,
        product_nodes=product.node_count(),
        warnings=product.warnings,
        c0=tuple(c0),
    )
