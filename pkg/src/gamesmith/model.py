"""Core data model: multi-weighted game graphs, objective declarations,
credit arithmetic and the mean-payoff-to-energy weight rewrite.

Everything here is immutable after construction and safe to share between
threads; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

Vector = tuple[int, ...]

PLAYER_1 = 1  # the system / controller
PLAYER_2 = 2  # the environment / adversary


class GamesmithError(Exception):
    """Base class for all toolkit errors."""


@dataclass(frozen=True)
class SourceSpan:
    """Position of a construct in an input text (1-based line and column)."""

    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class SemanticError(GamesmithError):
    """A structurally well-formed description that breaks a model invariant."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.span = span


class DuplicateState(SemanticError):
    pass


class BadInitial(SemanticError):
    pass


class DanglingEdge(SemanticError):
    pass


class DuplicateEdge(SemanticError):
    pass


class DimensionMismatch(SemanticError):
    pass


class NonBlockingViolation(SemanticError):
    def __init__(self, state: str, span: SourceSpan | None = None):
        super().__init__(f"state '{state}' has no outgoing edge", span)
        self.state = state


class ObjectiveError(SemanticError):
    pass


class EnergyUnderflow(GamesmithError):
    """A credit component would drop below zero."""

    def __init__(self, dim: int):
        super().__init__(f"energy underflow on component {dim}")
        self.dim = dim


@dataclass(frozen=True)
class State:
    id: str
    owner: int
    priority: int = 0


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: Vector
    label: str | None = None


@dataclass(frozen=True)
class MeanPayoffBound:
    """Long-run average of one weight dimension must stay <= threshold.

    Only the non-strict bound is supported; thresholds are exact rationals.
    """

    dim: int
    threshold: Fraction


@dataclass(frozen=True)
class ObjectiveSpec:
    energy_dims: frozenset[int] = frozenset()
    mean_payoff: tuple[MeanPayoffBound, ...] = ()
    buchi_targets: frozenset[str] = frozenset()
    use_parity: bool = False

    def __post_init__(self) -> None:
        dims = [b.dim for b in self.mean_payoff]
        if len(set(dims)) != len(dims):
            raise ObjectiveError("at most one mean-payoff bound per dimension")
        overlap = self.energy_dims & set(dims)
        if overlap:
            raise ObjectiveError(
                f"dimension {min(overlap)} declared both energy and mean-payoff"
            )
        if self.buchi_targets and self.use_parity:
            raise ObjectiveError(
                "buchi and parity objectives are mutually exclusive; pick one encoding"
            )

    @property
    def mp_dims(self) -> frozenset[int]:
        return frozenset(b.dim for b in self.mean_payoff)

    @property
    def true_energy_dims(self) -> tuple[int, ...]:
        return tuple(sorted(self.energy_dims))


@dataclass(frozen=True)
class GameStructure:
    """A finite two-player game graph with k-dimensional integer edge weights.

    States are kept in declaration order, edges sorted by (src, dst); there is
    at most one edge per ordered state pair and every state has at least one
    outgoing edge.  Construct instances through :func:`validate_game`.
    """

    name: str
    dimension: int
    states: tuple[State, ...]
    initial: str
    edges: tuple[Edge, ...]
    objectives: ObjectiveSpec = ObjectiveSpec()
    spans: Mapping[tuple, SourceSpan] | None = field(
        default=None, compare=False, repr=False
    )

    @cached_property
    def state_by_id(self) -> dict[str, State]:
        return {s.id: s for s in self.states}

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {s.id: i for i, s in enumerate(self.states)}

    @cached_property
    def edge_map(self) -> dict[tuple[str, str], Edge]:
        return {(e.src, e.dst): e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {s.id: [] for s in self.states}
        for e in self.edges:
            out[e.src].append(e)
        return {sid: tuple(sorted(es, key=lambda e: e.dst)) for sid, es in out.items()}

    def owner(self, sid: str) -> int:
        return self.state_by_id[sid].owner


@dataclass
class RawState:
    id: str
    owner: int
    priority: int = 0
    init: bool = False
    span: SourceSpan | None = None


@dataclass
class RawEdge:
    src: str
    dst: str
    weight: tuple[int, ...]
    label: str | None = None
    span: SourceSpan | None = None


@dataclass
class RawObjective:
    kind: str  # energy | meanpayoff | buchi | parity
    dim: int | None = None
    threshold: Fraction | None = None
    targets: tuple[str, ...] = ()
    span: SourceSpan | None = None


@dataclass
class RawGame:
    """Structurally parsed but not yet validated game description."""

    name: str = "game"
    dimension: int | None = None
    states: list[RawState] = field(default_factory=list)
    edges: list[RawEdge] = field(default_factory=list)
    objectives: list[RawObjective] = field(default_factory=list)
    span: SourceSpan | None = None


def validate_game(raw: RawGame) -> GameStructure:
    """Check every model invariant on a raw description and freeze it.

    Raises DuplicateState, BadInitial, DanglingEdge, DuplicateEdge,
    DimensionMismatch, NonBlockingViolation or ObjectiveError, each carrying
    the span of the offending construct when one is known.
    """
    if raw.dimension is None or raw.dimension < 1:
        raise SemanticError("dimensions must be a positive integer", raw.span)
    k = raw.dimension

    spans: dict[tuple, SourceSpan] = {}
    seen: dict[str, RawState] = {}
    initial: str | None = None
    for rs in raw.states:
        if rs.id in seen:
            raise DuplicateState(f"state '{rs.id}' declared twice", rs.span)
        if rs.owner not in (PLAYER_1, PLAYER_2):
            raise SemanticError(f"state '{rs.id}' owner must be 1 or 2", rs.span)
        if rs.priority < 0:
            raise SemanticError(f"state '{rs.id}' priority must be >= 0", rs.span)
        seen[rs.id] = rs
        if rs.span is not None:
            spans[("state", rs.id)] = rs.span
        if rs.init:
            if initial is not None:
                raise BadInitial(
                    f"both '{initial}' and '{rs.id}' marked init", rs.span
                )
            initial = rs.id
    if not raw.states:
        raise SemanticError("a game needs at least one state", raw.span)
    if initial is None:
        raise BadInitial("no state marked init", raw.span)

    edges: dict[tuple[str, str], RawEdge] = {}
    for re_ in raw.edges:
        for endpoint in (re_.src, re_.dst):
            if endpoint not in seen:
                raise DanglingEdge(
                    f"edge references undeclared state '{endpoint}'", re_.span
                )
        key = (re_.src, re_.dst)
        if key in edges:
            raise DuplicateEdge(
                f"duplicate edge {re_.src} -> {re_.dst}", re_.span
            )
        if len(re_.weight) != k:
            raise DimensionMismatch(
                f"edge {re_.src} -> {re_.dst} has {len(re_.weight)} weights, "
                f"expected {k}",
                re_.span,
            )
        edges[key] = re_
        if re_.span is not None:
            spans[("edge",) + key] = re_.span

    with_out = {src for src, _ in edges}
    for rs in raw.states:
        if rs.id not in with_out:
            raise NonBlockingViolation(rs.id, rs.span)

    energy: set[int] = set()
    bounds: list[MeanPayoffBound] = []
    buchi: list[str] = []
    parity = False
    for ro in raw.objectives:
        if ro.kind in ("energy", "meanpayoff"):
            assert ro.dim is not None
            if not 1 <= ro.dim <= k:
                raise ObjectiveError(
                    f"objective dimension {ro.dim} outside 1..{k}", ro.span
                )
        if ro.kind == "energy":
            energy.add(ro.dim)  # type: ignore[arg-type]
        elif ro.kind == "meanpayoff":
            assert ro.threshold is not None
            if any(b.dim == ro.dim for b in bounds):
                raise ObjectiveError(
                    f"two mean-payoff bounds on dimension {ro.dim}", ro.span
                )
            bounds.append(MeanPayoffBound(ro.dim, ro.threshold))  # type: ignore[arg-type]
        elif ro.kind == "buchi":
            for t in ro.targets:
                if t not in seen:
                    raise ObjectiveError(
                        f"buchi target '{t}' is not a declared state", ro.span
                    )
            buchi.extend(ro.targets)
        elif ro.kind == "parity":
            parity = True
        else:  # pragma: no cover - parser never produces other kinds
            raise ObjectiveError(f"unknown objective kind '{ro.kind}'", ro.span)
    try:
        objectives = ObjectiveSpec(
            energy_dims=frozenset(energy),
            mean_payoff=tuple(sorted(bounds, key=lambda b: b.dim)),
            buchi_targets=frozenset(buchi),
            use_parity=parity,
        )
    except ObjectiveError as exc:
        if exc.span is None and raw.objectives:
            exc.span = raw.objectives[-1].span
        raise

    return GameStructure(
        name=raw.name,
        dimension=k,
        states=tuple(State(rs.id, rs.owner, rs.priority) for rs in raw.states),
        initial=initial,
        edges=tuple(
            Edge(re_.src, re_.dst, tuple(re_.weight), re_.label)
            for _, re_ in sorted(edges.items())
        ),
        objectives=objectives,
        spans=spans or None,
    )


def make_game(
    name: str,
    dimension: int,
    states: Iterable[tuple],
    edges: Iterable[tuple],
    initial: str,
    objectives: ObjectiveSpec | None = None,
) -> GameStructure:
    """Programmatic construction helper; runs the same validation as parsing.

    states: (id, owner) or (id, owner, priority) tuples;
    edges: (src, dst, weight) or (src, dst, weight, label) tuples.
    """
    raw = RawGame(name=name, dimension=dimension)
    for st in states:
        sid, owner = st[0], st[1]
        prio = st[2] if len(st) > 2 else 0
        raw.states.append(RawState(sid, owner, prio, init=(sid == initial)))
    for ed in edges:
        src, dst, weight = ed[0], ed[1], tuple(ed[2])
        label = ed[3] if len(ed) > 3 else None
        raw.edges.append(RawEdge(src, dst, weight, label))
    game = validate_game(raw)
    if objectives is not None:
        for t in objectives.buchi_targets:
            if t not in game.state_by_id:
                raise ObjectiveError(f"buchi target '{t}' is not a declared state")
        for d in sorted(objectives.energy_dims | set(objectives.mp_dims)):
            if not 1 <= d <= dimension:
                raise ObjectiveError(f"objective dimension {d} outside 1..{dimension}")
        game = GameStructure(
            game.name, game.dimension, game.states, game.initial, game.edges,
            objectives, game.spans,
        )
    return game


def apply_edge(credit: Vector, weight: Vector, cap: int | None = None) -> Vector:
    """Component-wise credit update c' = min(cap, c + w), all components >= 0.

    Raises EnergyUnderflow(dim) with the 1-based offending component when some
    component would go negative; cap=None leaves credits unbounded.
    """
    if len(credit) != len(weight):
        raise ValueError("credit and weight arity differ")
    out = []
    for i, (c, w) in enumerate(zip(credit, weight), start=1):
        v = c + w
        if v < 0:
            raise EnergyUnderflow(i)
        out.append(v if cap is None else min(cap, v))
    return tuple(out)


@dataclass(frozen=True)
class TransformReport:
    """What the mean-payoff rewrite did to a game.

    rewritten holds one (dim, p, q) triple per bound: dimension dim's weights
    were replaced by p - q*w, turning "long-run average <= p/q" into "rewritten
    running sum stays non-negative for some finite starting offset".  Credits
    on rewritten dimensions are bookkeeping slack, never a controller
    requirement.
    """

    rewritten: tuple[tuple[int, int, int], ...]
    credit_dims: tuple[int, ...]
    true_energy_dims: tuple[int, ...]
    weight_magnitude: int

    @property
    def mp_derived_dims(self) -> tuple[int, ...]:
        return tuple(d for d, _, _ in self.rewritten)

    def true_positions(self) -> tuple[int, ...]:
        """Index of each declared energy dimension inside credit vectors."""
        return tuple(self.credit_dims.index(d) for d in self.true_energy_dims)

    def project_true(self, credit: Vector) -> Vector:
        return tuple(credit[i] for i in self.true_positions())


def mp_transform(
    game: GameStructure, spec: ObjectiveSpec | None = None
) -> tuple[GameStructure, TransformReport]:
    """Rewrite every mean-payoff bound into an energy dimension.

    For a bound <= p/q on dimension j the weight w becomes p - q*w, so a cycle
    satisfies the bound exactly when its rewritten sum is >= 0.  The returned
    game declares all rewritten dimensions as energy; the report records the
    scaling so their credits can be excluded from controller requirements.
    """
    if spec is None:
        spec = game.objectives
    scale = {
        b.dim: (b.threshold.numerator, b.threshold.denominator)
        for b in spec.mean_payoff
    }
    new_edges = []
    for e in game.edges:
        w = list(e.weight)
        for dim, (p, q) in scale.items():
            w[dim - 1] = p - q * w[dim - 1]
        new_edges.append(Edge(e.src, e.dst, tuple(w), e.label))
    credit_dims = tuple(sorted(spec.energy_dims | set(scale)))
    magnitude = max(
        (abs(e.weight[d - 1]) for e in new_edges for d in credit_dims), default=0
    )
    new_spec = ObjectiveSpec(
        energy_dims=frozenset(credit_dims),
        mean_payoff=(),
        buchi_targets=spec.buchi_targets,
        use_parity=spec.use_parity,
    )
    transformed = GameStructure(
        game.name, game.dimension, game.states, game.initial,
        tuple(new_edges), new_spec, game.spans,
    )
    report = TransformReport(
        rewritten=tuple(sorted((d, p, q) for d, (p, q) in scale.items())),
        credit_dims=credit_dims,
        true_energy_dims=tuple(sorted(spec.energy_dims)),
        weight_magnitude=magnitude,
    )
    return transformed, report


def credit_slice(weight: Vector, dims: tuple[int, ...]) -> Vector:
    """Project a full k-weight onto the given 1-based dimensions."""
    return tuple(weight[d - 1] for d in dims)
