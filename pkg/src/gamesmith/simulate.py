"""Step-by-step play engine: the controller moves at its own states, an
adversary policy or a human moves at environment states.

Sessions track credits, per-dimension running sums, Büchi visits and a
bounded undo history.  Energy violations set a sticky flag instead of
stopping the play, so failure can be explored interactively; the running
mean is a finite-prefix indicator of the long-run average, never a verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .gdl import StrategyDoc
from .model import GameStructure, GamesmithError, PLAYER_1, PLAYER_2, SemanticError, Vector
from .verify import Witness, verify_all


class SimulationError(GamesmithError):
    pass


class IllegalMove(SimulationError):
    def __init__(self, dst: str):
        super().__init__(f"no edge to '{dst}' from the current state")
        self.dst = dst


class WrongTurn(SimulationError):
    pass


class ScriptExhausted(SimulationError):
    pass


class ScriptIllegal(SimulationError):
    def __init__(self, dst: str):
        super().__init__(f"scripted destination '{dst}' is not a legal move")
        self.dst = dst


@dataclass(frozen=True)
class TraceEntry:
    step: int
    src: str
    dst: str
    label: str | None
    weight: Vector
    mover: str  # "env" | "ctl"
    memory_after: str
    credits_after: Vector
    sums_after: Vector


class SessionState:
    """One live play.  Mutable and single-owner; snapshot/undo per step call."""

    def __init__(
        self,
        game: GameStructure,
        strategy: StrategyDoc,
        c0: Vector,
        auto_advance: bool = True,
        history_limit: int = 256,
        step_budget: int = 1000,
    ):
        self.game = game
        self.strategy = strategy
        self.spec = game.objectives
        self.energy_dims = tuple(sorted(self.spec.energy_dims))
        self.c0 = tuple(c0)
        self.auto_advance = auto_advance
        self.history_limit = history_limit
        self.step_budget = step_budget
        self.verified: bool | None = None

        self.state = game.initial
        self.memory = strategy.initial_memory
        self.credits = list(self.c0)
        self.sums = [0] * game.dimension
        self.edge_count = 0
        self.p2_moves = 0
        self.buchi_visits = 1 if game.initial in self.spec.buchi_targets else 0
        self.energy_violated = False
        self.budget_paused = False
        self.trace: list[TraceEntry] = []
        self._history: list[dict] = []

    # -- queries ---------------------------------------------------------

    def owner_to_move(self) -> int:
        return self.game.owner(self.state)

    def legal_destinations(self) -> list[str]:
        return [e.dst for e in self.game.out_edges[self.state]]

    def running_mean(self, dim: int) -> Fraction | None:
        if self.edge_count == 0:
            return None
        return Fraction(self.sums[dim - 1], self.edge_count)

    def last_entry(self) -> TraceEntry | None:
        return self.trace[-1] if self.trace else None

    # -- mutation --------------------------------------------------------

    def _snapshot(self) -> dict:
        return {
            "state": self.state,
            "memory": self.memory,
            "credits": list(self.credits),
            "sums": list(self.sums),
            "edge_count": self.edge_count,
            "p2_moves": self.p2_moves,
            "buchi_visits": self.buchi_visits,
            "energy_violated": self.energy_violated,
            "budget_paused": self.budget_paused,
            "trace_len": len(self.trace),
        }

    def _restore(self, snap: dict) -> None:
        self.state = snap["state"]
        self.memory = snap["memory"]
        self.credits = list(snap["credits"])
        self.sums = list(snap["sums"])
        self.edge_count = snap["edge_count"]
        self.p2_moves = snap["p2_moves"]
        self.buchi_visits = snap["buchi_visits"]
        self.energy_violated = snap["energy_violated"]
        self.budget_paused = snap["budget_paused"]
        del self.trace[snap["trace_len"]:]

    def _apply(self, dst: str, mover: str) -> None:
        edge = self.game.edge_map.get((self.state, dst))
        if edge is None:
            raise IllegalMove(dst)
        nmem = self.strategy.updates.get((self.memory, edge.src, edge.dst))
        if nmem is None:
            raise SimulationError(
                f"strategy has no update for memory '{self.memory}' on edge "
                f"{edge.src} -> {edge.dst}"
            )
        for i, d in enumerate(self.energy_dims):
            self.credits[i] += edge.weight[d - 1]
            if self.credits[i] < 0:
                self.energy_violated = True
        for i in range(self.game.dimension):
            self.sums[i] += edge.weight[i]
        self.edge_count += 1
        if mover == "env":
            self.p2_moves += 1
        self.state = dst
        self.memory = nmem
        if dst in self.spec.buchi_targets:
            self.buchi_visits += 1
        self.trace.append(
            TraceEntry(
                self.edge_count, edge.src, dst, edge.label, edge.weight,
                mover, nmem, tuple(self.credits), tuple(self.sums),
            )
        )

    def _controller_destination(self) -> str:
        dst = self.strategy.moves.get((self.memory, self.state))
        if dst is None:
            raise SimulationError(
                f"strategy has no move for memory '{self.memory}' "
                f"at state '{self.state}'"
            )
        return dst

    def _advance_controller(self, budget: int) -> None:
        used = 0
        self.budget_paused = False
        while self.owner_to_move() == PLAYER_1:
            if used >= budget:
                self.budget_paused = True
                break
            self._apply(self._controller_destination(), "ctl")
            used += 1

    def undo(self) -> None:
        """Revert the most recent step() call (one snapshot per call)."""
        if not self._history:
            raise SimulationError("nothing to undo")
        self._restore(self._history.pop())


def create_session(
    game: GameStructure,
    strategy: StrategyDoc,
    c0: Vector | None = None,
    auto_advance: bool = True,
    history_limit: int = 256,
    step_budget: int = 1000,
) -> SessionState:
    """Start a play at the initial state.  With auto_advance the controller
    immediately plays through any leading player-1 states (bounded by the
    step budget so self-loops cannot spin forever)."""
    if strategy.game_name != game.name:
        raise SemanticError(
            f"strategy targets game '{strategy.game_name}', not '{game.name}'"
        )
    dims = tuple(sorted(game.objectives.energy_dims))
    if c0 is None:
        c0 = (0,) * len(dims)
    if len(c0) != len(dims):
        raise SemanticError(
            f"initial credit has {len(c0)} components, expected {len(dims)}"
        )
    session = SessionState(game, strategy, tuple(c0), auto_advance, history_limit, step_budget)
    if auto_advance:
        session._advance_controller(step_budget)
    return session


def step(session: SessionState, to: str | None = None) -> SessionState:
    """Apply one environment choice (at player-2 states) or one controller
    move (at player-1 states, `to` must be omitted), then auto-advance through
    player-1 states when enabled.  Returns the same, mutated session."""
    session._history.append(session._snapshot())
    if len(session._history) > session.history_limit:
        session._history.pop(0)
    try:
        if session.owner_to_move() == PLAYER_2:
            if to is None:
                raise WrongTurn("environment to move: a destination is required")
            session._apply(to, "env")
        else:
            if to is not None:
                raise WrongTurn("controller to move: no destination may be forced")
            session._apply(session._controller_destination(), "ctl")
        if session.auto_advance:
            session._advance_controller(session.step_budget)
    except SimulationError:
        session._restore(session._history.pop())
        raise
    return session


class RandomAdversary:
    """Uniform choice over legal destinations, reproducible: the pick depends
    only on (seed, number of edges played), so re-asking the same session
    state returns the same destination."""

    def __init__(self, seed: int):
        self.seed = seed

    def choose(self, session: SessionState) -> str:
        if session.owner_to_move() != PLAYER_2:
            raise WrongTurn("adversary asked to move at a player-1 state")
        rng = random.Random(f"{self.seed}:{session.edge_count}")
        return rng.choice(sorted(session.legal_destinations()))


class ScriptAdversary:
    """Plays a fixed destination sequence, indexed by the number of
    environment moves already taken in the session."""

    def __init__(self, script: list[str]):
        self.script = list(script)

    def choose(self, session: SessionState) -> str:
        if session.owner_to_move() != PLAYER_2:
            raise WrongTurn("adversary asked to move at a player-1 state")
        if session.p2_moves >= len(self.script):
            raise ScriptExhausted(
                f"script exhausted after {len(self.script)} moves"
            )
        dst = self.script[session.p2_moves]
        if dst not in session.legal_destinations():
            raise ScriptIllegal(dst)
        return dst


class SpoilerAdversary:
    """Drives the play along a verification counterexample when one exists,
    falling back to seeded random choices otherwise (or after a deviation)."""

    def __init__(self, game: GameStructure, strategy: StrategyDoc, c0: Vector, seed: int = 0):
        self.fallback = RandomAdversary(seed)
        self.lasso: Witness | None = None
        try:
            report = verify_all(game, strategy, c0)
        except GamesmithError:
            return
        for verdict in (
            [report.energy[d] for d in sorted(report.energy)]
            + [report.mean_payoff[d] for d in sorted(report.mean_payoff)]
            + ([report.recurrence] if report.recurrence else [])
        ):
            if not verdict.passed and verdict.witness is not None:
                self.lasso = verdict.witness
                break

    def _expected(self, position: int) -> tuple[str, str] | None:
        """(current, next) state pair of the lasso at the given edge index."""
        w = self.lasso
        assert w is not None
        spine = [s for s, _ in w.prefix]
        cyc = [s for s, _ in w.cycle]
        if position < len(spine) - 1:
            return spine[position], spine[position + 1]
        if not cyc:
            return None
        j = (position - (len(spine) - 1)) % len(cyc)
        return cyc[j], cyc[(j + 1) % len(cyc)]

    def choose(self, session: SessionState) -> str:
        if self.lasso is not None:
            pair = self._expected(session.edge_count)
            if pair is not None:
                cur, nxt = pair
                if cur == session.state and nxt in session.legal_destinations():
                    return nxt
        return self.fallback.choose(session)


def adversary_move(policy, session: SessionState) -> str:
    """Ask a policy (random / script / spoiler) for the next destination."""
    return policy.choose(session)
