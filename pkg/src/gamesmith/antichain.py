"""Exact minimal initial credits for multi-energy games.

Sufficient credits form an upward-closed set per state; we manipulate only
its minimal elements (an antichain of pairwise-incomparable vectors) and run
a Kleene iteration of the controllable-predecessor operator from the all-zero
requirement.  A per-component ceiling keeps the lattice finite: vectors that
outgrow it are discarded and the result is downgraded from EXACT to CEILING.

With ceiling c the computed antichains are exactly the minimal winning
credits of the game whose running credits are clamped at c; when no vector
was ever discarded they are also the minimal credits of the unclamped game.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .model import (
    GameStructure,
    PLAYER_1,
    TransformReport,
    Vector,
    credit_slice,
    mp_transform,
)

CreditAntichain = frozenset  # of Vector

EMPTY: CreditAntichain = frozenset()


def dominates(a: Vector, b: Vector) -> bool:
    """Component-wise a >= b."""
    return all(x >= y for x, y in zip(a, b))


def min_elements(vectors) -> CreditAntichain:
    """Drop every vector dominated by another member; order-independent."""
    vs = set(vectors)
    return frozenset(
        v for v in vs if not any(u != v and dominates(v, u) for u in vs)
    )


def _edge_requirements(successor_credits, weight: Vector) -> set[Vector]:
    # credit needed before the edge so that afterwards some sufficient
    # credit of the successor is covered
    return {
        tuple(max(0, u - w) for u, w in zip(uv, weight))
        for uv in successor_credits
    }


def cpre(
    game: GameStructure,
    report: TransformReport,
    credits: Mapping[str, CreditAntichain],
    ceiling: int,
) -> tuple[dict[str, CreditAntichain], frozenset[str]]:
    """One controllable-predecessor step on per-state credit antichains.

    Player-1 states may pick any edge (union of per-edge requirements);
    player-2 states must cover all edges (component-wise max over one choice
    per edge).  Vectors with a component above the ceiling are discarded and
    the owning state is flagged.
    """
    dims = report.credit_dims
    out: dict[str, CreditAntichain] = {}
    flagged: set[str] = set()
    for st in game.states:
        per_edge = [
            _edge_requirements(credits[e.dst], credit_slice(e.weight, dims))
            for e in game.out_edges[st.id]
        ]
        if st.owner == PLAYER_1:
            cand: set[Vector] = set().union(*per_edge)
        else:
            cand = set()
            for combo in itertools.product(*per_edge):
                if len(combo) == 1:
                    cand.add(combo[0])
                else:
                    cand.add(tuple(map(max, *combo)))
        kept = {v for v in cand if all(x <= ceiling for x in v)}
        if len(kept) != len(cand):
            flagged.add(st.id)
        out[st.id] = min_elements(kept)
    return out, frozenset(flagged)


@dataclass(frozen=True)
class FixpointResult:
    credits: dict[str, CreditAntichain]
    exact: bool
    ceiling: int
    rounds: int

    @property
    def status(self) -> str:
        return "EXACT" if self.exact else f"CEILING({self.ceiling})"


def default_ceiling(game: GameStructure, report: TransformReport) -> int:
    """(|S|-1) * max-abs-weight; tight for one energy dimension, a practical
    heuristic above that (the status keeps the approximation honest)."""
    return (len(game.states) - 1) * report.weight_magnitude


def energy_fixpoint(
    game: GameStructure,
    report: TransformReport | None = None,
    ceiling: int | None = None,
) -> FixpointResult:
    """Least fixed point of cpre from the all-zero requirement.

    The game is winnable from a state s (for the energy objectives alone)
    exactly when credits[s] is nonempty, provided the status is EXACT.
    """
    if report is None:
        game, report = mp_transform(game)
    if ceiling is None:
        ceiling = default_ceiling(game, report)
    zero = (0,) * len(report.credit_dims)
    credits: dict[str, CreditAntichain] = {
        s.id: frozenset({zero}) for s in game.states
    }
    # With one credit dimension and a ceiling at least (|S|-1)*W the result
    # is exact even when vectors were discarded: a state winnable with any
    # finite credit is winnable within that bound, so only requirements of
    # losing states ever outgrow it.
    always_exact = (
        len(report.credit_dims) == 1 and ceiling >= default_ceiling(game, report)
    )
    exact = True
    rounds = 0
    # each round raises at least one minimal element or terminates
    guard = len(game.states) * (ceiling + 1) ** max(1, len(report.credit_dims)) + 2
    while True:
        new, flagged = cpre(game, report, credits, ceiling)
        rounds += 1
        if flagged and not always_exact:
            exact = False
        if new == credits:
            break
        credits = new
        if rounds > guard:  # pragma: no cover - monotonicity bound
            raise AssertionError("energy fixpoint failed to stabilize")
    return FixpointResult(credits, exact, ceiling, rounds)
