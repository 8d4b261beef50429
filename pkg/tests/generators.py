"""Seeded random instance generators shared across the suite."""

from __future__ import annotations

import random
from fractions import Fraction

from gamesmith.gdl import StrategyDoc
from gamesmith.model import (
    MeanPayoffBound,
    ObjectiveSpec,
    PLAYER_1,
    make_game,
)


def rand_game(
    rng: random.Random,
    max_states: int = 5,
    dims: int = 2,
    wmax: int = 2,
    energy: bool = True,
    buchi: bool = False,
    parity: bool = False,
    mean_payoff: bool = False,
    max_out: int = 3,
):
    n = rng.randint(1, max_states)
    ids = [f"s{i}" for i in range(n)]
    states = []
    for sid in ids:
        owner = rng.choice((1, 2))
        prio = rng.randint(0, 3) if parity else 0
        states.append((sid, owner, prio))
    edges = []
    for sid in ids:
        outs = rng.sample(ids, k=min(len(ids), rng.randint(1, max_out)))
        for dst in outs:
            weight = tuple(rng.randint(-wmax, wmax) for _ in range(dims))
            edges.append((sid, dst, weight))

    energy_dims = frozenset(range(1, dims + 1)) if energy else frozenset()
    bounds = ()
    if mean_payoff:
        dim = dims  # constrain the last dimension, keep the rest energy
        energy_dims = frozenset(range(1, dims))
        q = rng.randint(1, 3)
        p = rng.randint(-wmax * q, wmax * q)
        bounds = (MeanPayoffBound(dim, Fraction(p, q)),)
    targets = frozenset({rng.choice(ids)}) if buchi else frozenset()
    spec = ObjectiveSpec(
        energy_dims=energy_dims,
        mean_payoff=bounds,
        buchi_targets=targets,
        use_parity=parity,
    )
    return make_game("g", dims, states, edges, ids[0], spec)


def rand_graph(rng: random.Random, max_nodes: int = 6, wmax: int = 3, max_out: int = 2):
    """Bare (owner, priority, succ) parity arena for solver tests."""
    n = rng.randint(1, max_nodes)
    owner = [rng.choice((1, 2)) for _ in range(n)]
    priority = [rng.randint(0, 3) for _ in range(n)]
    succ = []
    for v in range(n):
        k = rng.randint(1, max_out)
        succ.append(sorted(rng.sample(range(n), k=min(n, k))))
    return owner, priority, succ


def rand_weighted_graph(rng: random.Random, max_nodes: int = 12, wmax: int = 5):
    """Weighted digraph guaranteed to contain a cycle, for cycle-mean tests."""
    while True:
        n = rng.randint(2, max_nodes)
        succ = []
        for v in range(n):
            k = rng.randint(1, 2)
            succ.append(sorted(rng.sample(range(n), k=min(n, k))))
        has_cycle = any(v in succ[v] for v in range(n))
        if not has_cycle:
            seen = set()
            v = 0
            while v not in seen:
                seen.add(v)
                v = succ[v][0]
            has_cycle = True  # walking out-degree>=1 always closes a cycle
        weights = {
            (v, u): rng.randint(-wmax, wmax) for v in range(n) for u in succ[v]
        }
        return n, succ, weights


def rand_strategy(rng: random.Random, game, memories: int = 2) -> StrategyDoc:
    """Arbitrary total Moore machine for a game (not necessarily winning)."""
    mems = tuple(f"q{i}" for i in range(memories))
    moves = {}
    updates = {}
    for m in mems:
        for s in game.states:
            if s.owner == PLAYER_1:
                moves[(m, s.id)] = rng.choice(game.out_edges[s.id]).dst
        for e in game.edges:
            updates[(m, e.src, e.dst)] = rng.choice(mems)
    return StrategyDoc(
        name="random",
        game_name=game.name,
        memories=mems,
        initial_memory=mems[0],
        moves=moves,
        updates=updates,
    )
