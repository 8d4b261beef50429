"""Independent brute-force oracles the fast implementations are checked
against.  Everything here favors obviousness over speed and shares no code
with the package beyond the data model."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iter_product

import networkx as nx

from gamesmith.model import PLAYER_1, PLAYER_2, credit_slice


def brute_force_energy_credits(game, report, ceiling):
    """Minimal winning credits of the ceiling-clamped multi-energy game,
    solved by explicit enumeration of every (state, credit) node and a
    plain alternating safety fixpoint."""
    dims = report.credit_dims
    d = len(dims)
    credits = list(iter_product(range(ceiling + 1), repeat=d))
    nodes = [(s.id, c) for s in game.states for c in credits]

    succ = {}
    losing = set()
    for sid, credit in nodes:
        owner = game.owner(sid)
        moves = []
        dead = False
        for e in game.out_edges[sid]:
            w = credit_slice(e.weight, dims)
            nxt = tuple(c + x for c, x in zip(credit, w))
            if any(v < 0 for v in nxt):
                if owner == PLAYER_2:
                    dead = True  # adversary exploits the underflow
                continue
            moves.append((e.dst, tuple(min(ceiling, v) for v in nxt)))
        if dead or not moves:
            losing.add((sid, credit))
        succ[(sid, credit)] = moves

    changed = True
    while changed:
        changed = False
        for node in nodes:
            if node in losing:
                continue
            owner = game.owner(node[0])
            nxts = succ[node]
            if owner == PLAYER_1:
                bad = all(n in losing for n in nxts)
            else:
                bad = any(n in losing for n in nxts)
            if bad:
                losing.add(node)
                changed = True

    result = {}
    for s in game.states:
        winning = [c for c in credits if (s.id, c) not in losing]
        minimal = {
            c
            for c in winning
            if not any(
                o != c and all(a <= b for a, b in zip(o, c)) for o in winning
            )
        }
        result[s.id] = frozenset(minimal)
    return result


def enumerate_parity_winners(owner, priority, succ):
    """Winner per node by enumerating every memoryless strategy pair and
    walking the single induced lasso (min-even convention)."""
    n = len(owner)
    p1_nodes = [v for v in range(n) if owner[v] == PLAYER_1]
    p2_nodes = [v for v in range(n) if owner[v] == PLAYER_2]

    def lasso_winner(choice, start):
        seen = {}
        v = start
        trace = []
        while v not in seen:
            seen[v] = len(trace)
            trace.append(v)
            v = choice[v]
        cycle = trace[seen[v]:]
        return PLAYER_1 if min(priority[u] for u in cycle) % 2 == 0 else PLAYER_2

    winners = []
    p1_options = list(iter_product(*(range(len(succ[v])) for v in p1_nodes)))
    p2_options = list(iter_product(*(range(len(succ[v])) for v in p2_nodes)))
    for start in range(n):
        won = False
        for pick1 in p1_options:
            choice = {v: succ[v][i] for v, i in zip(p1_nodes, pick1)}
            if all(
                lasso_winner(
                    {**choice, **{v: succ[v][i] for v, i in zip(p2_nodes, pick2)}},
                    start,
                )
                == PLAYER_1
                for pick2 in p2_options
            ):
                won = True
                break
        winners.append(PLAYER_1 if won else PLAYER_2)
    return winners


def simple_cycles(n, succ):
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for v in range(n):
        for u in succ[v]:
            g.add_edge(v, u)
    return list(nx.simple_cycles(g))


def max_cycle_mean_enumerated(n, succ, wfun):
    """Maximum cycle mean by enumerating every simple cycle."""
    best = None
    for cycle in simple_cycles(n, succ):
        total = 0
        for i, v in enumerate(cycle):
            u = cycle[(i + 1) % len(cycle)]
            total += wfun(v, u)
        mean = Fraction(total, len(cycle))
        if best is None or mean > best:
            best = mean
    return best


def min_prefix_exhaustive(n, succ, wfun, max_len):
    """Minimum running sum over all paths from node 0 of length <= max_len,
    by dynamic programming over exact path lengths."""
    INF = float("inf")
    best = [INF] * n
    best[0] = 0
    overall = 0
    for _ in range(max_len):
        nxt = list(best)
        for v in range(n):
            if best[v] is INF:
                continue
            for u in succ[v]:
                cand = best[v] + wfun(v, u)
                if cand < nxt[u]:
                    nxt[u] = cand
        best = nxt
        overall = min(overall, min(b for b in best if b is not INF))
    return overall


def game_cycles(game):
    """Simple cycles of a game graph as lists of state ids."""
    idx = game.state_index
    succ = [[idx[e.dst] for e in game.out_edges[s.id]] for s in game.states]
    ids = [s.id for s in game.states]
    return [[ids[v] for v in cyc] for cyc in simple_cycles(len(ids), succ)]
