import random

import pytest

from gamesmith.antichain import energy_fixpoint, min_elements
from gamesmith.model import ObjectiveSpec, make_game, mp_transform
from gamesmith.synth import (
    ArenaTooLarge,
    SynthConfig,
    attractor,
    expand_capped,
    solve_parity,
    state_priorities,
    synthesize,
)
from gamesmith.verify import verify_all
from generators import rand_game, rand_graph
from oracles import enumerate_parity_winners


def spec_all_energy(dims):
    return ObjectiveSpec(energy_dims=frozenset(range(1, dims + 1)))


def _expand(game, cap, node_limit=500_000):
    tg, report = mp_transform(game)
    return expand_capped(tg, report, state_priorities(game), cap, node_limit)


def test_arena_bound(lawnmower):
    arena = _expand(lawnmower, cap=2)
    assert arena.node_count() <= 6 * 3**3 + 1


def test_arena_clamping():
    g = make_game("g", 1, [("a", 1)], [("a", "a", (1,))], "a", spec_all_energy(1))
    arena = _expand(g, cap=1)
    idx = arena.index
    assert arena.succ[idx[("a", (0,))]] == [idx[("a", (1,))]]
    assert arena.succ[idx[("a", (1,))]] == [idx[("a", (1,))]]


def test_arena_underflow_routing():
    g = make_game("g", 1, [("a", 1)], [("a", "a", (-1,))], "a", spec_all_energy(1))
    arena = _expand(g, cap=1)
    idx = arena.index
    assert arena.succ[idx[("a", (1,))]] == [idx[("a", (0,))]]
    assert arena.succ[idx[("a", (0,))]] == [arena.bottom]


def test_arena_p2_underflow_goes_to_sink():
    g = make_game(
        "g", 1,
        [("a", 2), ("b", 1)],
        [("a", "b", (-1,)), ("a", "a", (0,)), ("b", "b", (0,))],
        "a",
        spec_all_energy(1),
    )
    arena = _expand(g, cap=1)
    idx = arena.index
    assert arena.bottom in arena.succ[idx[("a", (0,))]]


def test_arena_too_large():
    g = make_game("g", 2, [("a", 1)], [("a", "a", (0, 0))], "a", spec_all_energy(2))
    with pytest.raises(ArenaTooLarge):
        _expand(g, cap=100, node_limit=50)


def test_attractor_trivial_cases():
    g = make_game(
        "g", 1,
        [("a", 1), ("b", 1), ("t", 1)],
        [("a", "b", (0,)), ("b", "t", (0,)), ("t", "t", (0,))],
        "a",
        spec_all_energy(1),
    )
    arena = _expand(g, cap=0)
    all_nodes = frozenset(range(arena.node_count()))
    got, _ = attractor(arena, 1, all_nodes)
    assert got == all_nodes
    got, _ = attractor(arena, 1, frozenset())
    assert got == frozenset()
    targets = {arena.index[("t", (0,))]}
    got, wit = attractor(arena, 1, targets)
    chain = {arena.index[("a", (0,))], arena.index[("b", (0,))]}
    assert got == targets | chain
    assert set(wit) == chain  # forced closure records witness moves


def test_solve_parity_single_nodes():
    res = solve_parity([1], [0], [[0]])
    assert res.winner == [1]
    res = solve_parity([1], [1], [[0]])
    assert res.winner == [2]


def test_solve_parity_four_node_example():
    # P1 square node alternates with P2; priorities {0,1,2}
    owner = [1, 2, 1, 2]
    priority = [1, 0, 2, 1]
    succ = [[1, 2], [0, 3], [3], [2, 0]]
    res = solve_parity(owner, priority, succ)
    assert res.winner == enumerate_parity_winners(owner, priority, succ)


def test_solve_parity_matches_enumeration_oracle():
    rng = random.Random(424242)
    for i in range(200):
        owner, priority, succ = rand_graph(rng, max_nodes=6, max_out=2)
        res = solve_parity(owner, priority, succ)
        expected = enumerate_parity_winners(owner, priority, succ)
        assert res.winner == expected, f"instance {i}"


def test_parity_strategies_are_winning():
    """The memoryless moves returned for a player's region keep the play
    inside it and win it (validated by replaying every adversary choice)."""
    rng = random.Random(99)
    for _ in range(120):
        owner, priority, succ = rand_graph(rng, max_nodes=6, max_out=2)
        res = solve_parity(owner, priority, succ)
        for player in (1, 2):
            region = {v for v in range(len(owner)) if res.winner[v] == player}
            moves = res.moves_for(player)
            for start in region:
                _assert_region_win(owner, priority, succ, player, region, moves, start)


def _assert_region_win(owner, priority, succ, player, region, moves, start):
    # exhaustive adversary walks with cycle detection over (node, path-set)
    def walk(v, seen):
        if v in seen:
            cycle = seen[seen.index(v):] + [v]
            best = min(priority[u] for u in cycle[:-1])
            good = (best % 2 == 0) == (player == 1)
            assert good, f"cycle {cycle} lost by owner of region"
            return
        if owner[v] == player:
            assert v in region
            nxt = [moves[v]]
        else:
            nxt = succ[v]
        for u in nxt:
            assert u in region, "play escaped the winning region"
            walk(u, seen + [v])

    walk(start, [])


def test_synthesize_lawnmower(lawnmower):
    res = synthesize(lawnmower)
    assert res.status == "WINNING"
    assert res.credits == {(0, 0)}
    assert res.chosen_credit == (0, 0)
    report = verify_all(lawnmower, res.strategy, res.chosen_credit)
    assert report.passed


def test_synthesize_trivial_gaining_loop():
    g = make_game(
        "g", 1, [("a", 1)], [("a", "a", (1,))], "a",
        ObjectiveSpec(energy_dims=frozenset({1})),
    )
    res = synthesize(g, SynthConfig(engine="capped"))
    assert res.status == "WINNING"
    assert res.credits == {(0,)}
    assert len(res.strategy.memories) >= 1


def test_strategy_memory_bound(lawnmower):
    res = synthesize(lawnmower)
    cap = res.final_cap
    assert len(res.strategy.memories) <= (cap + 1) ** 3
    # zero-weight game: single memory state
    g = make_game(
        "g", 1,
        [("a", 1), ("b", 2)],
        [("a", "b", (0,)), ("b", "a", (0,))],
        "a",
        ObjectiveSpec(energy_dims=frozenset({1})),
    )
    res = synthesize(g, SynthConfig(engine="capped"))
    assert res.status == "WINNING"
    assert len(res.strategy.memories) == 1


def test_losing_via_parity_precheck(lawnmower):
    """Move the recurrence target somewhere the adversary can starve: with the
    target on cat_attack, always choosing 'cloudy' at the base keeps the play
    away from it forever."""
    edits = [(s.id, s.owner) for s in lawnmower.states]
    edges = [(e.src, e.dst, e.weight, e.label) for e in lawnmower.edges]
    mutated = make_game(
        "lawnmower", 3, edits, edges, "base",
        ObjectiveSpec(
            energy_dims=lawnmower.objectives.energy_dims,
            mean_payoff=lawnmower.objectives.mean_payoff,
            buchi_targets=frozenset({"cat_attack"}),
        ),
    )
    res = synthesize(mutated)
    assert res.status == "LOSING"
    assert res.reason == "parity"


def test_losing_via_energy_precheck():
    g = make_game(
        "g", 1, [("a", 1)], [("a", "a", (-1,))], "a",
        ObjectiveSpec(energy_dims=frozenset({1})),
    )
    res = synthesize(g, SynthConfig(engine="capped"))
    assert res.status == "LOSING"
    assert res.reason == "energy"


def test_unknown_is_honest_when_ceiling_cuts():
    # two dimensions: no exactness guarantee, so emptiness under a ceiling
    # stays UNKNOWN and the capped solver alone never claims losing
    g = make_game(
        "g", 2, [("a", 1)], [("a", "a", (-1, 0))], "a",
        ObjectiveSpec(energy_dims=frozenset({1, 2})),
    )
    res = synthesize(g, SynthConfig(engine="capped", max_cap=4))
    assert res.status == "UNKNOWN"


def test_antichain_engine_agrees_with_capped():
    rng = random.Random(777)
    for _ in range(60):
        game = rand_game(rng, max_states=4, dims=2, wmax=2)
        anti = synthesize(game, SynthConfig(engine="antichain", ceiling=10))
        capped = synthesize(game, SynthConfig(engine="capped", max_cap=32))
        if anti.status == "WINNING" and capped.status == "WINNING":
            fx = energy_fixpoint(*mp_transform(game), ceiling=capped.final_cap)
            assert capped.credits == fx.credits[game.initial]
        if anti.status == "LOSING":
            assert capped.status == "LOSING"


def test_monotonicity_in_cap():
    rng = random.Random(13)
    checked = 0
    for _ in range(80):
        game = rand_game(rng, max_states=4, dims=2, wmax=2)
        tg, report = mp_transform(game)
        prio = state_priorities(game)
        for cap in (2, 4):
            a1 = expand_capped(tg, report, prio, cap)
            a2 = expand_capped(tg, report, prio, cap * 2)
            w1 = _initial_wins(game, a1)
            w2 = _initial_wins(game, a2)
            if w1:
                checked += 1
                assert w2, "WINNING at cap c must stay WINNING at 2c"
                low, high = min_elements(w1), min_elements(w2)
                for c in low:  # credits never get worse with a larger cap
                    assert any(all(a <= b for a, b in zip(h, c)) for h in high)
    assert checked > 30


def _initial_wins(game, arena):
    res = solve_parity(arena.owner, arena.priority, arena.succ)
    return [
        credit
        for (sid, credit), idx in arena.index.items()
        if sid == game.initial and res.winner[idx] == 1
    ]


def test_synthesized_strategies_always_verify():
    rng = random.Random(4242)
    winning = 0
    for _ in range(80):
        kind = rng.random()
        game = rand_game(
            rng, max_states=4, dims=2, wmax=2,
            buchi=kind < 0.4, parity=0.4 <= kind < 0.6,
            mean_payoff=rng.random() < 0.3,
        )
        res = synthesize(game, SynthConfig(max_cap=16, engine="capped"))
        if res.status != "WINNING":
            continue
        winning += 1
        report = verify_all(game, res.strategy, res.chosen_credit)
        assert report.passed, f"soundness gate failed on {game}"
        # upward closure: any bigger credit stays sufficient
        bumped = tuple(c + 1 for c in res.chosen_credit)
        assert verify_all(game, res.strategy, bumped).passed
    assert winning > 20


def test_synthesize_parity_game():
    """Priorities interpreted directly: the controller must reach the even
    self-loop without ever letting an odd minimal priority recur."""
    g = make_game(
        "g", 1,
        [("a", 1, 1), ("b", 2, 1), ("c", 1, 2), ("d", 1, 3)],
        [
            ("a", "b", (0,)),
            ("b", "c", (0,)), ("b", "d", (0,)),
            ("c", "c", (1,)),
            ("d", "c", (0,)), ("d", "d", (0,)),
        ],
        "a",
        ObjectiveSpec(energy_dims=frozenset({1}), use_parity=True),
    )
    res = synthesize(g)
    assert res.status == "WINNING"
    report = verify_all(g, res.strategy, res.chosen_credit)
    assert report.passed
    # d's self loop has odd minimal priority 3: the strategy must leave for c
    for (mem, state), dst in res.strategy.moves.items():
        if state == "d":
            assert dst == "c"


def test_synthesize_parity_losing():
    g = make_game(
        "g", 1,
        [("a", 2, 1), ("b", 1, 1)],
        [("a", "a", (0,)), ("a", "b", (0,)), ("b", "a", (0,))],
        "a",
        ObjectiveSpec(use_parity=True),
    )
    res = synthesize(g)
    assert res.status == "LOSING" and res.reason == "parity"
