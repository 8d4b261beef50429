import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamesmith.gdl import (
    DuplicateMove,
    GdlSyntaxError,
    MissingInitialMemory,
    parse_game,
    parse_strategy,
    serialize_game,
    serialize_strategy,
)
from gamesmith.model import SemanticError
from generators import rand_game


def test_lawnmower_objectives(lawnmower):
    spec = lawnmower.objectives
    assert sorted(spec.energy_dims) == [1, 2]
    assert [(b.dim, b.threshold) for b in spec.mean_payoff] == [(3, 10)]
    assert set(spec.buchi_targets) == {"grass_cutting"}
    assert not spec.use_parity


def test_minimal_game_text():
    g = parse_game("game g\ndimensions 1\nstate a owner=1 init\nedge a -> a weights=(0)")
    assert len(g.states) == 1 and len(g.edges) == 1
    assert serialize_game(g).count("\n") == 4


def test_edge_to_undeclared_state_has_span():
    text = "game g\ndimensions 1\nstate a owner=1 init\nedge a -> nowhere weights=(0)"
    with pytest.raises(SemanticError) as exc:
        parse_game(text)
    assert exc.value.span is not None
    assert exc.value.span.line == 4


def test_syntax_error_position():
    with pytest.raises(GdlSyntaxError) as exc:
        parse_game("game g\ndimensions 1\nstate a owner=? init")
    assert (exc.value.span.line, exc.value.span.column) == (3, 15)


def test_empty_strategy_text():
    with pytest.raises(GdlSyntaxError) as exc:
        parse_strategy("")
    assert (exc.value.span.line, exc.value.span.column) == (1, 1)


def test_sample_strategy_shape(sample_controller):
    s = sample_controller
    assert s.memories == ("m00", "m02")
    assert s.initial_memory == "m00"
    assert len(s.moves) == 8
    assert s.moves[("m02", "cloudy")] == "use_fuel"
    assert s.updates[("m02", "use_fuel", "grass_cutting")] == "m00"


def test_duplicate_move():
    text = (
        "strategy s for g\nmemory m init\n"
        "move m a -> b\nmove m a -> c\n"
    )
    with pytest.raises(DuplicateMove) as exc:
        parse_strategy(text)
    assert (exc.value.memory, exc.value.state) == ("m", "a")


def test_missing_initial_memory():
    with pytest.raises(MissingInitialMemory):
        parse_strategy("strategy s for g\nmemory m\nmove m a -> b\n")


def test_unknown_memory_reference():
    with pytest.raises(SemanticError):
        parse_strategy("strategy s for g\nmemory m init\nmove qq a -> b\n")


def test_label_escaping_roundtrip():
    text = (
        'game g\ndimensions 1\nstate a owner=1 init\n'
        'edge a -> a weights=(0) label="say \\"hi\\" \\\\"'
    )
    g = parse_game(text)
    assert g.edges[0].label == 'say "hi" \\'
    assert parse_game(serialize_game(g)) == g


def test_comments_and_blank_lines():
    g = parse_game(
        "# header\n\ngame g  # trailing\ndimensions 1\n"
        "state a owner=1 init\nedge a -> a weights=(0)\n\n"
    )
    assert g.name == "g"


def test_roundtrip_fixture(lawnmower):
    text = serialize_game(lawnmower)
    again = parse_game(text)
    assert again == lawnmower
    assert serialize_game(again) == text


def test_strategy_roundtrip(sample_controller):
    text = serialize_strategy(sample_controller)
    again = parse_strategy(text)
    assert again == sample_controller
    assert serialize_strategy(again) == text


def test_serialization_deterministic(lawnmower):
    assert serialize_game(lawnmower) == serialize_game(lawnmower)


def test_random_roundtrip_property():
    rng = random.Random(2024)
    for i in range(200):
        game = rand_game(
            rng,
            max_states=8,
            dims=rng.randint(1, 3),
            wmax=5,
            buchi=rng.random() < 0.4,
            mean_payoff=rng.random() < 0.4,
        )
        assert parse_game(serialize_game(game)) == game, f"instance {i}"


@given(st.text(max_size=60))
@settings(max_examples=150)
def test_parser_never_crashes_unstructured(text):
    try:
        parse_game(text)
    except (GdlSyntaxError, SemanticError):
        pass
