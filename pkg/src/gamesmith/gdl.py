"""Textual formats for games and strategies.

Both formats are line-oriented: one directive per line, `#` comments, blank
lines ignored.  Identifiers match [a-z_][a-z0-9_]*.

Game directives::

    game <id>
    dimensions <k>
    objective energy dim=<i>
    objective meanpayoff dim=<i> threshold=<p>/<q>
    objective buchi states=<id>,<id>,...
    objective parity
    state <id> owner=<1|2> [priority=<n>] [init]
    edge <src> -> <dst> weights=(<w1>,...,<wk>) [label="<text>"]

Strategy directives::

    strategy <id> for <game-id>
    memory <id> [init]
    move <mem> <state> -> <dst-state>
    update <mem> <src> -> <dst> => <mem'>

Serialization is canonical (states in declaration order, edges sorted by
(src, dst)) and byte-deterministic; parse(serialize(x)) is structurally equal
to x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .model import (
    GameStructure,
    GamesmithError,
    RawEdge,
    RawGame,
    RawObjective,
    RawState,
    SemanticError,
    SourceSpan,
    validate_game,
)


class GdlSyntaxError(GamesmithError):
    """Input text that does not match the grammar."""

    def __init__(self, span: SourceSpan, expected: str):
        super().__init__(f"{span}: expected {expected}")
        self.span = span
        self.expected = expected


class DuplicateMemory(SemanticError):
    pass


class DuplicateMove(SemanticError):
    def __init__(self, memory: str, state: str, span: SourceSpan | None = None):
        super().__init__(f"second move for memory '{memory}' at state '{state}'", span)
        self.memory = memory
        self.state = state


class DuplicateUpdate(SemanticError):
    pass


class MissingInitialMemory(SemanticError):
    pass


@dataclass(frozen=True)
class StrategyDoc:
    """A finite-memory deterministic controller in portable form.

    moves maps (memory, player-1 state) to the chosen destination state;
    updates maps (memory, edge src, edge dst) to the successor memory.  Move
    totality over reachable situations is a verification-time concern, not a
    parse-time one.
    """

    name: str
    game_name: str
    memories: tuple[str, ...]
    initial_memory: str
    moves: Mapping[tuple[str, str], str]
    updates: Mapping[tuple[str, str, str], str]
    spans: Mapping[tuple, SourceSpan] | None = field(
        default=None, compare=False, repr=False
    )


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r]+)
    | (?P<comment>\#.*)
    | (?P<arrow>->)
    | (?P<darrow>=>)
    | (?P<int>-?\d+)
    | (?P<ident>[a-z_][a-z0-9_]*)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<equals>=)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<comma>,)
    | (?P<slash>/)
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _unquote(text: str, span: SourceSpan) -> str:
    body = text[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            if i + 1 >= len(body) or body[i + 1] not in _ESCAPES:
                raise GdlSyntaxError(span, 'escape \\" or \\\\ inside string')
            out.append(_ESCAPES[body[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _lex_line(line: str, lineno: int, base_offset: int) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise GdlSyntaxError(
                SourceSpan(lineno, pos + 1, base_offset + pos),
                f"a valid token, found {line[pos]!r}",
            )
        kind = m.lastgroup
        assert kind is not None
        if kind not in ("ws", "comment"):
            tokens.append(
                _Token(kind, m.group(), SourceSpan(lineno, pos + 1, base_offset + pos))
            )
        pos = m.end()
    return tokens


class _Line:
    """Cursor over the tokens of one directive line."""

    def __init__(self, tokens: list[_Token], end_span: SourceSpan):
        self.tokens = tokens
        self.pos = 0
        self.end_span = end_span

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise GdlSyntaxError(self.end_span, what)
        if tok.kind != kind:
            raise GdlSyntaxError(tok.span, f"{what}, found {tok.text!r}")
        self.pos += 1
        return tok

    def take_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise GdlSyntaxError(self.end_span, f"'{word}'")
        if tok.kind != "ident" or tok.text != word:
            raise GdlSyntaxError(tok.span, f"'{word}', found {tok.text!r}")
        self.pos += 1
        return tok

    def take_ident(self, what: str) -> _Token:
        return self.take("ident", what)

    def take_int(self, what: str) -> int:
        return int(self.take("int", what).text)

    def match_keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.text == word:
            self.pos += 1
            return True
        return False

    def finish(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise GdlSyntaxError(tok.span, f"end of line, found {tok.text!r}")


def _lines(text: str) -> list[_Line]:
    out = []
    offset = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        tokens = _lex_line(line, lineno, offset)
        if tokens:
            out.append(_Line(tokens, SourceSpan(lineno, len(line) + 1, offset + len(line))))
        offset += len(line) + 1
    return out


_START = SourceSpan(1, 1, 0)


def parse_game(text: str) -> GameStructure:
    """Parse and validate a game description.

    Raises GdlSyntaxError for grammar violations and the model's semantic
    errors (with spans) for everything validate_game rejects.
    """
    raw = RawGame()
    saw_game = None
    saw_dims = None
    for line in _lines(text):
        head = line.take_ident("a directive (game/dimensions/objective/state/edge)")
        if head.text == "game":
            if saw_game is not None:
                raise SemanticError("second 'game' directive", head.span)
            raw.name = line.take_ident("game name").text
            raw.span = head.span
            saw_game = head.span
        elif head.text == "dimensions":
            if saw_dims is not None:
                raise SemanticError("second 'dimensions' directive", head.span)
            raw.dimension = line.take_int("dimension count")
            saw_dims = head.span
            if raw.dimension < 1:
                raise SemanticError("dimensions must be a positive integer", head.span)
        elif head.text == "objective":
            raw.objectives.append(_parse_objective(line, head.span))
        elif head.text == "state":
            raw.states.append(_parse_state(line))
        elif head.text == "edge":
            raw.edges.append(_parse_edge(line))
        else:
            raise GdlSyntaxError(
                head.span, f"a directive keyword, found {head.text!r}"
            )
        line.finish()
    if saw_game is None:
        raise GdlSyntaxError(_START, "a 'game' directive")
    if saw_dims is None:
        raise SemanticError("missing 'dimensions' directive", saw_game)
    return validate_game(raw)


def _parse_objective(line: _Line, span: SourceSpan) -> RawObjective:
    kind = line.take_ident("an objective kind (energy/meanpayoff/buchi/parity)")
    if kind.text == "energy":
        line.take_keyword("dim")
        line.take("equals", "'='")
        return RawObjective("energy", dim=line.take_int("a dimension index"), span=span)
    if kind.text == "meanpayoff":
        line.take_keyword("dim")
        line.take("equals", "'='")
        dim = line.take_int("a dimension index")
        line.take_keyword("threshold")
        line.take("equals", "'='")
        p = line.take_int("threshold numerator")
        line.take("slash", "'/'")
        q_tok = line.take("int", "threshold denominator")
        q = int(q_tok.text)
        if q <= 0:
            raise SemanticError("threshold denominator must be positive", q_tok.span)
        return RawObjective("meanpayoff", dim=dim, threshold=Fraction(p, q), span=span)
    if kind.text == "buchi":
        line.take_keyword("states")
        line.take("equals", "'='")
        targets = [line.take_ident("a state id").text]
        while line.peek() is not None and line.peek().kind == "comma":  # type: ignore[union-attr]
            line.take("comma", "','")
            targets.append(line.take_ident("a state id").text)
        return RawObjective("buchi", targets=tuple(targets), span=span)
    if kind.text == "parity":
        return RawObjective("parity", span=span)
    raise GdlSyntaxError(kind.span, f"an objective kind, found {kind.text!r}")


def _parse_state(line: _Line) -> RawState:
    name = line.take_ident("a state id")
    line.take_keyword("owner")
    line.take("equals", "'='")
    owner = line.take_int("owner 1 or 2")
    priority = 0
    if line.match_keyword("priority"):
        line.take("equals", "'='")
        priority = line.take_int("a priority")
    init = line.match_keyword("init")
    return RawState(name.text, owner, priority, init, span=name.span)


def _parse_edge(line: _Line) -> RawEdge:
    src = line.take_ident("a source state id")
    line.take("arrow", "'->'")
    dst = line.take_ident("a destination state id")
    line.take_keyword("weights")
    line.take("equals", "'='")
    line.take("lparen", "'('")
    weights = [line.take_int("a weight")]
    while line.peek() is not None and line.peek().kind == "comma":  # type: ignore[union-attr]
        line.take("comma", "','")
        weights.append(line.take_int("a weight"))
    line.take("rparen", "')'")
    label = None
    if line.match_keyword("label"):
        line.take("equals", "'='")
        tok = line.take("string", "a quoted label")
        label = _unquote(tok.text, tok.span)
    return RawEdge(src.text, dst.text, tuple(weights), label, span=src.span)


def serialize_game(game: GameStructure) -> str:
    """Render the canonical, byte-deterministic text of a game."""
    spec = game.objectives
    lines = [f"game {game.name}", f"dimensions {game.dimension}"]
    for d in sorted(spec.energy_dims):
        lines.append(f"objective energy dim={d}")
    for b in spec.mean_payoff:
        lines.append(
            f"objective meanpayoff dim={b.dim} "
            f"threshold={b.threshold.numerator}/{b.threshold.denominator}"
        )
    if spec.buchi_targets:
        lines.append("objective buchi states=" + ",".join(sorted(spec.buchi_targets)))
    if spec.use_parity:
        lines.append("objective parity")
    for s in game.states:
        parts = [f"state {s.id} owner={s.owner}"]
        if s.priority:
            parts.append(f"priority={s.priority}")
        if s.id == game.initial:
            parts.append("init")
        lines.append(" ".join(parts))
    for e in game.edges:
        entry = f"edge {e.src} -> {e.dst} weights=({','.join(map(str, e.weight))})"
        if e.label is not None:
            entry += f" label={_quote(e.label)}"
        lines.append(entry)
    return "\n".join(lines) + "\n"


def parse_strategy(text: str) -> StrategyDoc:
    """Parse a strategy document; state names are resolved at verify time."""
    name = None
    game_name = None
    memories: list[str] = []
    initial: str | None = None
    moves: dict[tuple[str, str], str] = {}
    updates: dict[tuple[str, str, str], str] = {}
    spans: dict[tuple, SourceSpan] = {}
    pending: list[tuple[str, tuple, SourceSpan]] = []

    for line in _lines(text):
        head = line.take_ident("a directive (strategy/memory/move/update)")
        if head.text == "strategy":
            if name is not None:
                raise SemanticError("second 'strategy' directive", head.span)
            name = line.take_ident("a strategy name").text
            line.take_keyword("for")
            game_name = line.take_ident("a game name").text
        elif head.text == "memory":
            mem = line.take_ident("a memory id")
            if mem.text in memories:
                raise DuplicateMemory(f"memory '{mem.text}' declared twice", mem.span)
            memories.append(mem.text)
            if line.match_keyword("init"):
                if initial is not None:
                    raise SemanticError(
                        f"both '{initial}' and '{mem.text}' marked init", mem.span
                    )
                initial = mem.text
        elif head.text == "move":
            mem = line.take_ident("a memory id").text
            state = line.take_ident("a state id").text
            line.take("arrow", "'->'")
            dst = line.take_ident("a destination state id").text
            if (mem, state) in moves:
                raise DuplicateMove(mem, state, head.span)
            moves[(mem, state)] = dst
            spans[("move", mem, state)] = head.span
            pending.append(("move", (mem,), head.span))
        elif head.text == "update":
            mem = line.take_ident("a memory id").text
            src = line.take_ident("a source state id").text
            line.take("arrow", "'->'")
            dst = line.take_ident("a destination state id").text
            line.take("darrow", "'=>'")
            nxt = line.take_ident("a successor memory id").text
            if (mem, src, dst) in updates:
                raise DuplicateUpdate(
                    f"second update for ('{mem}', {src} -> {dst})", head.span
                )
            updates[(mem, src, dst)] = nxt
            spans[("update", mem, src, dst)] = head.span
            pending.append(("update", (mem, nxt), head.span))
        else:
            raise GdlSyntaxError(head.span, f"a directive keyword, found {head.text!r}")
        line.finish()

    if name is None or game_name is None:
        raise GdlSyntaxError(_START, "a 'strategy' directive")
    if initial is None:
        raise MissingInitialMemory("no memory marked init", _START)
    known = set(memories)
    for _, mems, span in pending:
        for m in mems:
            if m not in known:
                raise SemanticError(f"unknown memory '{m}'", span)
    return StrategyDoc(
        name=name,
        game_name=game_name,
        memories=tuple(memories),
        initial_memory=initial,
        moves=moves,
        updates=updates,
        spans=spans or None,
    )


def serialize_strategy(doc: StrategyDoc) -> str:
    """Render the canonical, byte-deterministic text of a strategy."""
    lines = [f"strategy {doc.name} for {doc.game_name}"]
    for m in doc.memories:
        lines.append(f"memory {m} init" if m == doc.initial_memory else f"memory {m}")
    rank = {m: i for i, m in enumerate(doc.memories)}
    for (mem, state), dst in sorted(
        doc.moves.items(), key=lambda kv: (rank[kv[0][0]], kv[0][1])
    ):
        lines.append(f"move {mem} {state} -> {dst}")
    for (mem, src, dst), nxt in sorted(
        doc.updates.items(), key=lambda kv: (rank[kv[0][0]], kv[0][1], kv[0][2])
    ):
        lines.append(f"update {mem} {src} -> {dst} => {nxt}")
    return "\n".join(lines) + "\n"
