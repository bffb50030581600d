"""S-expression game notation: parsing, canonical serialization, DOT export.

Extensive form::

    (game (players Peter Mary)
      (Peter
        (give
          (Mary
            (pay (leaf 2 1))
            (keep (leaf 0 2))))
        (withhold (leaf 1 0))))

Normal form::

    (ngame (players P1 P2)
      (cols c d)
      (row c (cell 3 3) (cell 0 5))
      (row d (cell 5 0) (cell 1 1)))

``;`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import Union

from gtsolve.errors import GameError
from gtsolve.model import (
    ROOT,
    Decision,
    ExtensiveGame,
    Leaf,
    Node,
    NormalFormGame,
    Path,
    validate,
    validate_normal,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")
RESERVED = frozenset({"game", "players", "leaf", "ngame", "cols", "row", "cell"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<int>-?[0-9]+)(?![A-Za-z0-9_-])
  | (?P<name>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<bad>-?[0-9]+[A-Za-z0-9_-]*|[^\s();]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int  # byte offset
    end: int
    line: int  # 1-based
    column: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ParseError(GameError):
    """Syntax or semantic error in game text.

    ``kind`` is ``"syntax"`` for malformed notation and ``"validation"`` for
    well-formed text describing an invalid game.
    """

    def __init__(self, message: str, span: SourceSpan, expected: str | None = None, kind: str = "syntax"):
        self.message = message
        self.span = span
        self.expected = expected
        self.kind = kind
        detail = f"{message} ({span})"
        if expected:
            detail += f"; expected {expected}"
        super().__init__(detail)


class _Source:
    """Maps character offsets to byte offsets and line/column positions."""

    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, start: int, end: int) -> SourceSpan:
        line = bisect.bisect_right(self._line_starts, start)
        column = start - self._line_starts[line - 1] + 1
        b_start = len(self.text[:start].encode("utf-8"))
        b_end = b_start + len(self.text[start:end].encode("utf-8"))
        return SourceSpan(b_start, b_end, line, column)


@dataclass(frozen=True)
class Atom:
    value: Union[str, int]
    start: int
    end: int

    @property
    def is_int(self) -> bool:
        return isinstance(self.value, int)


@dataclass(frozen=True)
class SList:
    items: tuple
    start: int
    end: int


SExpr = Union[Atom, SList]


def read_sexpr(text: str) -> SExpr:
    """Read exactly one s-expression from ``text``."""
    src = _Source(text)
    stack: list[tuple[int, list]] = []
    result: SExpr | None = None
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        start, pos = m.start(), m.end()
        if kind in ("ws", "comment"):
            continue
        if result is not None:
            raise ParseError("trailing input after game", src.span(start, pos), "end of input")
        if kind == "bad":
            raise ParseError(f"invalid token {m.group()!r}", src.span(start, pos), "'(', ')', a name or an integer")
        if kind == "open":
            stack.append((start, []))
            continue
        if kind == "close":
            if not stack:
                raise ParseError("unbalanced ')'", src.span(start, pos), "'('")
            open_at, items = stack.pop()
            node: SExpr = SList(tuple(items), open_at, pos)
        elif kind == "int":
            node = Atom(int(m.group()), start, pos)
        else:
            node = Atom(m.group(), start, pos)
        if stack:
            stack[-1][1].append(node)
        elif isinstance(node, Atom):
            raise ParseError("expected '(' to open the game", src.span(start, pos), "'('")
        else:
            result = node
    if stack:
        open_at = stack[-1][0]
        raise ParseError("unclosed '('", src.span(len(text), len(text)), f"')' closing the '(' at {src.span(open_at, open_at + 1)}")
    if result is None:
        raise ParseError("empty input", src.span(len(text), len(text)), "'('")
    return result


class _Reader:
    def __init__(self, text: str):
        self.src = _Source(text)

    def error(self, message: str, at: SExpr, expected: str | None = None, kind: str = "syntax") -> ParseError:
        return ParseError(message, self.src.span(at.start, at.end), expected, kind)

    def head(self, expr: SExpr, what: str) -> SList:
        if not isinstance(expr, SList):
            raise self.error(f"expected {what}, found {expr.value!r}", expr, f"'(' starting {what}")
        return expr

    def keyword(self, expr: SExpr, word: str) -> SList:
        lst = self.head(expr, f"({word} ...)")
        if not lst.items or not isinstance(lst.items[0], Atom) or lst.items[0].value != word:
            found = lst.items[0] if lst.items else lst
            raise self.error(f"expected ({word} ...)", found, repr(word))
        return lst

    def name(self, expr: SExpr, what: str) -> str:
        if not isinstance(expr, Atom) or expr.is_int:
            raise self.error(f"expected {what}", expr, what)
        return expr.value

    def integer(self, expr: SExpr) -> int:
        if not isinstance(expr, Atom) or not expr.is_int:
            raise self.error("expected an integer payoff", expr, "integer")
        return expr.value

    def players(self, expr: SExpr) -> tuple[str, ...]:
        lst = self.keyword(expr, "players")
        if len(lst.items) < 2:
            raise self.error("players list is empty", lst, "at least one player name")
        names: list[str] = []
        for item in lst.items[1:]:
            name = self.name(item, "player name")
            if name in RESERVED:
                raise self.error(f"player name {name!r} is a reserved word", item, kind="validation")
            if name in names:
                raise self.error(f"duplicate player {name!r}", item, kind="validation")
            names.append(name)
        return tuple(names)


def parse_extensive(text: str) -> ExtensiveGame:
    reader = _Reader(text)
    top = reader.keyword(read_sexpr(text), "game")
    if len(top.items) != 3:
        raise reader.error("game takes a players list and one tree", top, "(game (players ...) TREE)")
    players = reader.players(top.items[1])
    owners = {name: i for i, name in enumerate(players)}

    def tree(expr: SExpr) -> Node:
        lst = reader.head(expr, "a node or leaf")
        if not lst.items:
            raise reader.error("empty list", lst, "'leaf' or a player name")
        head = lst.items[0]
        tag = reader.name(head, "'leaf' or a player name")
        if tag == "leaf":
            payoffs = tuple(reader.integer(x) for x in lst.items[1:])
            if len(payoffs) != len(players):
                raise reader.error(
                    f"payoff arity: leaf has {len(payoffs)} payoffs, game has {len(players)} players",
                    lst, f"{len(players)} integers", kind="validation",
                )
            return Leaf(payoffs)
        if tag not in owners:
            raise reader.error(f"unknown player {tag!r}", head, "a declared player name", kind="validation")
        if len(lst.items) < 2:
            raise reader.error(f"node of {tag} has no moves", lst, "(LABEL TREE)")
        moves = []
        seen: set[str] = set()
        for move in lst.items[1:]:
            mv = reader.head(move, "a move (LABEL TREE)")
            if len(mv.items) != 2:
                raise reader.error("a move is a label followed by exactly one tree", mv, "(LABEL TREE)")
            label = reader.name(mv.items[0], "move label")
            if label in seen:
                raise reader.error(f"duplicate move label {label!r}", mv.items[0], kind="validation")
            seen.add(label)
            moves.append((label, tree(mv.items[1])))
        return Decision(owners[tag], tuple(moves))

    game = ExtensiveGame(players, tree(top.items[2]))
    diags = validate(game)
    if diags:
        raise reader.error(str(diags[0]), top, kind="validation")
    return game


def parse_normal(text: str) -> NormalFormGame:
    reader = _Reader(text)
    top = reader.keyword(read_sexpr(text), "ngame")
    if len(top.items) < 4:
        raise reader.error("ngame needs players, cols and at least one row", top, "(ngame (players A B) (cols ...) (row ...)+)")
    players = reader.players(top.items[1])
    if len(players) != 2:
        raise reader.error(f"normal form needs exactly 2 players, got {len(players)}", top.items[1], kind="validation")
    cols_expr = reader.keyword(top.items[2], "cols")
    if len(cols_expr.items) < 2:
        raise reader.error("cols list is empty", cols_expr, "at least one column label")
    cols = []
    for item in cols_expr.items[1:]:
        label = reader.name(item, "column label")
        if label in cols:
            raise reader.error(f"duplicate column label {label!r}", item, kind="validation")
        cols.append(label)
    rows: list[str] = []
    cells = []
    for row_expr in top.items[3:]:
        row = reader.keyword(row_expr, "row")
        if len(row.items) < 3:
            raise reader.error("row needs a label and at least one cell", row, "(row LABEL (cell INT INT)+)")
        label = reader.name(row.items[1], "row label")
        if label in rows:
            raise reader.error(f"duplicate row label {label!r}", row.items[1], kind="validation")
        rows.append(label)
        row_cells = []
        for cell_expr in row.items[2:]:
            cell = reader.keyword(cell_expr, "cell")
            if len(cell.items) != 3:
                raise reader.error("cell takes exactly two payoffs", cell, "(cell INT INT)")
            row_cells.append((reader.integer(cell.items[1]), reader.integer(cell.items[2])))
        if len(row_cells) != len(cols):
            raise reader.error(
                f"ragged row: row {label!r} has {len(row_cells)} cells for {len(cols)} columns",
                row, f"{len(cols)} cells", kind="validation",
            )
        cells.append(tuple(row_cells))
    return NormalFormGame(players, tuple(rows), tuple(cols), tuple(cells))


def parse_any(text: str) -> Union[ExtensiveGame, NormalFormGame]:
    """Dispatch on the head keyword (``game`` or ``ngame``)."""
    expr = read_sexpr(text)
    if isinstance(expr, SList) and expr.items and isinstance(expr.items[0], Atom):
        if expr.items[0].value == "ngame":
            return parse_normal(text)
        if expr.items[0].value == "game":
            return parse_extensive(text)
    reader = _Reader(text)
    at = expr.items[0] if isinstance(expr, SList) and expr.items else expr
    raise reader.error("input is neither (game ...) nor (ngame ...)", at, "'game' or 'ngame'")


def _check_names(game: ExtensiveGame) -> None:
    for name in game.players:
        if not NAME_RE.match(name) or name in RESERVED:
            raise GameError(f"player name {name!r} cannot be written in game notation")


def serialize_extensive(game: ExtensiveGame) -> str:
    """Canonical text: one node per line, two spaces of indent per level."""
    diags = validate(game)
    if diags:
        raise GameError(f"cannot serialize invalid game: {diags[0]}")
    _check_names(game)
    lines = [f"(game (players {' '.join(game.players)})"]

    def leaf_text(leaf: Leaf) -> str:
        return "(leaf " + " ".join(str(int(v)) for v in leaf.payoffs) + ")"

    def emit(node: Node, indent: int) -> None:
        pad = "  " * indent
        if isinstance(node, Leaf):
            lines.append(pad + leaf_text(node))
            return
        lines.append(f"{pad}({game.players[node.owner]}")
        for label, child in node.moves:
            if not NAME_RE.match(label):
                raise GameError(f"move label {label!r} cannot be written in game notation")
            if isinstance(child, Leaf):
                lines.append(f"{pad}  ({label} {leaf_text(child)})")
            else:
                lines.append(f"{pad}  ({label}")
                emit(child, indent + 2)
                lines[-1] += ")"
        lines[-1] += ")"

    emit(game.root, 1)
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def serialize_normal(game: NormalFormGame) -> str:
    diags = validate_normal(game)
    if diags:
        raise GameError(f"cannot serialize invalid game: {diags[0]}")
    for name in game.players:
        if not NAME_RE.match(name) or name in RESERVED:
            raise GameError(f"player name {name!r} cannot be written in game notation")
    for label in (*game.row_labels, *game.col_labels):
        if not NAME_RE.match(label):
            raise GameError(f"label {label!r} cannot be written in game notation")
    lines = [f"(ngame (players {' '.join(game.players)})", f"  (cols {' '.join(game.col_labels)})"]
    for label, row in zip(game.row_labels, game.cells):
        cells = " ".join(f"(cell {int(a)} {int(b)})" for a, b in row)
        lines.append(f"  (row {label} {cells})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def path_belongs(game: ExtensiveGame, path: Path) -> bool:
    expected = ROOT
    node = game.root
    for nid, label in path.steps:
        if tuple(nid) != expected or not isinstance(node, Decision) or label not in node.labels:
            return False
        idx = node.labels.index(label)
        expected = expected + (idx,)
        node = node.moves[idx][1]
    if not isinstance(node, Leaf):
        return False
    return game.outcome_range(expected).start == path.outcome


def export_dot(game: ExtensiveGame, highlight: Path | None = None) -> str:
    """Graphviz ``digraph`` of the tree; edges on ``highlight`` are drawn bold red."""
    diags = validate(game)
    if diags:
        raise GameError(f"cannot export invalid game: {diags[0]}")
    marked: set[tuple[int, ...]] = set()
    if highlight is not None:
        if not path_belongs(game, highlight):
            raise GameError("highlight path does not belong to this game")
        marked = {tuple(nid) for nid in highlight.nodes}

    ids = {nid: f"n{i}" for i, nid in enumerate(game.nodes())}
    lines = ["digraph game {", "  node [fontname=Helvetica];", "  edge [fontname=Helvetica];"]
    for nid in game.nodes():
        node = game.node(nid)
        if isinstance(node, Decision):
            label = game.players[node.owner]
            lines.append(f"  {ids[nid]} [shape=ellipse, label={_dot_quote(label)}];")
        else:
            outcome = game.outcome_range(nid).start
            payoffs = ", ".join(str(v) for v in node.payoffs)
            lines.append(f"  {ids[nid]} [shape=box, label={_dot_quote(f'#{outcome}: ({payoffs})')}];")
    for nid in game.nodes():
        node = game.node(nid)
        if not isinstance(node, Decision):
            continue
        on_path = nid in marked
        for i, (label, _) in enumerate(node.moves):
            child = nid + (i,)
            attrs = f"label={_dot_quote(label)}"
            if on_path and highlight is not None and highlight.steps[len(nid)][1] == label:
                attrs += ", color=red, penwidth=2.5"
            lines.append(f"  {ids[nid]} -> {ids[child]} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
