"""Immutable data model for extensive-form and normal-form games.

Nodes are addressed by their *node id*: the tuple of move indices leading
from the root (the root is ``()``).  Leaves are numbered depth-first, left to
right; that number is the outcome id used everywhere else in the package.
Because of that numbering, the outcomes below any node form a contiguous
``range``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

import numpy as np

from gtsolve.errors import InvalidGame, StrictnessRequired

NodeId = tuple[int, ...]
ROOT: NodeId = ()


@dataclass(frozen=True)
class Leaf:
    payoffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "payoffs", tuple(self.payoffs))


@dataclass(frozen=True)
class Decision:
    owner: int
    moves: tuple[tuple[str, "Node"], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "moves", tuple((lbl, child) for lbl, child in self.moves))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.moves)

    @property
    def children(self) -> tuple["Node", ...]:
        return tuple(child for _, child in self.moves)


Node = Union[Leaf, Decision]


@dataclass(frozen=True)
class Path:
    """Root-to-leaf walk: ``(node id, move label)`` pairs plus the outcome reached."""

    steps: tuple[tuple[NodeId, str], ...]
    outcome: int

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for _, lbl in self.steps)

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(nid for nid, _ in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class StrategyProfile:
    """One pure strategy per player.

    ``choices[p][k]`` is the move index player ``p`` picks at their ``k``-th
    decision node, in the game's canonical (preorder) node order.
    """

    choices: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "choices", tuple(tuple(c) for c in self.choices))


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    node: NodeId
    message: str
    where: str = "/"

    def __str__(self) -> str:
        return f"{self.kind} at {self.where}: {self.message}"


@dataclass(frozen=True)
class StrictnessViolation:
    player: int
    first: int
    second: int
    payoff: int

    def __str__(self) -> str:
        return (
            f"player {self.player} gets {self.payoff} at both outcome "
            f"{self.first} and outcome {self.second}"
        )


@dataclass(frozen=True)
class Outcome:
    id: int
    payoffs: tuple[int, ...]
    path: Path


@dataclass(frozen=True)
class _Index:
    nodes: dict[NodeId, Node]
    preorder: tuple[NodeId, ...]
    leaves: tuple[NodeId, ...]
    spans: dict[NodeId, tuple[int, int]]


def _build_index(root: Node) -> _Index:
    nodes: dict[NodeId, Node] = {}
    preorder: list[NodeId] = []
    leaves: list[NodeId] = []
    spans: dict[NodeId, tuple[int, int]] = {}
    # explicit stack: (node id, node, entering?)
    stack: list[tuple[NodeId, Node, bool]] = [(ROOT, root, True)]
    starts: dict[NodeId, int] = {}
    while stack:
        nid, node, entering = stack.pop()
        if entering:
            nodes[nid] = node
            preorder.append(nid)
            starts[nid] = len(leaves)
            if isinstance(node, Decision):
                stack.append((nid, node, False))
                for i in reversed(range(len(node.moves))):
                    stack.append((nid + (i,), node.moves[i][1], True))
            else:
                leaves.append(nid)
                spans[nid] = (starts[nid], len(leaves))
        else:
            spans[nid] = (starts[nid], len(leaves))
    return _Index(nodes, tuple(preorder), tuple(leaves), spans)


@dataclass(frozen=True)
class ExtensiveGame:
    """A finite perfect-information game tree with ordinal payoffs at the leaves."""

    players: tuple[str, ...]
    root: Node

    def __post_init__(self) -> None:
        object.__setattr__(self, "players", tuple(self.players))

    @cached_property
    def _index(self) -> _Index:
        return _build_index(self.root)

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_outcomes(self) -> int:
        return len(self._index.leaves)

    def node(self, nid: NodeId) -> Node:
        try:
            return self._index.nodes[tuple(nid)]
        except KeyError:
            raise KeyError(f"no node {node_name_from_id(nid)} in game") from None

    def has_node(self, nid: NodeId) -> bool:
        return tuple(nid) in self._index.nodes

    def nodes(self) -> tuple[NodeId, ...]:
        """All node ids in preorder."""
        return self._index.preorder

    def decision_nodes(self, player: int | None = None) -> tuple[NodeId, ...]:
        """Internal nodes in canonical preorder, optionally only those owned by ``player``."""
        nodes = self._index.nodes
        return tuple(
            nid
            for nid in self._index.preorder
            if isinstance(nodes[nid], Decision) and (player is None or nodes[nid].owner == player)
        )

    def leaf_node(self, outcome: int) -> NodeId:
        return self._index.leaves[outcome]

    def outcome_range(self, nid: NodeId) -> range:
        lo, hi = self._index.spans[tuple(nid)]
        return range(lo, hi)

    def payoffs(self, outcome: int) -> tuple[int, ...]:
        leaf = self._index.nodes[self._index.leaves[outcome]]
        return leaf.payoffs

    @cached_property
    def payoff_table(self) -> tuple[tuple[int, ...], ...]:
        """Row ``o`` holds the payoff vector of outcome ``o``."""
        return tuple(self.payoffs(o) for o in range(self.n_outcomes))

    def child_containing(self, nid: NodeId, outcome: int) -> int:
        """Index of the move at ``nid`` whose subtree holds ``outcome``."""
        leaf = self._index.leaves[outcome]
        nid = tuple(nid)
        if leaf[: len(nid)] != nid or len(leaf) == len(nid):
            raise ValueError(f"outcome {outcome} is not strictly below {self.node_name(nid)}")
        return leaf[len(nid)]

    def node_name(self, nid: NodeId) -> str:
        """Human-readable address made of move labels, e.g. ``/give/pay``."""
        labels = []
        node = self.root
        for i in nid:
            lbl, node = node.moves[i]
            labels.append(lbl)
        return "/" + "/".join(labels)

    def path_to(self, outcome: int) -> Path:
        leaf = self._index.leaves[outcome]
        steps = []
        node = self.root
        for depth, i in enumerate(leaf):
            lbl, nxt = node.moves[i]
            steps.append((leaf[:depth], lbl))
            node = nxt
        return Path(tuple(steps), outcome)

    def move_to(self, nid: NodeId, move: int) -> NodeId:
        return tuple(nid) + (move,)

    def replay(self, profile: StrategyProfile) -> Path:
        """Follow ``profile`` from the root to a leaf."""
        choice_at = profile_lookup(self, profile)
        nid: NodeId = ROOT
        node = self.root
        while isinstance(node, Decision):
            nid = nid + (choice_at[nid],)
            node = node.moves[nid[-1]][1]
        return self.path_to(self._leaf_outcome(nid))

    def _leaf_outcome(self, nid: NodeId) -> int:
        return self._index.spans[nid][0]


def node_name_from_id(nid: NodeId) -> str:
    return "/" + "/".join(str(i) for i in nid)


def profile_lookup(game: ExtensiveGame, profile: StrategyProfile) -> dict[NodeId, int]:
    """Flatten a profile into ``{node id: move index}``, checking its shape."""
    if len(profile.choices) != game.n_players:
        raise ValueError(
            f"profile has {len(profile.choices)} strategies for {game.n_players} players"
        )
    lookup = {}
    for player, choices in enumerate(profile.choices):
        nodes = game.decision_nodes(player)
        if len(choices) != len(nodes):
            raise ValueError(
                f"player {player} owns {len(nodes)} decision nodes, strategy covers {len(choices)}"
            )
        for nid, move in zip(nodes, choices):
            n_moves = len(game.node(nid).moves)
            if not 0 <= move < n_moves:
                raise ValueError(f"move {move} out of range at {game.node_name(nid)}")
            lookup[nid] = move
    return lookup


def profile_from_moves(game: ExtensiveGame, moves: dict[NodeId, int]) -> StrategyProfile:
    return StrategyProfile(
        tuple(tuple(moves[nid] for nid in game.decision_nodes(p)) for p in range(game.n_players))
    )


def _walk(root: Node) -> Iterator[tuple[NodeId, list[str], Node]]:
    stack: list[tuple[NodeId, list[str], Node]] = [(ROOT, [], root)]
    while stack:
        nid, labels, node = stack.pop()
        yield nid, labels, node
        if isinstance(node, Decision):
            for i in reversed(range(len(node.moves))):
                lbl, child = node.moves[i]
                stack.append((nid + (i,), labels + [str(lbl)], child))


def validate(game: ExtensiveGame) -> list[Diagnostic]:
    """Return one diagnostic per structural problem; an empty list means valid."""
    diags: list[Diagnostic] = []

    def report(kind: str, nid: NodeId, labels: list[str], message: str) -> None:
        diags.append(Diagnostic(kind, nid, message, "/" + "/".join(labels)))

    n = len(game.players)
    if n == 0:
        report("no players", ROOT, [], "game declares no players")
    seen: set[str] = set()
    for name in game.players:
        if not isinstance(name, str) or not name:
            report("bad player name", ROOT, [], f"player name {name!r} is not a non-empty string")
        elif name in seen:
            report("duplicate player", ROOT, [], f"player {name!r} declared twice")
        seen.add(name)

    for nid, labels, node in _walk(game.root):
        if isinstance(node, Leaf):
            if len(node.payoffs) != n:
                report(
                    "payoff arity", nid, labels,
                    f"leaf has {len(node.payoffs)} payoffs, game has {n} players",
                )
            for v in node.payoffs:
                if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                    report("payoff type", nid, labels, f"payoff {v!r} is not an integer")
        elif isinstance(node, Decision):
            owner = node.owner
            if not isinstance(owner, (int, np.integer)) or isinstance(owner, bool) or not 0 <= owner < n:
                report("unknown player", nid, labels, f"owner index {owner!r} with {n} players")
            if not node.moves:
                report("no moves", nid, labels, "decision node has no moves")
            move_labels: set[str] = set()
            for lbl in node.labels:
                if not isinstance(lbl, str) or not lbl:
                    report("empty label", nid, labels, "move label must be a non-empty string")
                elif lbl in move_labels:
                    report("duplicate move label", nid, labels, f"label {lbl!r} repeated")
                move_labels.add(lbl)
        else:
            report("bad node", nid, labels, f"unexpected node type {type(node).__name__}")
    return diags


def require_valid(game: ExtensiveGame) -> None:
    diags = validate(game)
    if diags:
        raise InvalidGame(diags)


def check_strict_preferences(game: ExtensiveGame) -> list[StrictnessViolation]:
    """Report every pair of outcomes that some player ranks equally.

    Within a group of equal payoffs, each later outcome is paired with the
    first one of the group.
    """
    violations = []
    table = game.payoff_table
    for player in range(game.n_players):
        first_seen: dict[int, int] = {}
        for outcome, payoffs in enumerate(table):
            value = payoffs[player]
            if value in first_seen:
                violations.append(StrictnessViolation(player, first_seen[value], outcome, value))
            else:
                first_seen[value] = outcome
    return violations


def require_strict(game: ExtensiveGame) -> None:
    require_valid(game)
    violations = check_strict_preferences(game)
    if violations:
        raise StrictnessRequired(violations)


def outcomes(game: ExtensiveGame) -> list[Outcome]:
    return [Outcome(o, game.payoffs(o), game.path_to(o)) for o in range(game.n_outcomes)]


def pareto_optimal_outcomes(game: ExtensiveGame) -> frozenset[int]:
    """Outcomes not weakly dominated (>= everywhere, > somewhere) by any other outcome."""
    table = np.asarray(game.payoff_table, dtype=np.int64)
    if table.size == 0:
        return frozenset(range(game.n_outcomes))
    # ge[q, o]: q is at least as good as o for every player
    ge = (table[:, None, :] >= table[None, :, :]).all(axis=2)
    gt = (table[:, None, :] > table[None, :, :]).any(axis=2)
    dominated = (ge & gt).any(axis=0)
    return frozenset(int(o) for o in np.flatnonzero(~dominated))


def decision_counts(game: ExtensiveGame) -> dict[int, list[int]]:
    """Branching factors of each player's decision nodes, in canonical order."""
    counts: dict[int, list[int]] = defaultdict(list)
    for nid in game.decision_nodes():
        node = game.node(nid)
        counts[node.owner].append(len(node.moves))
    return dict(counts)


@dataclass(frozen=True)
class NormalFormGame:
    """Two-player payoff matrix; ``cells[r][c]`` is ``(row payoff, column payoff)``."""

    players: tuple[str, str]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[tuple[int, int], ...], ...]
    _arrays: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(
            self, "cells", tuple(tuple(tuple(cell) for cell in row) for row in self.cells)
        )
        diags = validate_normal(self)
        if diags:
            raise InvalidGame(diags)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def payoff_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Row-player and column-player payoff matrices."""
        if not self._arrays:
            full = np.asarray(self.cells, dtype=np.int64)
            object.__setattr__(self, "_arrays", (full[:, :, 0], full[:, :, 1]))
        return self._arrays


def validate_normal(g: NormalFormGame) -> list[Diagnostic]:
    diags = []
    if len(g.players) != 2:
        diags.append(Diagnostic("player count", ROOT, f"normal form needs 2 players, got {len(g.players)}"))
    if not g.row_labels:
        diags.append(Diagnostic("empty matrix", ROOT, "no rows"))
    if not g.col_labels:
        diags.append(Diagnostic("empty matrix", ROOT, "no columns"))
    for axis, labels in (("row", g.row_labels), ("column", g.col_labels)):
        if len(set(labels)) != len(labels):
            diags.append(Diagnostic("duplicate label", ROOT, f"{axis} labels are not unique"))
    if len(g.cells) != len(g.row_labels):
        diags.append(
            Diagnostic("ragged row", ROOT, f"{len(g.cells)} rows of cells for {len(g.row_labels)} row labels")
        )
    for r, row in enumerate(g.cells):
        if len(row) != len(g.col_labels):
            diags.append(
                Diagnostic("ragged row", (r,), f"row {r} has {len(row)} cells, expected {len(g.col_labels)}")
            )
        for cell in row:
            if len(cell) != 2 or not all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in cell):
                diags.append(Diagnostic("payoff type", (r,), f"cell {cell!r} is not a pair of integers"))
    return diags
