"""Classical solution concepts: backward induction, strategic form, pure Nash, superrationality."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from gtsolve.errors import NotSymmetric, SizeGuardExceeded, WrongPlayerCount
from gtsolve.model import (
    Decision,
    ExtensiveGame,
    NodeId,
    NormalFormGame,
    Path,
    StrategyProfile,
    profile_from_moves,
    require_strict,
    require_valid,
)

DEFAULT_MAX_STRATEGIES = 4096


@dataclass(frozen=True)
class SpeReport:
    outcome: int
    payoffs: tuple[int, ...]
    path: Path
    profile: StrategyProfile
    moves: dict[NodeId, int]  # chosen move index at every decision node, reached or not


def backward_induction(game: ExtensiveGame) -> SpeReport:
    """Subgame perfect equilibrium of a game with strict preferences.

    Every decision node, including the ones off the equilibrium path, gets the
    move leading to the subtree whose induced outcome its owner likes best.
    """
    require_strict(game)
    best: dict[NodeId, int] = {}
    moves: dict[NodeId, int] = {}
    # reversed preorder visits children before parents
    for nid in reversed(game.nodes()):
        node = game.node(nid)
        if not isinstance(node, Decision):
            best[nid] = game.outcome_range(nid).start
            continue
        induced = [best[nid + (i,)] for i in range(len(node.moves))]
        choice = max(range(len(induced)), key=lambda i: game.payoffs(induced[i])[node.owner])
        moves[nid] = choice
        best[nid] = induced[choice]
    profile = profile_from_moves(game, moves)
    path = game.replay(profile)
    return SpeReport(path.outcome, game.payoffs(path.outcome), path, profile, moves)


@dataclass(frozen=True)
class StrategyLegend:
    """What a strategy label stands for: one ``(node id, move label)`` per decision node."""

    label: str
    assignments: tuple[tuple[NodeId, str], ...]


@dataclass(frozen=True)
class Conversion:
    game: NormalFormGame
    rows: tuple[StrategyLegend, ...]
    cols: tuple[StrategyLegend, ...]
    row_choices: tuple[tuple[int, ...], ...]
    col_choices: tuple[tuple[int, ...], ...]

    def cell_of(self, profile: StrategyProfile) -> tuple[int, int]:
        """Matrix coordinates of a two-player strategy profile."""
        return self.row_choices.index(profile.choices[0]), self.col_choices.index(profile.choices[1])


def strategy_count(game: ExtensiveGame, player: int) -> int:
    return math.prod(len(game.node(nid).moves) for nid in game.decision_nodes(player))


def _legends(game: ExtensiveGame, nodes: tuple[NodeId, ...], choices) -> tuple[StrategyLegend, ...]:
    assignments = [
        tuple((nid, game.node(nid).moves[m][0]) for nid, m in zip(nodes, combo)) for combo in choices
    ]
    labels = ["_".join(lbl for _, lbl in a) or "none" for a in assignments]
    if len(set(labels)) != len(labels):
        labels = [f"s{i}" for i in range(len(labels))]
    return tuple(StrategyLegend(lbl, a) for lbl, a in zip(labels, assignments))


def to_normal_form(game: ExtensiveGame, max_strategies: int | None = DEFAULT_MAX_STRATEGIES) -> Conversion:
    """Strategic form of a two-player tree.

    Strategies enumerate the cartesian product of moves over the player's
    decision nodes in canonical order (first node varies slowest).
    """
    require_valid(game)
    if game.n_players != 2:
        raise WrongPlayerCount(f"strategic form needs exactly 2 players, game has {game.n_players}")
    for player in (0, 1):
        count = strategy_count(game, player)
        if max_strategies is not None and count > max_strategies:
            raise SizeGuardExceeded(
                f"player {game.players[player]} has {count} strategies (limit {max_strategies})"
            )
    nodes = [game.decision_nodes(p) for p in (0, 1)]
    choices = [
        tuple(itertools.product(*(range(len(game.node(nid).moves)) for nid in nodes[p]))) for p in (0, 1)
    ]
    slot = {nid: k for p in (0, 1) for k, nid in enumerate(nodes[p])}

    def play(row: tuple[int, ...], col: tuple[int, ...]) -> tuple[int, ...]:
        nid: NodeId = ()
        node = game.root
        while isinstance(node, Decision):
            move = (row, col)[node.owner][slot[nid]]
            nid = nid + (move,)
            node = node.moves[move][1]
        return node.payoffs

    cells = [tuple(play(row, col) for col in choices[1]) for row in choices[0]]
    rows = _legends(game, nodes[0], choices[0])
    cols = _legends(game, nodes[1], choices[1])
    nf = NormalFormGame(
        game.players,
        tuple(s.label for s in rows),
        tuple(s.label for s in cols),
        tuple(cells),
    )
    return Conversion(nf, rows, cols, choices[0], choices[1])


@dataclass(frozen=True, order=True)
class NashCell:
    row: int
    col: int
    payoffs: tuple[int, int]


def pure_nash(g: NormalFormGame) -> list[NashCell]:
    """All cells where both players weakly best-respond, in row-major order."""
    a, b = g.payoff_arrays()
    stable = (a == a.max(axis=0, keepdims=True)) & (b == b.max(axis=1, keepdims=True))
    return [NashCell(int(r), int(c), g.cells[r][c]) for r, c in zip(*np.nonzero(stable))]


@dataclass(frozen=True)
class SuperrationalResult:
    cell: NashCell
    tie: bool  # several diagonal cells share the best payoff; lowest index taken


def check_symmetric(g: NormalFormGame) -> None:
    n_rows, n_cols = g.shape
    if n_rows != n_cols:
        raise NotSymmetric(0, 0, f"matrix is {n_rows}x{n_cols}, not square")
    for r in range(n_rows):
        if g.row_labels[r] != g.col_labels[r]:
            raise NotSymmetric(r, r, f"row label {g.row_labels[r]!r} differs from column label {g.col_labels[r]!r}")
    for r in range(n_rows):
        for c in range(n_cols):
            if g.cells[r][c][1] != g.cells[c][r][0]:
                raise NotSymmetric(r, c, "column payoff differs from the mirrored row payoff")


def superrational(g: NormalFormGame) -> SuperrationalResult:
    """Best diagonal cell of a symmetric game: both players reason to the same choice."""
    check_symmetric(g)
    diagonal = [g.cells[k][k][0] for k in range(g.shape[0])]
    top = max(diagonal)
    k = diagonal.index(top)
    return SuperrationalResult(NashCell(k, k, g.cells[k][k]), diagonal.count(top) > 1)
