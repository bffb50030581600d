"""Deliberately naive re-derivation of the Perfect Prediction Equilibrium.

Used only for differential testing against :mod:`gtsolve.ppe`.  It reads the
raw tree and re-checks the elimination rule from its definition on every
pass, with no precomputed indices or shared helpers.
"""

from __future__ import annotations

from gtsolve.errors import ScaleExceeded, StrictnessRequired
from gtsolve.model import Decision, ExtensiveGame, Leaf

MAX_OUTCOMES = 64


def ppe_oracle(game: ExtensiveGame, max_outcomes: int = MAX_OUTCOMES) -> int:
    leaves: list[tuple[tuple[int, ...], list[int]]] = []
    stack = [(game.root, [])]
    while stack:
        node, address = stack.pop()
        if isinstance(node, Leaf):
            leaves.append((node.payoffs, address))
        else:
            for i in reversed(range(len(node.moves))):
                stack.append((node.moves[i][1], address + [i]))
    if len(leaves) > max_outcomes:
        raise ScaleExceeded(f"oracle handles at most {max_outcomes} outcomes, game has {len(leaves)}")
    for player in range(len(game.players)):
        for a in range(len(leaves)):
            for b in range(a + 1, len(leaves)):
                if leaves[a][0][player] == leaves[b][0][player]:
                    raise StrictnessRequired([f"player {player} ties outcomes {a} and {b}"])

    def goes_through(o: int, address: list[int], move: int) -> bool:
        full = leaves[o][1]
        return len(full) > len(address) and full[: len(address)] == address and full[len(address)] == move

    worklist: list[tuple[object, list[int], list[int]]] = [(game.root, [], list(range(len(leaves))))]
    while worklist:
        node, address, candidates = worklist.pop()
        if isinstance(node, Leaf):
            assert candidates == [leaves.index((node.payoffs, address))]
            return candidates[0]
        assert isinstance(node, Decision)
        owner = node.owner
        removed = True
        while removed:
            removed = False
            for o in sorted(candidates):
                own_move = next(m for m in range(len(node.moves)) if goes_through(o, address, m))
                for m in range(len(node.moves)):
                    if m == own_move:
                        continue
                    rivals = [x for x in candidates if goes_through(x, address, m)]
                    if rivals and all(leaves[x][0][owner] > leaves[o][0][owner] for x in rivals):
                        candidates.remove(o)
                        removed = True
                        break
                if removed:
                    break
        favourite = max(candidates, key=lambda x: leaves[x][0][owner])
        move = next(m for m in range(len(node.moves)) if goes_through(favourite, address, m))
        worklist.append(
            (
                node.moves[move][1],
                address + [move],
                [x for x in candidates if goes_through(x, address, move)],
            )
        )
    raise AssertionError("worklist drained without reaching a leaf")
