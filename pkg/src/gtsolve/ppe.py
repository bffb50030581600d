"""Perfect Prediction Equilibrium by temporally anchored elimination of outcomes.

The solver walks down from the root.  At each node it keeps a *possible set*
of outcomes that are still conceivable.  An outcome is eliminated at a node
when the node's owner, predicting it, could deviate to another child all of
whose still-possible outcomes are strictly better for them.  The prediction
would then refute itself.  Only the owner of the current node is consulted.
Later players' incentives are applied once play has moved below them.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass

from gtsolve.errors import SurvivalViolation
from gtsolve.model import (
    Decision,
    ExtensiveGame,
    NodeId,
    Path,
    pareto_optimal_outcomes,
    require_strict,
)
from gtsolve.nash import SpeReport, backward_induction


@dataclass(frozen=True)
class EliminationStep:
    node: NodeId
    eliminated: int
    eliminated_payoff: int  # owner's payoff at the eliminated outcome
    witness: str  # label of the alternate move that makes the deviation compelling
    guaranteed: int  # owner's worst still-possible payoff behind the witness move


@dataclass(frozen=True)
class PpeStage:
    node: NodeId
    entering: frozenset[int]
    surviving: frozenset[int]
    target: int  # owner's favourite surviving outcome
    move: int


@dataclass(frozen=True)
class PpeReport:
    outcome: int
    payoffs: tuple[int, ...]
    path: Path
    trace: tuple[EliminationStep, ...]
    stages: tuple[PpeStage, ...]


def preemption_fixpoint(
    game: ExtensiveGame,
    node: NodeId,
    possible,
    *,
    scan_rng: random.Random | None = None,
) -> tuple[frozenset[int], tuple[EliminationStep, ...]]:
    """Eliminate outcomes at ``node`` until none is preempted by its owner.

    Candidates are scanned in ascending outcome id and the scan restarts after
    every removal.  ``scan_rng`` shuffles the scan order instead; it exists so
    tests can check that the fixpoint does not depend on the order.
    """
    node = tuple(node)
    decision = game.node(node)
    if not isinstance(decision, Decision):
        raise ValueError(f"{game.node_name(node)} is a leaf")
    alive = set(possible)
    if not alive:
        raise ValueError("possible set is empty")
    below = game.outcome_range(node)
    if not all(o in below for o in alive):
        raise ValueError(f"possible set reaches outside the subtree at {game.node_name(node)}")

    owner = decision.owner
    table = game.payoff_table
    starts = [game.outcome_range(node + (i,)).start for i in range(len(decision.moves))]

    value = {o: table[o][owner] for o in alive}
    child = {o: bisect.bisect_right(starts, o) - 1 for o in alive}
    members: list[list[int]] = [[] for _ in starts]
    for o in alive:
        members[child[o]].append(o)
    # owner's worst still-possible payoff behind each move (None once emptied)
    worst = [min((value[o] for o in m), default=None) for m in members]
    order = sorted(alive)

    steps: list[EliminationStep] = []
    while True:
        # best guarantee available by leaving child k
        best_elsewhere = [
            max((w for j, w in enumerate(worst) if j != k and w is not None), default=None)
            for k in range(len(starts))
        ]
        if scan_rng is not None:
            scan_rng.shuffle(order)
        for pos, o in enumerate(order):
            mine = child[o]
            bar = best_elsewhere[mine]
            if bar is not None and bar > value[o]:
                break
        else:
            break
        del order[pos]
        witness = next(
            k for k, w in enumerate(worst) if k != mine and w is not None and w > value[o]
        )
        steps.append(EliminationStep(node, o, value[o], decision.moves[witness][0], worst[witness]))
        members[mine].remove(o)
        worst[mine] = min((value[x] for x in members[mine]), default=None)
        if not order:
            raise SurvivalViolation(f"possible set emptied at {game.node_name(node)}")
    return frozenset(order), tuple(steps)


def ppe(game: ExtensiveGame) -> PpeReport:
    """Perfect Prediction Equilibrium of a game with strict preferences."""
    require_strict(game)
    table = game.payoff_table
    possible = frozenset(range(game.n_outcomes))
    nid: NodeId = ()
    node = game.root
    trace: list[EliminationStep] = []
    stages: list[PpeStage] = []
    while isinstance(node, Decision):
        surviving, steps = preemption_fixpoint(game, nid, possible)
        target = max(surviving, key=lambda o: table[o][node.owner])
        move = game.child_containing(nid, target)
        stages.append(PpeStage(nid, possible, surviving, target, move))
        trace.extend(steps)
        nid = nid + (move,)
        node = node.moves[move][1]
        below = game.outcome_range(nid)
        possible = frozenset(o for o in surviving if o in below)
    outcome = game.outcome_range(nid).start
    return PpeReport(outcome, table[outcome], game.path_to(outcome), tuple(trace), tuple(stages))


def replay_trace(report: PpeReport) -> list[frozenset[int]]:
    """Apply each stage's elimination steps to its entering set."""
    result = []
    for stage in report.stages:
        alive = set(stage.entering)
        for step in report.trace:
            if step.node == stage.node:
                alive.remove(step.eliminated)
        result.append(frozenset(alive))
    return result


@dataclass(frozen=True)
class Comparison:
    spe: SpeReport
    ppe: PpeReport
    spe_pareto_optimal: bool
    ppe_pareto_optimal: bool
    per_player: tuple[str, ...]  # PPE payoff relative to SPE: "higher", "lower" or "equal"
    ppe_dominates_spe: bool
    spe_dominates_ppe: bool

    @property
    def identical(self) -> bool:
        return self.spe.outcome == self.ppe.outcome

    @property
    def verdict(self) -> str:
        if self.identical:
            return "identical outcomes"
        if self.ppe_dominates_spe:
            return "PPE Pareto-dominates SPE"
        if self.spe_dominates_ppe:
            return "SPE Pareto-dominates PPE"
        return "no Pareto dominance"


def _dominates(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def compare(game: ExtensiveGame) -> Comparison:
    spe_report = backward_induction(game)
    ppe_report = ppe(game)
    pareto = pareto_optimal_outcomes(game)
    order = tuple(
        "higher" if p > s else "lower" if p < s else "equal"
        for p, s in zip(ppe_report.payoffs, spe_report.payoffs)
    )
    return Comparison(
        spe_report,
        ppe_report,
        spe_report.outcome in pareto,
        ppe_report.outcome in pareto,
        order,
        _dominates(ppe_report.payoffs, spe_report.payoffs),
        _dominates(spe_report.payoffs, ppe_report.payoffs),
    )
