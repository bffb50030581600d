from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtsolve import builtin
from gtsolve.corpus import GeneratorConfig, random_game
from gtsolve.errors import ScaleExceeded, StrictnessRequired
from gtsolve.model import Decision, ExtensiveGame, Leaf, pareto_optimal_outcomes
from gtsolve.oracle import ppe_oracle
from gtsolve.ppe import compare, ppe, preemption_fixpoint, replay_trace

from conftest import EXTENSIVE_CORPUS, monotone_relabel
from test_model import relabel

seeds = st.integers(min_value=0, max_value=2**64 - 1)
games = st.builds(
    lambda seed, depth, players: random_game(GeneratorConfig(seed, depth, (2, 3), players)),
    seeds,
    st.integers(1, 4),
    st.integers(2, 3),
)


class TestPreemptionFixpoint:
    def test_exchange_root(self, exchange):
        # ids: 0 = give/pay (2,1), 1 = give/keep (0,2), 2 = withhold (1,0)
        survivors, steps = preemption_fixpoint(exchange, (), {0, 1, 2})
        assert survivors == {0}
        assert [(s.eliminated, s.witness, s.guaranteed) for s in steps] == [
            (1, "withhold", 1),  # withholding guarantees Peter 1 > 0
            (2, "give", 2),  # with keep gone, giving guarantees 2 > 1
        ]

    def test_singleton_unchanged(self, exchange):
        assert preemption_fixpoint(exchange, (), {2}) == (frozenset({2}), ())
        assert preemption_fixpoint(exchange, (0,), {1}) == (frozenset({1}), ())

    def test_centipede_root(self, centipede):
        survivors, steps = preemption_fixpoint(centipede, (), {0, 1, 2})
        assert survivors == {2}
        assert [s.eliminated for s in steps] == [1, 0]

    def test_empty_alternative_offers_no_deviation(self, exchange):
        # At Mary's node with keep no longer possible, pay has no rival
        assert preemption_fixpoint(exchange, (0,), {0}) == (frozenset({0}), ())

    @pytest.mark.parametrize(
        "node, possible, message",
        [((0, 0), {0}, "leaf"), ((), set(), "empty"), ((0,), {0, 2}, "outside")],
    )
    def test_preconditions(self, exchange, node, possible, message):
        with pytest.raises(ValueError, match=message):
            preemption_fixpoint(exchange, node, possible)


class TestPpe:
    def test_exchange(self, exchange):
        report = ppe(exchange)
        assert report.outcome == 0
        assert report.path.labels == ("give", "pay")
        assert report.payoffs == (2, 1)

    def test_newcomb_one_box(self, newcomb):
        report = ppe(newcomb)
        assert report.path.labels == ("fill", "one")
        assert report.payoffs[1] == 2  # the agent's $1,000,000 rank

    def test_centipede(self, centipede):
        assert ppe(centipede).path.labels == ("pass", "pass")

    def test_single_leaf(self):
        report = ppe(ExtensiveGame(("A",), Leaf((4,))))
        assert report.outcome == 0 and report.trace == () and report.path.steps == ()

    def test_ties_rejected(self):
        game = ExtensiveGame(("A", "B"), Decision(0, (("x", Leaf((1, 2))), ("y", Leaf((0, 2))))))
        with pytest.raises(StrictnessRequired):
            ppe(game)

    def test_stages_follow_path(self, newcomb):
        report = ppe(newcomb)
        assert [s.node for s in report.stages] == list(report.path.nodes)
        assert report.stages[0].entering == {0, 1, 2, 3}
        assert report.stages[0].surviving == {0}
        assert report.stages[1].entering == {0}


class TestOracle:
    def test_exchange(self, exchange):
        assert ppe_oracle(exchange) == 0

    def test_newcomb(self, newcomb):
        assert newcomb.path_to(ppe_oracle(newcomb)).labels == ("fill", "one")

    @pytest.mark.parametrize("name", EXTENSIVE_CORPUS)
    def test_corpus_agreement(self, name):
        game = builtin(name)
        assert ppe_oracle(game) == ppe(game).outcome

    def test_scale_bound(self):
        game = random_game(GeneratorConfig(9, 7, (2, 2), 2))
        assert game.n_outcomes == 128
        with pytest.raises(ScaleExceeded):
            ppe_oracle(game)

    def test_ties(self):
        game = ExtensiveGame(("A",), Decision(0, (("x", Leaf((1,))), ("y", Leaf((1,))))))
        with pytest.raises(StrictnessRequired):
            ppe_oracle(game)

    @given(games)
    @settings(max_examples=300, deadline=None)
    def test_agreement(self, game):
        if game.n_outcomes <= 64:
            assert ppe_oracle(game) == ppe(game).outcome


class TestCompare:
    def test_exchange(self, exchange):
        cmp = compare(exchange)
        assert (cmp.spe.payoffs, cmp.ppe.payoffs) == ((1, 0), (2, 1))
        assert cmp.ppe_dominates_spe and not cmp.spe_pareto_optimal and cmp.ppe_pareto_optimal
        assert cmp.verdict == "PPE Pareto-dominates SPE"
        assert cmp.per_player == ("higher", "higher")

    def test_newcomb_agent_better(self, newcomb):
        cmp = compare(newcomb)
        assert cmp.per_player[1] == "higher"

    def test_single_leaf(self):
        cmp = compare(ExtensiveGame(("A", "B"), Leaf((1, 1))))
        assert cmp.identical and not cmp.ppe_dominates_spe
        assert cmp.verdict == "identical outcomes"
        assert cmp.per_player == ("equal", "equal")

    def test_fig3_shape_incomparable(self, fig3):
        cmp = compare(fig3)
        assert not cmp.identical and cmp.verdict == "no Pareto dominance"


@given(games)
@settings(max_examples=300, deadline=None)
def test_pareto_optimal(game):
    assert ppe(game).outcome in pareto_optimal_outcomes(game)


@given(games)
@settings(max_examples=200, deadline=None)
def test_survival_lemma_and_step_shape(game):
    report = ppe(game)
    table = game.payoff_table
    for stage in report.stages:
        owner = game.node(stage.node).owner
        favourite = max(stage.entering, key=lambda o: table[o][owner])
        assert favourite in stage.surviving
        assert stage.surviving
        assert stage.target == max(stage.surviving, key=lambda o: table[o][owner])
    for step in report.trace:
        assert step.eliminated in game.outcome_range(step.node)
        own = game.node(step.node).moves[game.child_containing(step.node, step.eliminated)][0]
        assert step.witness != own
        assert step.guaranteed > step.eliminated_payoff


@given(games)
@settings(max_examples=100, deadline=None)
def test_trace_replays(game):
    report = ppe(game)
    assert replay_trace(report) == [s.surviving for s in report.stages]


@given(games, st.integers(0, 2**32))
@settings(max_examples=200, deadline=None)
def test_scan_order_does_not_matter(game, shuffle_seed):
    rng = random.Random(shuffle_seed)
    for stage in ppe(game).stages:
        shuffled, _ = preemption_fixpoint(game, stage.node, stage.entering, scan_rng=rng)
        assert shuffled == stage.surviving


@given(games)
@settings(max_examples=50, deadline=None)
def test_deterministic(game):
    assert ppe(game) == ppe(game)
    assert repr(ppe(game)) == repr(ppe(game))


@given(games, st.integers(0, 2**32))
@settings(max_examples=150, deadline=None)
def test_ordinal_invariance(game, transform_seed):
    rng = random.Random(transform_seed)
    maps = [monotone_relabel([p[i] for p in game.payoff_table], rng) for i in range(game.n_players)]
    assert ppe(relabel(game, maps)).outcome == ppe(game).outcome
