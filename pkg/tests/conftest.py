from __future__ import annotations

import random

import pytest

from gtsolve import builtin
from gtsolve.corpus import GeneratorConfig, random_game, seed_stream

EXTENSIVE_CORPUS = ("exchange", "newcomb", "centipede_3", "fig3_shape")
NORMAL_CORPUS = ("pd", "fig1_shape")

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, text = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {text}")


def mixed_games(seed: int, count: int, depth=(1, 5), branching=(2, 3), players=(2, 3)):
    """Seeded random strict games with depth and player count varying per game."""
    for game_seed in seed_stream(seed, count):
        rng = random.Random(game_seed)
        cfg = GeneratorConfig(
            game_seed,
            rng.randint(*depth),
            branching,
            rng.randint(*players),
        )
        yield random_game(cfg)


def monotone_relabel(values, rng: random.Random) -> dict[int, int]:
    """A random strictly increasing map defined on ``values``."""
    mapping = {}
    current = rng.randint(-50, 50)
    for v in sorted(set(values)):
        current += rng.randint(1, 9)
        mapping[v] = current
    return mapping


@pytest.fixture
def exchange():
    return builtin("exchange")


@pytest.fixture
def newcomb():
    return builtin("newcomb")


@pytest.fixture
def centipede():
    return builtin("centipede_3")


@pytest.fixture
def fig3():
    return builtin("fig3_shape")


@pytest.fixture
def pd():
    return builtin("pd")
