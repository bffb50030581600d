"""Built-in example games and a seeded generator of random strict games."""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Union

from gtsolve.errors import ConfigError, UnknownName
from gtsolve.model import Decision, ExtensiveGame, Leaf, NormalFormGame
from gtsolve.text import parse_any

BUILTIN_NAMES = ("exchange", "newcomb", "centipede_3", "fig3_shape", "pd", "fig1_shape")
LEAF_CAP = 4096


def source(name: str) -> str:
    """Text of a built-in game as shipped in the ``corpus`` directory."""
    if name not in BUILTIN_NAMES:
        raise UnknownName(f"no built-in game {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    return resources.files("gtsolve").joinpath("corpus", f"{name}.gt").read_text(encoding="utf-8")


def builtin(name: str) -> Union[ExtensiveGame, NormalFormGame]:
    return parse_any(source(name))


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    depth: int = 3
    branching: tuple[int, int] = (2, 3)
    players: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "branching", tuple(self.branching))
        lo, hi = self.branching
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        if lo < 2 or hi < lo:
            raise ConfigError(f"branching range must satisfy 2 <= min <= max, got {lo},{hi}")
        if self.players < 2:
            raise ConfigError(f"need at least 2 players, got {self.players}")
        if hi**self.depth > LEAF_CAP:
            raise ConfigError(
                f"cap exceeded: up to {hi}^{self.depth} = {hi**self.depth} leaves, cap is {LEAF_CAP}"
            )


def _move_label(i: int) -> str:
    return chr(ord("a") + i) if i < 26 else f"m{i}"


def random_game(cfg: GeneratorConfig) -> ExtensiveGame:
    """Full tree of depth ``cfg.depth``; payoffs per player are a permutation of ``0..L-1``."""
    rng = random.Random(cfg.seed)
    lo, hi = cfg.branching
    n = cfg.players

    # preorder list of (level, child count); leaves have no children
    shape: list[tuple[int, int]] = []

    def grow(level: int) -> None:
        if level == cfg.depth:
            shape.append((level, 0))
            return
        k = rng.randint(lo, hi)
        shape.append((level, k))
        for _ in range(k):
            grow(level + 1)

    grow(0)
    internal = [i for i, (_, k) in enumerate(shape) if k]
    owners = {}
    for i in internal:
        level = shape[i][0]
        owners[i] = rng.randrange(n) if rng.random() < 0.25 else level % n
    # best effort: hand a node to every player that owns none
    if len(internal) >= n:
        for player in range(n):
            counts = [0] * n
            for o in owners.values():
                counts[o] += 1
            if counts[player]:
                continue
            donors = [i for i in internal if counts[owners[i]] > 1]
            owners[rng.choice(donors)] = player

    n_leaves = len(shape) - len(internal)
    ranks = [rng.sample(range(n_leaves), n_leaves) for _ in range(n)]

    pos = 0
    leaf_no = 0

    def build():
        nonlocal pos, leaf_no
        i = pos
        pos += 1
        k = shape[i][1]
        if k == 0:
            payoffs = tuple(ranks[p][leaf_no] for p in range(n))
            leaf_no += 1
            return Leaf(payoffs)
        return Decision(owners[i], tuple((_move_label(m), build()) for m in range(k)))

    return ExtensiveGame(tuple(f"P{p + 1}" for p in range(n)), build())


def seed_stream(seed: int, count: int) -> Iterator[int]:
    """Deterministic per-game seeds for a batch."""
    rng = random.Random(seed)
    for _ in range(count):
        yield rng.getrandbits(64)
