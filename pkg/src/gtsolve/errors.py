"""Exception hierarchy shared by the solvers, the notation layer and the CLI."""

from __future__ import annotations


class GameError(Exception):
    """Base class for every error raised on behalf of a game."""


class InvalidGame(GameError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid game: {lines}")


class StrictnessRequired(GameError):
    """Raised when a solver that assumes strict preferences meets a tie."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        shown = "; ".join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            shown += f"; ... ({more} more)"
        super().__init__(f"strict preferences required: {shown}")


class NotSymmetric(GameError):
    def __init__(self, row: int, col: int, reason: str):
        self.row = row
        self.col = col
        super().__init__(f"game is not symmetric at cell ({row}, {col}): {reason}")


class WrongPlayerCount(GameError):
    pass


class SizeGuardExceeded(GameError):
    pass


class ScaleExceeded(GameError):
    pass


class UnknownName(GameError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class ConfigError(GameError, ValueError):
    pass


class SurvivalViolation(RuntimeError):
    """The possible set emptied during elimination; this is always a bug."""
