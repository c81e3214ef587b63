"""Exception hierarchy shared by the library and the CLI."""


class CoopScenarioError(Exception):
    """Base class for every error raised by this package."""


class InvalidGameError(CoopScenarioError, ValueError):
    """Game definition is structurally invalid (agent count, missing coalitions)."""


class ConfigError(CoopScenarioError, ValueError):
    """Configuration or distribution parameters are invalid."""


class InvalidProgramError(CoopScenarioError, ValueError):
    """Linear program has inconsistent dimensions or non-finite data."""


class PreconditionError(CoopScenarioError, ValueError):
    """An operation was called outside its domain."""


class EmptyCoreError(PreconditionError):
    """The scenario core is empty; use the relaxed program instead."""


class NumericalError(CoopScenarioError, ArithmeticError):
    """A numerical routine failed (LP breakdown, root not bracketed)."""
