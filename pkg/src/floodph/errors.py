"""Exception types shared across the package.

Plain ValueError is used for bad arguments; the classes here mark
conditions that callers (in particular the CLI) may want to tell apart.
"""


class DegeneracyError(ValueError):
    """Input points are too degenerate to triangulate (e.g. all collinear)."""


class GuardError(RuntimeError):
    """A hard size guard was exceeded; the operation refuses to run."""


class IntegrityError(RuntimeError):
    """An internal structural invariant was violated (broken complex, bad mask)."""


class GenerationError(RuntimeError):
    """A synthetic data generator could not satisfy its constraints."""
