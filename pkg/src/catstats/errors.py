"""Error taxonomy shared by the whole package.

Callers' precondition violations raise UsageError (the CLI maps it to exit
code 2); anything else that escapes is an internal error (exit code 1).
A guess that finds nothing within its search bounds is not an error: the
guessing functions return None and the CLI maps that to exit code 3.
"""
from __future__ import annotations


class UsageError(ValueError):
    """A caller broke a documented precondition."""


class DegenerateStatisticError(UsageError):
    """Standardized moments were requested where the variance vanishes."""
