"""
Exception hierarchy for enhomology.

Every exception carries the process exit code the command-line front end
maps it to:

- 1: validation failure (an axiom counterexample or violated hypothesis)
- 2: internal invariant failure (d^2 != 0 and friends)
- 3: I/O, schema or malformed argument
- 4: resource bound exceeded
"""

from __future__ import annotations


class EnhError(Exception):
    """Base class for all errors raised by enhomology."""

    exit_code = 3


class ValidationError(EnhError):
    """A graded axiom failed on a concrete tuple of basis elements."""

    exit_code = 1

    def __init__(self, message: str, tuple_=None, lhs=None, rhs=None):
        super().__init__(message)
        self.tuple = tuple_
        self.lhs = lhs
        self.rhs = rhs

    def __str__(self) -> str:
        text = super().__str__()
        if self.tuple is None:
            return text
        return f"{text} at {self.tuple}: lhs={self.lhs!r} rhs={self.rhs!r}"


class HypothesisError(ValidationError):
    """Input to the twisting-cochain lift does not satisfy its hypotheses."""


class InvariantError(EnhError):
    exit_code = 2


class SchemaError(EnhError):
    exit_code = 3


class InputError(EnhError):
    exit_code = 3


class ResourceError(EnhError):
    exit_code = 4


class RingError(EnhError, ValueError):
    exit_code = 3


class TreeError(EnhError, ValueError):
    exit_code = 3


class GraphError(EnhError, ValueError):
    exit_code = 3
