"""
Exception hierarchy for axiomlab.

Input problems derive from ValueError so callers that only know the
standard library still catch them.
"""


class AxiomLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AxiomLabError, ValueError):
    """Invalid argument or malformed input."""


class ParseError(InputError):
    """Text or JSON input could not be parsed."""


class RankingError(ParseError):
    """A preference ranking has duplicate, missing or unknown objects."""


class RationalFormatError(ParseError):
    """A probability is not written as an integer or p/q."""


class BistochasticityError(ParseError):
    """A matrix has an entry outside [0, 1] or a row/column sum other than 1."""


class DimensionError(ParseError):
    """Agents, objects or matrix shapes do not line up."""


class DomainError(AxiomLabError, LookupError):
    """A profile lies outside a mechanism's declared domain."""


class CapacityError(AxiomLabError, RuntimeError):
    """An enumeration would exceed its configured cap."""


class PreconditionFailed(AxiomLabError):
    """A proof step cannot be applied to the current constraint state."""


class CertificationFailed(PreconditionFailed):
    """A vertex of the feasible polytope refutes an efficiency zero."""
