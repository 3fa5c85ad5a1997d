"""Semantic exceptions shared across the package."""

from __future__ import annotations


class OrdvizError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(OrdvizError, ValueError):
    """Malformed or out-of-contract input (shapes, sizes, domains)."""


class TiedDistancesError(OrdvizError, ValueError):
    """Distance data contains exact ties where distinctness is required."""


class DegenerateConfigError(OrdvizError, ValueError):
    """A point configuration is degenerate for the requested operation."""


class ConstructionError(OrdvizError, RuntimeError):
    """A geometric construction failed its own recomputation check."""


class FormatError(OrdvizError, ValueError):
    """A text file does not match the expected on-disk format."""
