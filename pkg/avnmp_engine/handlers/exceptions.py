#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"


class AVNMPError(Exception):
    """Base class for every error raised by the engine."""


class DomainError(AVNMPError, ValueError):
    """An argument lies outside the domain of an operation."""


class FormatError(AVNMPError, ValueError):
    """A packet, trace or file does not follow its wire format."""


class AlignmentError(AVNMPError, ValueError):
    pass


class ConfigurationError(AVNMPError, ValueError):
    pass


class RoutingError(AVNMPError, ValueError):
    pass


class ParseError(AVNMPError, ValueError):
    pass


class EvaluationError(AVNMPError, ArithmeticError):
    pass


class StructureError(AVNMPError, ValueError):
    pass


class ValidationError(AVNMPError, ValueError):
    pass


class InsufficientDataError(AVNMPError, ValueError):
    pass


class CausalityError(AVNMPError, RuntimeError):
    """A rollback would undo a committed state entry."""
