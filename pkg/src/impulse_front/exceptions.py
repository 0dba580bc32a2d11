"""Exception and warning types raised across the package."""

from __future__ import annotations


class ImpulseFrontError(Exception):
    """Base class for all package errors."""


class ValidationError(ImpulseFrontError, ValueError):
    """Model parameters violate a standing assumption."""


class ExtinctionRegime(ImpulseFrontError):
    """g'(0) e^{f'(0)} <= 1: the zero state attracts all small data."""


class KernelUnsupported(ImpulseFrontError):
    pass


class AnisotropyUnsupported(ImpulseFrontError):
    pass


class NoPersistenceWindow(ImpulseFrontError):
    pass


class QuadratureSingularity(ImpulseFrontError):
    """The growth function vanishes inside an integration interval."""


class BoundaryContamination(ImpulseFrontError):
    """Mass reached the edge of a periodic domain, wrap-around would corrupt it."""


class KernelGridMismatch(ImpulseFrontError):
    pass


class FrontNotFound(ImpulseFrontError):
    pass


class InsufficientGenerations(ImpulseFrontError):
    pass


class BracketInvalid(ImpulseFrontError):
    pass


class GridExhausted(ImpulseFrontError):
    pass


class CFLAdvisory(UserWarning):
    """Cell Peclet number above one: central advection may oscillate."""


class MonotoneRangeWarning(UserWarning):
    pass
