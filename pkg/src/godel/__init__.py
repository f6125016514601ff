"""Timelike and isotropic geodesics of the Gödel universe, viewed as a left-invariant Lorentz metric on a Lie group."""

from .errors import DomainError, GodelError, NotTimelikeError, ValidationError
from .extremals import GeodesicParams, closed_form_position, params_from_initial, sample_curve
from .group import AlgebraVector, GroupElement, compose, exp, inverse

__all__ = [
    "AlgebraVector",
    "DomainError",
    "GeodesicParams",
    "GodelError",
    "GroupElement",
    "NotTimelikeError",
    "ValidationError",
    "closed_form_position",
    "compose",
    "exp",
    "inverse",
    "params_from_initial",
    "sample_curve",
]
