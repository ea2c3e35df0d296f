"""Theta-deformed CAR algebras: explicit representations, deformation calculus and invariants."""

from .errors import CarThetaError
from .graded import GradedOperator, GradedSpace, SkewMatrix
from .numerics import Phase

__all__ = ["CarThetaError", "GradedOperator", "GradedSpace", "Phase", "SkewMatrix"]
__version__ = "0.1.0"
