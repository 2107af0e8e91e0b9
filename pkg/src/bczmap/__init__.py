"""Exact BCZ-map dynamics on the Farey triangle: orbits, cocycle sums,
generalized arithmetic sequences, excursions and energy functionals."""
from .dynamics import InvariantViolation
from .exact_core import FareyPoint, HalfInteger, Rational
from .excursions import Excursion, ModuliPoint, build_excursion

__all__ = ["FareyPoint", "HalfInteger", "Rational", "InvariantViolation",
           "ModuliPoint", "Excursion", "build_excursion"]
__version__ = "0.1.0"
