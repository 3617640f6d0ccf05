"""Exact enumeration of the chambers of Kunz fans."""
from .lights import apery_of_generators, circle_of_lights
from .nilsemigroup import ModularNilsemigroup, eta, is_kunz, outer_bettis
from .walk import FanGraph, c_of, walk, walk_all

__all__ = [
    "FanGraph",
    "ModularNilsemigroup",
    "apery_of_generators",
    "c_of",
    "circle_of_lights",
    "eta",
    "is_kunz",
    "outer_bettis",
    "walk",
    "walk_all",
]

__version__ = "0.1.0"
