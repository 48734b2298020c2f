"""Mod p reductions of crystalline and semi-stable representations at exceptional weights."""

from zigzag.crystalline import ZigZagVerdict, classify_crystalline
from zigzag.errors import InsufficientPrecision, ParseError, PreconditionError, ZigZagError
from zigzag.family import ApFamily, consistency_check, verify_tau_identity
from zigzag.padic import INFINITY, CappedElement, ExactElement, HalfInt, sqrt
from zigzag.repclasses import Irreducible, Reducible, equals
from zigzag.semistable import SemistableInput, classify_semistable

__all__ = [
    "INFINITY", "ApFamily", "CappedElement", "ExactElement", "HalfInt", "InsufficientPrecision",
    "Irreducible", "ParseError", "PreconditionError", "Reducible", "SemistableInput",
    "ZigZagError", "ZigZagVerdict", "classify_crystalline", "classify_semistable",
    "consistency_check", "equals", "sqrt", "verify_tau_identity",
]
