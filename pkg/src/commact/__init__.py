"""Proof checking and proof search for commutative action logic."""

from .formula import (ONE, ZERO, Dot, Formula, Imp, One, ParseError, Rank,
                      Sequent, Star, Var, Vee, Wedge, Zero, big_dot, big_vee,
                      big_wedge, compare_rank, complexity, parse_formula,
                      parse_sequent, power, rank, star_polarities)
from .proof import Backlink, Calculus, Inference, dumps, loads, node
from .calculus import CheckReport, check

__version__ = "0.1.0"
