"""Indexed monoidal algebras: graphs, Turing automata and graph machines.

The builtin algebras share one interface (identity, sum, trace, reindex)
and one term language; graphs are the free algebra, so term equality is
decided by graph isomorphism, and Turing graph machines are evaluated by
the same structural fold.
"""

from .perm import Obj, PermSymbol, Sort
from .graph import RankedAlphabet, SigmaGraph
from .term import Interpretation, parse, term_equal
from .automata import TuringAutomaton
from .dflow import DFlowAutomaton, GraphMachine

__all__ = [
    "Obj",
    "PermSymbol",
    "Sort",
    "RankedAlphabet",
    "SigmaGraph",
    "Interpretation",
    "parse",
    "term_equal",
    "TuringAutomaton",
    "DFlowAutomaton",
    "GraphMachine",
]
