"""Automata with auxiliary data structures driven by protocol languages."""

from .ads import AdsAutomaton
from .automata import Alphabet, Dfa, Nfa
from .errors import CapExceeded, FormatError
from .formats import (
    dump_ads,
    dump_automaton,
    dump_fst,
    dump_tm,
    load_ads,
    load_automaton,
    load_fst,
    load_tm,
)
from .logtm import LogTm, TmRule
from .nrr import NrrAnswer, NrrInstance, PerKFilter
from .protocols import ProtocolAlphabet, ProtocolOracle
from .transducers import Fst
from .verdict import SearchBounds, Verdict

__all__ = [
    "AdsAutomaton",
    "Alphabet",
    "CapExceeded",
    "Dfa",
    "FormatError",
    "Fst",
    "LogTm",
    "Nfa",
    "NrrAnswer",
    "NrrInstance",
    "PerKFilter",
    "ProtocolAlphabet",
    "ProtocolOracle",
    "SearchBounds",
    "TmRule",
    "Verdict",
    "dump_ads",
    "dump_automaton",
    "dump_fst",
    "dump_tm",
    "load_ads",
    "load_automaton",
    "load_fst",
    "load_tm",
]
