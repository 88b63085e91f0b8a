"""Finite-state transducers and the rational-relation algebra.

Transitions carry whole output words, not single symbols; compositions
and inversions split multi-symbol outputs through fresh intermediate
states when they need letter granularity.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .automata import Alphabet, Nfa, Word


class Fst:
    """Transducer transition: (source, input symbol-or-None, output word, target)."""

    def __init__(self, states, input_alphabet: Alphabet, output_alphabet: Alphabet,
                 transitions, initial, accepting):
        self.states = frozenset(states)
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.transitions = frozenset((s, a, tuple(out), d) for s, a, out, d in transitions)
        self.initial = initial
        self.accepting = frozenset(accepting)
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.accepting <= self.states:
            raise ValueError("accepting states must be declared")
        for src, sym, out, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition references undeclared state")
            if sym is not None and sym not in input_alphabet:
                raise ValueError(f"input symbol {sym!r} not declared")
            for c in out:
                if c not in output_alphabet:
                    raise ValueError(f"output symbol {c!r} not declared")
        self._out = {}
        for src, sym, out, dst in sorted(self.transitions, key=repr):
            self._out.setdefault(src, []).append((sym, out, dst))

    @property
    def deterministic(self) -> bool:
        """Recomputed, never stored: no ε-input moves, unique (state, symbol) fanout."""
        seen = set()
        for src, sym, _, _ in self.transitions:
            if sym is None or (src, sym) in seen:
                return False
            seen.add((src, sym))
        return True

    def __eq__(self, other):
        return isinstance(other, Fst) and (
            self.states, self.input_alphabet, self.output_alphabet,
            self.transitions, self.initial, self.accepting,
        ) == (
            other.states, other.input_alphabet, other.output_alphabet,
            other.transitions, other.initial, other.accepting,
        )

    def __hash__(self):
        return hash((self.states, self.transitions, self.initial, self.accepting))

    def __repr__(self):
        return f"Fst(states={len(self.states)}, transitions={len(self.transitions)})"

    def apply(self, word: Word, output_cap: int = 64) -> "ApplyResult":
        """All outputs of length <= output_cap for this input word.

        Truncation is loud: if any run was cut because its output grew
        past the cap, the result says so instead of silently shrinking.
        """
        for sym in word:
            if sym not in self.input_alphabet:
                raise ValueError(f"input symbol {sym!r} not declared")
        found = set()
        truncated = False
        seen = {(self.initial, 0, ())}
        queue = deque(seen)
        while queue:
            state, pos, out = queue.popleft()
            if pos == len(word) and state in self.accepting:
                found.add(out)
            for sym, emitted, dst in self._out.get(state, ()):
                if sym is None:
                    nxt_pos = pos
                elif pos < len(word) and sym == word[pos]:
                    nxt_pos = pos + 1
                else:
                    continue
                nxt_out = out + emitted
                if len(nxt_out) > output_cap:
                    truncated = True
                    continue
                node = (dst, nxt_pos, nxt_out)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        return ApplyResult(frozenset(found), truncated)


@dataclass(frozen=True)
class ApplyResult:
    words: frozenset
    truncated: bool


def _fresh(states: set, base: str) -> str:
    name = base
    while name in states:
        name += "'"
    states.add(name)
    return name


def letter_split(t: Fst) -> Fst:
    """Equivalent transducer whose outputs all have length <= 1."""
    if all(len(out) <= 1 for _, _, out, _ in t.transitions):
        return t
    states = set(t.states)
    transitions = set()
    for idx, (src, sym, out, dst) in enumerate(sorted(t.transitions, key=repr)):
        if len(out) <= 1:
            transitions.add((src, sym, out, dst))
            continue
        prev, label = src, sym
        for i, c in enumerate(out):
            target = dst if i == len(out) - 1 else _fresh(states, f"{src}+{idx}.{i}")
            transitions.add((prev, label, (c,), target))
            prev, label = target, None
    return Fst(states, t.input_alphabet, t.output_alphabet, transitions, t.initial, t.accepting)


def compose(t1: Fst, t2: Fst) -> Fst:
    """Relational composition: u ↦ v iff some w has u t1 w and w t2 v."""
    if not t1.output_alphabet.same_symbols(t2.input_alphabet):
        raise ValueError("compose requires t1 output alphabet = t2 input alphabet")
    s1 = letter_split(t1)

    def name(p, q):
        return f"({p}|{q})"

    start = (s1.initial, t2.initial)
    seen = {start}
    queue = deque([start])
    transitions = set()
    while queue:
        p, q = queue.popleft()
        moves = []
        for sym, out, p2 in s1._out.get(p, ()):
            if not out:
                moves.append((sym, (), (p2, q)))
            else:
                for label, out2, q2 in t2._out.get(q, ()):
                    if label == out[0]:
                        moves.append((sym, out2, (p2, q2)))
        for label, out2, q2 in t2._out.get(q, ()):
            if label is None:
                moves.append((None, out2, (p, q2)))
        for sym, out, target in moves:
            transitions.add((name(p, q), sym, out, name(*target)))
            if target not in seen:
                seen.add(target)
                queue.append(target)
    states = {name(p, q) for p, q in seen}
    accepting = {name(p, q) for p, q in seen if p in s1.accepting and q in t2.accepting}
    return Fst(states, t1.input_alphabet, t2.output_alphabet, transitions, name(*start), accepting)


def invert(t: Fst) -> Fst:
    """Swap the relation: output words become input paths, inputs become outputs."""
    s = letter_split(t)
    transitions = set()
    for src, sym, out, dst in s.transitions:
        new_in = out[0] if out else None
        new_out = (sym,) if sym is not None else ()
        transitions.add((src, new_in, new_out, dst))
    return Fst(s.states, t.output_alphabet, t.input_alphabet, transitions, s.initial, s.accepting)


def preimage_nfa(t: Fst, a: Nfa) -> Nfa:
    """NFA for {u : apply(t, u) meets L(a)}."""
    if not t.output_alphabet.same_symbols(a.alphabet):
        raise ValueError("preimage requires t output alphabet = automaton alphabet")
    s = letter_split(t)

    def name(p, q):
        return f"({p}|{q})"

    start = (s.initial, a.initial)
    seen = {start}
    queue = deque([start])
    transitions = set()
    while queue:
        p, q = queue.popleft()
        moves = []
        for sym, out, p2 in s._out.get(p, ()):
            if not out:
                moves.append((sym, (p2, q)))
            else:
                for label, q2 in a._out.get(q, ()):
                    if label == out[0]:
                        moves.append((sym, (p2, q2)))
        for label, q2 in a._out.get(q, ()):
            if label is None:
                moves.append((None, (p, q2)))
        for sym, target in moves:
            transitions.add((name(p, q), sym, name(*target)))
            if target not in seen:
                seen.add(target)
                queue.append(target)
    states = {name(p, q) for p, q in seen}
    accepting = {name(p, q) for p, q in seen if p in s.accepting and q in a.accepting}
    return Nfa(states, t.input_alphabet, transitions, name(*start), accepting)


def image_nfa(t: Fst, a: Nfa) -> Nfa:
    """NFA for T(L(a)), computed as the preimage under the inverse."""
    if not t.input_alphabet.same_symbols(a.alphabet):
        raise ValueError("image requires t input alphabet = automaton alphabet")
    return preimage_nfa(invert(t), a)


def id_on(a: Nfa) -> Fst:
    """Identity transducer restricted to L(a): x ↦ x iff x ∈ L(a)."""
    transitions = set()
    for src, sym, dst in a.transitions:
        if sym is None:
            transitions.add((src, None, (), dst))
        else:
            transitions.add((src, sym, (sym,), dst))
    return Fst(a.states, a.alphabet, a.alphabet, transitions, a.initial, a.accepting)


def identity_fst(alphabet: Alphabet) -> Fst:
    state = "i"
    transitions = {(state, sym, (sym,), state) for sym in alphabet}
    return Fst({state}, alphabet, alphabet, transitions, state, {state})


def word_fst(pairs: Iterable[tuple[Word, Word]], input_alphabet: Alphabet,
             output_alphabet: Alphabet) -> Fst:
    """Finite relation as a transducer; test-fixture helper."""
    root = ""
    states = {root}
    transitions = set()
    accepting = set()
    for n, (u, v) in enumerate(pairs):
        prev = root
        if u:
            for i, sym in enumerate(u):
                out = v if i == 0 else ()
                nxt = _fresh(states, f"{n}.{i}")
                transitions.add((prev, sym, out, nxt))
                prev = nxt
        else:
            nxt = _fresh(states, f"{n}.e")
            transitions.add((prev, None, v, nxt))
            prev = nxt
        accepting.add(prev)
    return Fst(states, input_alphabet, output_alphabet, transitions, root, accepting)
