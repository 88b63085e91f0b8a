"""Nondeterministic finite automata over declared token alphabets.

Words are tuples of string tokens (a token may be longer than one
character, e.g. "push("), so every automaton carries an explicit
Alphabet.  The token "eps" is reserved for the file format and denotes
the internal epsilon label None.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

from .errors import CapExceeded

EPSILON_TOKEN = "eps"
DEFAULT_ENUM_CAP = 10**6

Word = tuple[str, ...]
Transition = tuple[str, Optional[str], str]


class Alphabet:
    """Ordered set of distinct, non-empty symbol tokens.

    The declaration order is the order used for lexicographic word
    enumeration, so two alphabets with the same symbols in a different
    order are distinct values.
    """

    def __init__(self, symbols: Iterable[str]):
        self.symbols = tuple(symbols)
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        for sym in self.symbols:
            if not isinstance(sym, str) or not sym:
                raise ValueError("alphabet symbols must be non-empty strings")
            if sym == EPSILON_TOKEN:
                raise ValueError(f"{EPSILON_TOKEN!r} is reserved and cannot be a symbol")
        self._index = {sym: i for i, sym in enumerate(self.symbols)}

    def __contains__(self, sym):
        return sym in self._index

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def index(self, sym: str) -> int:
        return self._index[sym]

    def word_key(self, word: Word):
        """Sort key realizing length-then-lexicographic order."""
        return (len(word), tuple(self._index[s] for s in word))

    def same_symbols(self, other: "Alphabet") -> bool:
        return set(self.symbols) == set(other.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({list(self.symbols)!r})"


class Nfa:
    """Epsilon-NFA with a single initial state.

    Immutable by convention; all operations return fresh automata.
    Transitions are (src, symbol-or-None, dst) triples where None is
    the epsilon label.
    """

    def __init__(self, states, alphabet: Alphabet, transitions, initial, accepting):
        self.states = frozenset(states)
        self.alphabet = alphabet
        self.transitions = frozenset(transitions)
        self.initial = initial
        self.accepting = frozenset(accepting)
        if not self.states:
            raise ValueError("state set must be non-empty")
        if self.initial not in self.states:
            raise ValueError(f"initial state {initial!r} not declared")
        if not self.accepting <= self.states:
            raise ValueError("accepting states must be declared states")
        for src, sym, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition ({src!r},{sym!r},{dst!r}) uses undeclared state")
            if sym is not None and sym not in alphabet:
                raise ValueError(f"transition symbol {sym!r} not in alphabet")
        self._out = {}
        for src, sym, dst in sorted(self.transitions, key=repr):
            self._out.setdefault(src, []).append((sym, dst))

    def __eq__(self, other):
        return (
            isinstance(other, Nfa)
            and type(self) is type(other)
            and self.states == other.states
            and self.alphabet == other.alphabet
            and self.transitions == other.transitions
            and self.initial == other.initial
            and self.accepting == other.accepting
        )

    def __hash__(self):
        return hash((self.states, self.alphabet, self.transitions, self.initial, self.accepting))

    def __repr__(self):
        return (
            f"{type(self).__name__}(states={len(self.states)}, "
            f"transitions={len(self.transitions)}, initial={self.initial!r})"
        )

    # -- run semantics ------------------------------------------------

    def eps_closure(self, states: Iterable[str]) -> frozenset:
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for sym, dst in self._out.get(s, ()):
                if sym is None and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return frozenset(seen)

    def step(self, states: frozenset, sym: str) -> frozenset:
        """One symbol move from an epsilon-closed state set, closing the result."""
        hit = set()
        for s in states:
            for label, dst in self._out.get(s, ()):
                if label == sym:
                    hit.add(dst)
        return self.eps_closure(hit)

    def accepts(self, word: Word) -> bool:
        for sym in word:
            if sym not in self.alphabet:
                raise ValueError(f"symbol {sym!r} not in alphabet")
        current = self.eps_closure([self.initial])
        for sym in word:
            current = self.step(current, sym)
            if not current:
                return False
        return bool(current & self.accepting)

    # -- structural operations ----------------------------------------

    def trim(self) -> "Nfa":
        """Restrict to states both reachable and co-reachable.

        If nothing useful survives, the canonical one-state empty
        automaton is returned so all empty results compare equal.
        """
        forward = {self.initial}
        queue = deque(forward)
        while queue:
            s = queue.popleft()
            for _, dst in self._out.get(s, ()):
                if dst not in forward:
                    forward.add(dst)
                    queue.append(dst)
        into = {}
        for src, _, dst in self.transitions:
            into.setdefault(dst, set()).add(src)
        backward = set(self.accepting)
        queue = deque(backward)
        while queue:
            s = queue.popleft()
            for src in into.get(s, ()):
                if src not in backward:
                    backward.add(src)
                    queue.append(src)
        keep = forward & backward
        if self.initial not in keep:
            return canonical_empty(self.alphabet)
        return Nfa(
            keep,
            self.alphabet,
            {(s, a, d) for s, a, d in self.transitions if s in keep and d in keep},
            self.initial,
            self.accepting & keep,
        )

    def is_empty(self) -> bool:
        reach = self.eps_closure([self.initial])
        queue = deque(reach)
        reach = set(reach)
        while queue:
            s = queue.popleft()
            for _, dst in self._out.get(s, ()):
                if dst not in reach:
                    reach.add(dst)
                    queue.append(dst)
        return not (reach & self.accepting)

    def is_finite(self) -> bool:
        """True iff the language is finite (no productive cycle)."""
        core = self.eliminate_eps().trim()
        # every state of a trimmed automaton lies on an accepting path, so
        # any cycle pumps the language
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {s: WHITE for s in core.states}
        for root in core.states:
            if color[root] != WHITE:
                continue
            stack = [(root, iter([d for _, d in core._out.get(root, ())]))]
            color[root] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for dst in it:
                    if color[dst] == GRAY:
                        return False
                    if color[dst] == WHITE:
                        color[dst] = GRAY
                        stack.append((dst, iter([d for _, d in core._out.get(dst, ())])))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()
        return True

    def enumerate_words(self, max_len: int, cap: int = DEFAULT_ENUM_CAP) -> list[Word]:
        """All accepted words of length <= max_len, shortest first, then
        lexicographic in alphabet declaration order.

        Raises CapExceeded once more than `cap` live word prefixes have
        been examined.
        """
        core = self.trim()
        found: list[Word] = []
        start = core.eps_closure([core.initial])
        level: dict[Word, frozenset] = {(): start} if start else {}
        examined = len(level)
        for length in range(max_len + 1):
            accepted = [w for w, sts in level.items() if sts & core.accepting]
            accepted.sort(key=self.alphabet.word_key)
            found.extend(accepted)
            if length == max_len:
                break
            nxt: dict[Word, frozenset] = {}
            for word, sts in level.items():
                for sym in self.alphabet:
                    target = core.step(sts, sym)
                    if target:
                        nxt[word + (sym,)] = target
                        examined += 1
                        if examined > cap:
                            raise CapExceeded(f"enumeration cap {cap} exceeded")
            level = nxt
        return found

    def sub_automaton(self, s1: str, s2: str) -> "Nfa":
        """Same graph re-rooted: initial s1, sole accepting state s2."""
        if s1 not in self.states or s2 not in self.states:
            raise ValueError("sub_automaton endpoints must be declared states")
        return Nfa(self.states, self.alphabet, self.transitions, s1, {s2})

    def eliminate_eps(self) -> "Nfa":
        """Equivalent automaton without epsilon transitions (same state set)."""
        closures = {s: self.eps_closure([s]) for s in self.states}
        transitions = set()
        accepting = set()
        for s in self.states:
            if closures[s] & self.accepting:
                accepting.add(s)
            for q in closures[s]:
                for sym, dst in self._out.get(q, ()):
                    if sym is not None:
                        transitions.add((s, sym, dst))
        return Nfa(self.states, self.alphabet, transitions, self.initial, accepting)

    def renamed(self, fn) -> "Nfa":
        return Nfa(
            {fn(s) for s in self.states},
            self.alphabet,
            {(fn(s), a, fn(d)) for s, a, d in self.transitions},
            fn(self.initial),
            {fn(s) for s in self.accepting},
        )


class Dfa(Nfa):
    """Deterministic (possibly partial) automaton.

    No epsilon transitions and at most one transition per (state, symbol);
    missing transitions reject.
    """

    def __init__(self, states, alphabet, transitions, initial, accepting):
        super().__init__(states, alphabet, transitions, initial, accepting)
        seen = set()
        for src, sym, _ in self.transitions:
            if sym is None:
                raise ValueError("DFA cannot contain epsilon transitions")
            if (src, sym) in seen:
                raise ValueError(f"DFA has two transitions from {src!r} on {sym!r}")
            seen.add((src, sym))

    def delta(self, state: str, sym: str) -> Optional[str]:
        for label, dst in self._out.get(state, ()):
            if label == sym:
                return dst
        return None


def canonical_empty(alphabet: Alphabet) -> Nfa:
    """The one fixed representation of the empty language."""
    return Nfa({"0"}, alphabet, set(), "0", set())


def universal_nfa(alphabet: Alphabet) -> Nfa:
    state = "u"
    return Nfa({state}, alphabet, {(state, sym, state) for sym in alphabet}, state, {state})


def nfa_for_words(alphabet: Alphabet, words: Iterable[Word]) -> Nfa:
    """Automaton accepting exactly the given finite set of words (a trie)."""
    root = ""
    states = {root}
    transitions = set()
    accepting = set()
    for word in words:
        node = root
        for sym in word:
            if sym not in alphabet:
                raise ValueError(f"word symbol {sym!r} not in alphabet")
            nxt = node + "\x00" + sym
            states.add(nxt)
            transitions.add((node, sym, nxt))
            node = nxt
        accepting.add(node)
    return Nfa(states, alphabet, transitions, root, accepting)


def product_intersect(a: Nfa, b: Nfa) -> Nfa:
    """Automaton for L(a) & L(b); alphabets must carry the same symbols."""
    if not a.alphabet.same_symbols(b.alphabet):
        raise ValueError("product requires alphabets with equal symbol sets")

    def name(p, q):
        return f"({p}|{q})"

    start = (a.initial, b.initial)
    todo = deque([start])
    seen = {start}
    transitions = set()
    while todo:
        p, q = todo.popleft()
        moves = []
        for sym, p2 in a._out.get(p, ()):
            if sym is None:
                moves.append((None, (p2, q)))
            else:
                for label, q2 in b._out.get(q, ()):
                    if label == sym:
                        moves.append((sym, (p2, q2)))
        for label, q2 in b._out.get(q, ()):
            if label is None:
                moves.append((None, (p, q2)))
        for sym, target in moves:
            transitions.add((name(p, q), sym, name(*target)))
            if target not in seen:
                seen.add(target)
                todo.append(target)
    states = {name(p, q) for p, q in seen}
    accepting = {name(p, q) for p, q in seen if p in a.accepting and q in b.accepting}
    return Nfa(states, a.alphabet, transitions, name(*start), accepting)


def to_dot(a: Nfa, title: str = "automaton") -> str:
    """GraphViz rendering; accepting states are double circles."""
    lines = [f'digraph "{title}" {{', "  rankdir=LR;", '  __start [shape=point, label=""];']
    for s in sorted(a.states):
        shape = "doublecircle" if s in a.accepting else "circle"
        lines.append(f'  "{s}" [shape={shape}];')
    lines.append(f'  __start -> "{a.initial}";')
    by_edge: dict[tuple[str, str], list[str]] = {}
    for src, sym, dst in a.transitions:
        by_edge.setdefault((src, dst), []).append("ε" if sym is None else sym)
    for (src, dst), labels in sorted(by_edge.items()):
        label = ", ".join(sorted(labels))
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
