"""Regular realizability: does a regular language meet a filter language?

An instance pairs an NFA over a protocol alphabet with a filter (a
protocol oracle, or the copy language Per_k).  The deciders answer
Yes/No/Unknown; every Yes carries a witness word that is re-validated
before being returned.  The reduction constructions translate between
ADS-automaton problems and these instances.
"""

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from .ads import AdsAutomaton, extractor, m_prot, compose_with_fst
from .automata import Alphabet, Dfa, Nfa, Word, universal_nfa
from .protocols import (
    DyckOracle,
    ProtocolAlphabet,
    ProtocolOracle,
    membership,
    per_k_membership,
    sigma_k,
)
from .transducers import Fst, id_on, image_nfa, preimage_nfa
from .verdict import DEFAULT_BOUNDS, SearchBounds, Verdict


class PerKFilter:
    """The copy language (v#)^k over the k-letter digit alphabet."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self.alphabet = Alphabet(list(sigma_k(k)) + ["#"])

    def member(self, word: Word) -> bool:
        return per_k_membership(word, self.k)

    def __repr__(self):
        return f"PerKFilter(k={self.k})"


Filter = Union[ProtocolOracle, PerKFilter]


def _filter_alphabet(f: Filter) -> Alphabet:
    if isinstance(f, PerKFilter):
        return f.alphabet
    return f.alphabet.flattened()


def _filter_member(f: Filter, word: Word) -> bool:
    if isinstance(f, PerKFilter):
        return f.member(word)
    return membership(f, word)


@dataclass(frozen=True)
class NrrInstance:
    automaton: Nfa
    filter: Filter

    def __post_init__(self):
        if not self.automaton.alphabet.same_symbols(_filter_alphabet(self.filter)):
            raise ValueError("instance automaton alphabet must match the filter alphabet")


@dataclass(frozen=True)
class NrrAnswer:
    """ACCEPT means the intersection is non-empty; REJECT means provably empty."""

    verdict: Verdict
    witness: Optional[Word] = None


def _validated(inst: NrrInstance, witness: Word) -> NrrAnswer:
    # a Yes answer must survive both sides of the intersection
    if not inst.automaton.accepts(witness):
        raise RuntimeError(f"witness {witness!r} rejected by the automaton")
    if not _filter_member(inst.filter, witness):
        raise RuntimeError(f"witness {witness!r} rejected by the filter")
    return NrrAnswer(Verdict.ACCEPT, tuple(witness))


def nreg_generic(inst: NrrInstance, bounds: SearchBounds = DEFAULT_BOUNDS) -> NrrAnswer:
    """Breadth-first intersection search for oracle filters.

    Nodes track the NFA state set, the write word of the open block, and
    the oracle state (deduplicated through canonical_key).  The block
    count rides along so a node cut off by the block cap earlier can be
    revisited on a cheaper path.  No is reported only when the whole
    space was exhausted without touching a bound.
    """
    o = inst.filter
    if not isinstance(o, ProtocolOracle):
        raise ValueError("nreg_generic needs a protocol oracle filter")
    # dead branches would otherwise bloat the frontier into the config cap
    a = inst.automaton.trim()
    if not a.accepting:
        return NrrAnswer(Verdict.REJECT)
    pa = o.alphabet
    wr = tuple(pa.gamma_wr) if pa.gamma_wr is not None else ()

    start_states = a.eps_closure([a.initial])
    start_ostate = o.initial_state()
    start = (start_states, (), o.canonical_key(start_ostate))
    best = {start: 0}
    ostates = {start[2]: start_ostate}
    parents = {start: None}
    queue = deque([(start, 0)])
    pruned = False

    while queue:
        node, blocks = queue.popleft()
        if blocks > best.get(node, blocks):
            continue
        states, pending, okey = node
        ostate = ostates[okey]

        if not pending and (states & a.accepting) and o.accepting(ostate):
            witness = []
            cur = node
            while parents[cur] is not None:
                cur, tokens = parents[cur]
                witness.append(tokens)
            witness = tuple(tok for part in reversed(witness) for tok in part)
            return _validated(inst, witness)

        moves = []
        for sym in wr:
            nxt = a.step(states, sym)
            if not nxt:
                continue
            if len(pending) >= bounds.max_tape:
                pruned = True
                continue
            moves.append(((nxt, pending + (sym,), okey), blocks, (sym,)))
        for q in pa.gamma_query:
            answer = o.respond(ostate, pending, q)
            if answer is None:
                continue
            r, nstate = answer
            nxt = a.step(a.step(states, q), r)
            if not nxt:
                continue
            if blocks + 1 > bounds.max_blocks:
                pruned = True
                continue
            nkey = o.canonical_key(nstate)
            ostates.setdefault(nkey, nstate)
            moves.append(((nxt, (), nkey), blocks + 1, (q, r)))

        for nnode, nblocks, tokens in moves:
            if nnode in best:
                if nblocks < best[nnode]:
                    best[nnode] = nblocks
                    parents[nnode] = (node, tokens)
                    queue.append((nnode, nblocks))
                continue
            if len(best) >= bounds.max_configs:
                pruned = True
                continue
            best[nnode] = nblocks
            parents[nnode] = (node, tokens)
            queue.append((nnode, nblocks))

    return NrrAnswer(Verdict.UNKNOWN if pruned else Verdict.REJECT)


# -- complete backend for the bracket filter ------------------------------


def _pair_edges(a: Nfa, first: str, second: str) -> list:
    """State pairs connected by reading the two tokens (with closures)."""
    edges = []
    for p in a.states:
        reach = a.step(a.step(a.eps_closure([p]), first), second)
        for q in reach:
            edges.append((p, q))
    return edges


def nreg_dyck(a: Nfa, exact_d2: bool = False) -> NrrAnswer:
    """Complete decider for the bracket filter via pair saturation.

    B holds state pairs bridged by a balanced block sequence, closed
    under concatenation and wrapping in a matching push/pop block pair.
    Prefix mode additionally lets unmatched pushes accumulate on the
    right.  Saturation always terminates, so the verdict is never
    Unknown; witnesses are the derivation words.
    """
    dyck = DyckOracle(exact_d2)
    if not a.alphabet.same_symbols(dyck.alphabet.flattened()):
        raise ValueError("automaton alphabet must match the bracket protocol alphabet")

    push = {
        "(": _pair_edges(a, "push(", "("),
        "[": _pair_edges(a, "push[", "["),
    }
    pop = {
        "(": _pair_edges(a, "pop", ")"),
        "[": _pair_edges(a, "pop", "]"),
    }
    tokens = {
        "push(": ("push(", "("),
        "push[": ("push[", "["),
        "pop)": ("pop", ")"),
        "pop]": ("pop", "]"),
    }
    pop_tokens = {"(": tokens["pop)"], "[": tokens["pop]"]}
    push_tokens = {"(": tokens["push("], "[": tokens["push["]}

    balanced = {}
    for p in a.states:
        for q in a.eps_closure([p]):
            balanced[(p, q)] = ()

    def add(store, p, q, word):
        if (p, q) not in store or len(word) < len(store[(p, q)]):
            store[(p, q)] = word
            return True
        return False

    changed = True
    while changed:
        changed = False
        pairs = list(balanced.items())
        for (p, r), w1 in pairs:
            for (r2, q), w2 in pairs:
                if r == r2 and add(balanced, p, q, w1 + w2):
                    changed = True
        for gamma in ("(", "["):
            for p, p1 in push[gamma]:
                for (b1, b2), w in list(balanced.items()):
                    if b1 != p1:
                        continue
                    for q1, q in pop[gamma]:
                        if q1 != b2:
                            continue
                        word = push_tokens[gamma] + w + pop_tokens[gamma]
                        if add(balanced, p, q, word):
                            changed = True

    reach = dict(balanced)
    if not exact_d2:
        changed = True
        while changed:
            changed = False
            for (p, q), w in list(reach.items()):
                for gamma in ("(", "["):
                    for q1, q2 in push[gamma]:
                        if q1 != q:
                            continue
                        opened = w + push_tokens[gamma]
                        for (b1, b2), wb in list(balanced.items()):
                            if b1 == q2 and add(reach, p, b2, opened + wb):
                                changed = True

    candidates = [w for (p, q), w in reach.items() if p == a.initial and q in a.accepting]
    if candidates:
        witness = min(candidates, key=lambda w: (len(w), w))
        return _validated(NrrInstance(a, dyck), witness)
    return NrrAnswer(Verdict.REJECT)


# -- complete backend for the copy filter ----------------------------------


def nreg_perk(a: Nfa, k: int, bounds: SearchBounds = DEFAULT_BOUNDS) -> NrrAnswer:
    """Decide L(a) ∩ (v#)^k ≠ ∅ by searching the transition-relation monoid.

    Each candidate v is represented by its state relation; relations are
    explored breadth-first (shortest v first) and deduplicated, so the
    search space is finite and the answer complete unless the relation
    cap is hit.
    """
    filt = PerKFilter(k)
    if not a.alphabet.same_symbols(filt.alphabet):
        raise ValueError("automaton alphabet must match the copy-filter alphabet")
    digits = tuple(sigma_k(k))

    def freeze(rel):
        return tuple(sorted((p, rel[p]) for p in rel))

    def accepts_via(rel) -> bool:
        current = a.eps_closure([a.initial])
        for _ in range(k):
            after_v = frozenset().union(*(rel[p] for p in current)) if current else frozenset()
            current = a.step(after_v, "#")
            if not current:
                return False
        return bool(current & a.accepting)

    start = {p: a.eps_closure([p]) for p in a.states}
    seen = {freeze(start)}
    queue = deque([(start, ())])
    pruned = False
    while queue:
        rel, v = queue.popleft()
        if accepts_via(rel):
            witness = (v + ("#",)) * k
            return _validated(NrrInstance(a, filt), witness)
        for sym in digits:
            nrel = {p: a.step(rel[p], sym) for p in rel}
            key = freeze(nrel)
            if key in seen:
                continue
            if len(seen) >= bounds.max_configs:
                pruned = True
                continue
            seen.add(key)
            queue.append((nrel, v + (sym,)))
    return NrrAnswer(Verdict.UNKNOWN if pruned else Verdict.REJECT)


def decide(inst: NrrInstance, bounds: SearchBounds = DEFAULT_BOUNDS) -> NrrAnswer:
    """Route an instance to the strongest backend available for its filter."""
    if isinstance(inst.filter, PerKFilter):
        return nreg_perk(inst.automaton, inst.filter.k, bounds)
    if isinstance(inst.filter, DyckOracle):
        return nreg_dyck(inst.automaton, inst.filter.exact_d2)
    return nreg_generic(inst, bounds)


# -- reductions -------------------------------------------------------------


def nonemptiness_to_nrr(m: AdsAutomaton) -> Nfa:
    """NFA of all protocols m can produce: L(m) ≠ ∅ iff it meets PROT."""
    return image_nfa(extractor(m), universal_nfa(m.input_alphabet))


def nrr_to_nonemptiness(a: Nfa, pa: ProtocolAlphabet, o: ProtocolOracle) -> AdsAutomaton:
    """ADS automaton whose language is non-empty iff L(a) meets PROT(o)."""
    if not a.alphabet.same_symbols(pa.flattened()):
        raise ValueError("automaton alphabet must match the flattened protocol alphabet")
    return compose_with_fst(m_prot(pa, o), id_on(a))


def membership_to_reg(m: AdsAutomaton, w: Word) -> Dfa:
    """DFA of the protocols a deterministic m can follow while reading w.

    The input word is hardwired; the DFA's own input spells the protocol.
    Runs of tokenless moves are fast-forwarded, so each DFA state buffers
    at most one move's write word or one query.  Guarantee:
    L(result) ∩ PROT(o) ≠ ∅ iff m accepts w against o.
    """
    if not m.is_deterministic():
        raise ValueError("membership reduction needs a deterministic machine")
    from .ads import normalize_endmarkers

    m = normalize_endmarkers(m)
    w = tuple(w)
    for sym in w:
        if sym not in m.input_alphabet:
            raise ValueError(f"input symbol {sym!r} not in the machine alphabet")
    alphabet = m.protocol.flattened()

    def chase(state, i):
        """Follow tokenless moves until a query, a writing move, or a dead end."""
        accept = False
        seen = set()
        while True:
            if state in m.accepting and i == len(w):
                accept = True
            if (state, i) in seen:
                return "dead", accept, None
            seen.add((state, i))
            if state in m.query_states:
                qmoves = m.query_moves_from(state)
                if not qmoves:
                    return "dead", accept, None
                return "query", accept, (state, i)
            move = None
            for _, inp, x, dst in m.write_moves_from(state):
                if inp is None or (i < len(w) and w[i] == inp):
                    move = (inp, x, dst)
                    break
            if move is None:
                return "dead", accept, None
            inp, x, dst = move
            ni = i if inp is None else i + 1
            if x:
                return "write", accept, (x, dst, ni)
            state, i = dst, ni

    names = {}
    states = set()
    transitions = set()
    accepting = set()

    def entry(state, i):
        key = (state, i)
        if key not in names:
            names[key] = f"e{len(names)}"
            todo.append(key)
        return names[key]

    todo = deque()
    start = entry(m.initial, 0)
    while todo:
        state, i = todo.popleft()
        node = names[(state, i)]
        if node in states:
            continue
        states.add(node)
        kind, accept, data = chase(state, i)
        if accept:
            accepting.add(node)
        if kind == "dead":
            continue
        if kind == "write":
            x, dst, ni = data
            cur = node
            for j, tok in enumerate(x):
                last = j == len(x) - 1
                nxt = entry(dst, ni) if last else f"{node}.w{j + 1}"
                if not last:
                    states.add(nxt)
                transitions.add((cur, tok, nxt))
                cur = nxt
            continue
        qstate, qi = data
        qmoves = m.query_moves_from(qstate)
        q = qmoves[0][1]
        mid = f"{node}.q"
        states.add(mid)
        transitions.add((node, q, mid))
        for _, _, r, dst in qmoves:
            transitions.add((mid, r, entry(dst, qi)))

    return Dfa(states, alphabet, transitions, start, accepting)


def filter_transfer(a: Nfa, t: Fst) -> Nfa:
    """Carry an instance across a transduction t with F1 = T(F2).

    The result reads F2-side words: L(a) ∩ F1 ≠ ∅ iff L(result) ∩ F2 ≠ ∅.
    """
    if not t.output_alphabet.same_symbols(a.alphabet):
        raise ValueError("transducer output alphabet must match the instance alphabet")
    return preimage_nfa(t, a)


# -- single-insert vs copy-language transductions ---------------------------


def spk_to_perk_fst(k: int) -> Fst:
    """Map "w ins + w test + ... w test +" (k blocks) to (w#)^k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    sp = sigma_k(k)
    inp = Alphabet(list(sp) + ["ins", "test", "+", "-"])
    out = Alphabet(list(sp) + ["#"])
    states = set()
    transitions = set()
    for j in range(1, k + 1):
        copy, asked = f"c{j}", f"a{j}"
        states |= {copy, asked}
        for sym in sp:
            transitions.add((copy, sym, (sym,), copy))
        transitions.add((copy, "ins" if j == 1 else "test", (), asked))
        transitions.add((asked, "+", ("#",), f"c{j + 1}"))
    final = f"c{k + 1}"
    states.add(final)
    return Fst(states, inp, out, transitions, "c1", {final})


def perk_to_spk_fst(k: int) -> Fst:
    """Map (w#)^k onto single-insert protocols, one edit mode per block.

    Modes: keep the block word (K), change at least one letter keeping
    the length (D), end up strictly shorter (S), strictly longer (L).
    A kept word may be queried as the one insert; after that insert only
    the kept word tests +, and any further ins answers -.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    sp = sigma_k(k)
    inp = Alphabet(list(sp) + ["#"])
    out = Alphabet(list(sp) + ["ins", "test", "+", "-"])
    states = set()
    transitions = set()

    def add_block(j: int, flag: str):
        K, D, S, L = (f"{flag}{j}.{mode}" for mode in "KDSL")
        states.update((K, D, S, L))
        for sym in sp:
            transitions.add((K, sym, (sym,), K))
            transitions.add((K, sym, (), S))
            for other in sp:
                if other != sym:
                    transitions.add((K, sym, (other,), D))
                transitions.add((D, sym, (other,), D))
                transitions.add((S, sym, (other,), S))
                transitions.add((L, sym, (other,), L))
                transitions.add((D, sym, (sym,), D))
                transitions.add((S, sym, (sym,), S))
                transitions.add((L, sym, (sym,), L))
            transitions.add((S, sym, (), S))
            transitions.add((K, None, (sym,), L))
            transitions.add((L, None, (sym,), L))
        nxt_pre = f"pre{j + 1}.K" if j < k else "final"
        nxt_post = f"post{j + 1}.K" if j < k else "final"
        if flag == "pre":
            transitions.add((K, "#", ("test", "-"), nxt_pre))
            transitions.add((K, "#", ("ins", "+"), nxt_post))
            for edited_state in (D, S, L):
                transitions.add((edited_state, "#", ("test", "-"), nxt_pre))
        else:
            transitions.add((K, "#", ("test", "+"), nxt_post))
            transitions.add((K, "#", ("ins", "-"), nxt_post))
            for edited_state in (D, S, L):
                transitions.add((edited_state, "#", ("test", "-"), nxt_post))
                transitions.add((edited_state, "#", ("ins", "-"), nxt_post))

    for j in range(1, k + 1):
        add_block(j, "pre")
        add_block(j, "post")
    states.add("final")
    return Fst(states, inp, out, transitions, "pre1.K", {"final"})
