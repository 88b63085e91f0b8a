"""Bounded-workspace Turing machines with advice or query tapes.

Log space is modeled by an explicit per-machine work-tape size; the
input sits between endmarkers and is read-only.  A machine either
consumes advice symbols from a one-way read-only tape, or writes query
words to a one-way tape that a protocol oracle answers.  The surface
configurations (control state, work tape, heads) of a fixed input are
finitely many, which is what the NFA construction exploits.
"""

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .automata import Alphabet, Dfa, Nfa, Word
from .errors import CapExceeded
from .protocols import ProtocolOracle
from .verdict import DEFAULT_BOUNDS, SearchBounds, Verdict

LM = "lm"
RM = "rm"
BLANK = "_"
LAMBDA = "Λ"
MOVES = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class TmRule:
    """One table entry; advice is matched only when consume is set."""

    state: str
    in_sym: str
    work_sym: str
    advice: Optional[str]
    dst: str
    work_write: str
    in_move: str
    work_move: str
    consume: bool = False
    qwrite: Optional[str] = None


@dataclass(frozen=True)
class SurfaceConfig:
    """Everything of a configuration except the advice/query tape."""

    q: str
    tape: tuple
    head: int
    i: int

    def name(self) -> str:
        return f"{self.q}|{'.'.join(self.tape)}|{self.head}|{self.i}"


class LogTm:
    def __init__(self, states, input_alphabet: Alphabet, work_alphabet: Alphabet,
                 work_size: int, rules, initial, accepting, rejecting=(),
                 advice_alphabet: Optional[Alphabet] = None,
                 queries=(), responses=()):
        self.states = frozenset(states)
        self.input_alphabet = input_alphabet
        if BLANK not in work_alphabet:
            work_alphabet = Alphabet([BLANK] + list(work_alphabet))
        self.work_alphabet = work_alphabet
        self.work_size = work_size
        self.rules = tuple(sorted(rules, key=repr))
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.rejecting = frozenset(rejecting)
        self.advice_alphabet = advice_alphabet
        self.queries = frozenset(queries)
        self.responses = frozenset(responses)
        self._validate()
        self._rules_from = {}
        for rule in self.rules:
            self._rules_from.setdefault(rule.state, []).append(rule)
        self._queries_from = {}
        for s, q in sorted(self.queries):
            self._queries_from.setdefault(s, []).append(q)
        self._responses_from = {}
        for s, r, dst in sorted(self.responses):
            self._responses_from.setdefault((s, r), []).append(dst)

    def _validate(self):
        if self.work_size < 1:
            raise ValueError("work tape needs at least one cell")
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.accepting <= self.states or not self.rejecting <= self.states:
            raise ValueError("accepting/rejecting states must be declared")
        if self.accepting & self.rejecting:
            raise ValueError("a state cannot both accept and reject")
        for marker in (LM, RM):
            if marker in self.input_alphabet:
                raise ValueError(f"{marker!r} is reserved for the input endmarkers")
        if self.advice_alphabet is not None and LAMBDA in self.advice_alphabet:
            raise ValueError(f"{LAMBDA!r} is reserved for advice padding")
        halting = self.accepting | self.rejecting
        query_states = {s for s, _ in self.queries}
        for rule in self.rules:
            if rule.state not in self.states or rule.dst not in self.states:
                raise ValueError(f"rule {rule} references an undeclared state")
            if rule.state in halting:
                raise ValueError("halting states cannot carry rules")
            if rule.state in query_states:
                raise ValueError(f"{rule.state!r} is a query state and cannot carry rules")
            if rule.in_sym not in self.input_alphabet and rule.in_sym not in (LM, RM):
                raise ValueError(f"input symbol {rule.in_sym!r} not declared")
            if rule.work_sym not in self.work_alphabet or rule.work_write not in self.work_alphabet:
                raise ValueError(f"work symbol in {rule} not declared")
            if rule.in_move not in MOVES or rule.work_move not in MOVES:
                raise ValueError("head moves must be L, R or S")
            if rule.consume:
                if rule.qwrite is not None:
                    raise ValueError("a rule cannot both consume advice and write a query")
                if self.advice_alphabet is None:
                    raise ValueError("consume rules need an advice alphabet")
                if rule.advice not in self.advice_alphabet and rule.advice != LAMBDA:
                    raise ValueError(f"advice symbol {rule.advice!r} not declared")
            elif rule.advice is not None:
                raise ValueError("non-consuming rules cannot match advice")
        for s, _ in self.queries:
            if s not in self.states or s in halting:
                raise ValueError("query states must be declared, non-halting states")
        for s, _, dst in self.responses:
            if s not in query_states:
                raise ValueError(f"response rule for non-query state {s!r}")
            if dst not in self.states:
                raise ValueError("response target not declared")

    def uses_advice(self) -> bool:
        return any(rule.consume for rule in self.rules)

    def uses_queries(self) -> bool:
        return bool(self.queries) or any(rule.qwrite is not None for rule in self.rules)


def _input_tape(tm: LogTm, x: Word) -> tuple:
    for sym in x:
        if sym not in tm.input_alphabet:
            raise ValueError(f"input symbol {sym!r} not declared")
    return (LM,) + tuple(x) + (RM,)


def _move_heads(tm: LogTm, rule: TmRule, i: int, head: int, tape_len: int):
    ni = i + MOVES[rule.in_move]
    nh = head + MOVES[rule.work_move]
    if not (0 <= ni < tape_len) or not (0 <= nh < tm.work_size):
        return None
    return ni, nh


def run_with_advice(tm: LogTm, x: Word, y: Word, step_cap: int = 100_000) -> Verdict:
    """Execute with advice y, then unbounded padding symbols.

    Accepting requires the advice head to have passed all of y; the
    position is capped at len(y) so padding loops cannot blow up the
    configuration space.
    """
    if tm.uses_queries():
        raise ValueError("advice execution cannot handle query rules")
    for sym in y:
        if tm.advice_alphabet is None or sym not in tm.advice_alphabet:
            raise ValueError(f"advice symbol {sym!r} not declared")
    tape = _input_tape(tm, x)
    y = tuple(y)
    blanks = (BLANK,) * tm.work_size
    start = (tm.initial, 0, blanks, 0, 0)
    seen = {start}
    queue = deque([start])
    pruned = False
    while queue:
        q, i, work, head, j = queue.popleft()
        if q in tm.accepting:
            if j >= len(y):
                return Verdict.ACCEPT
            continue
        if q in tm.rejecting:
            continue
        under = y[j] if j < len(y) else LAMBDA
        for rule in tm._rules_from.get(q, ()):
            if rule.in_sym != tape[i] or rule.work_sym != work[head]:
                continue
            if rule.consume and rule.advice != under:
                continue
            moved = _move_heads(tm, rule, i, head, len(tape))
            if moved is None:
                continue
            ni, nh = moved
            nwork = work[:head] + (rule.work_write,) + work[head + 1:]
            nj = min(j + 1, len(y)) if rule.consume else j
            cfg = (rule.dst, ni, nwork, nh, nj)
            if cfg in seen:
                continue
            if len(seen) >= step_cap:
                pruned = True
                continue
            seen.add(cfg)
            queue.append(cfg)
    return Verdict.UNKNOWN if pruned else Verdict.REJECT


def surface_config_nfa(tm: LogTm, x: Word, state_cap: int = 20_000) -> Nfa:
    """NFA over advice ∪ {Λ} tracing the machine's surface configurations.

    Consuming rules become letter transitions, non-consuming ones ε
    transitions; accepting configurations get a Λ self-loop so trailing
    padding never changes the verdict.  x is in the machine's language
    under advice filter F iff some yΛ^k with y ∈ F lands here.
    """
    if tm.uses_queries():
        raise ValueError("surface construction cannot handle query rules")
    advice = list(tm.advice_alphabet) if tm.advice_alphabet is not None else []
    alphabet = Alphabet(advice + [LAMBDA])
    tape = _input_tape(tm, x)
    blanks = (BLANK,) * tm.work_size

    start = SurfaceConfig(tm.initial, blanks, 0, 0)
    names = {start: start.name()}
    transitions = set()
    accepting = set()
    queue = deque([start])
    while queue:
        cfg = queue.popleft()
        name = names[cfg]
        if cfg.q in tm.accepting:
            accepting.add(name)
            transitions.add((name, LAMBDA, name))
            continue
        if cfg.q in tm.rejecting:
            continue
        for rule in tm._rules_from.get(cfg.q, ()):
            if rule.in_sym != tape[cfg.i] or rule.work_sym != cfg.tape[cfg.head]:
                continue
            moved = _move_heads(tm, rule, cfg.i, cfg.head, len(tape))
            if moved is None:
                continue
            ni, nh = moved
            nwork = cfg.tape[:cfg.head] + (rule.work_write,) + cfg.tape[cfg.head + 1:]
            nxt = SurfaceConfig(rule.dst, nwork, nh, ni)
            if nxt not in names:
                if len(names) >= state_cap:
                    raise CapExceeded("surface configuration cap exceeded")
                names[nxt] = nxt.name()
                queue.append(nxt)
            label = rule.advice if rule.consume else None
            transitions.add((name, label, names[nxt]))
    return Nfa(set(names.values()), alphabet, transitions, names[start], accepting)


def padding_flagged(a: Dfa, lam: str) -> Dfa:
    """The flagged padding automaton: once lam is read, only lam may follow."""
    if not isinstance(a, Dfa):
        raise ValueError("padding construction needs a deterministic automaton")
    if lam not in a.alphabet:
        raise ValueError(f"{lam!r} is not in the automaton alphabet")
    states = {f"{q}@0" for q in a.states} | {f"{q}@1" for q in a.states}
    transitions = set()
    for src, sym, dst in a.transitions:
        if sym == lam:
            transitions.add((f"{src}@0", sym, f"{dst}@1"))
            transitions.add((f"{src}@1", sym, f"{dst}@1"))
        else:
            transitions.add((f"{src}@0", sym, f"{dst}@0"))
    accepting = {f"{q}@0" for q in a.accepting} | {f"{q}@1" for q in a.accepting}
    return Dfa(states, a.alphabet, transitions, f"{a.initial}@0", accepting)


def lambda_eliminate(a: Dfa, lam: str) -> Dfa:
    """Strip lam transitions; a state accepts iff some lam-tail did before.

    For lam-free y: y is accepted by the result iff yΛ^k was accepted by
    a for some k ≥ 0.
    """
    flagged = padding_flagged(a, lam)
    accepting = set()
    for q in a.states:
        cur = f"{q}@0"
        seen = set()
        while cur is not None and cur not in seen:
            seen.add(cur)
            if cur in flagged.accepting:
                accepting.add(q)
                break
            cur = flagged.delta(cur, lam)
    transitions = {(s, sym, d) for s, sym, d in a.transitions if sym != lam}
    return Dfa(a.states, a.alphabet, transitions, a.initial, accepting)


def run_with_protocol(tm: LogTm, x: Word, o: ProtocolOracle,
                      bounds: SearchBounds = DEFAULT_BOUNDS) -> Verdict:
    """Execute against a protocol oracle instead of advice.

    The query tape buffers written symbols until a query state fires;
    the oracle's response picks the continuation.  Accepting needs an
    accepting control state, an empty query tape and an accepting oracle
    state, mirroring the ADS-automaton convention.
    """
    if tm.uses_advice():
        raise ValueError("protocol execution cannot handle advice rules")
    wr = o.alphabet.gamma_wr
    for rule in tm.rules:
        if rule.qwrite is not None and (wr is None or rule.qwrite not in wr):
            raise ValueError(f"query-tape symbol {rule.qwrite!r} not in the write alphabet")
    for s, q in tm.queries:
        if q not in o.alphabet.gamma_query:
            raise ValueError(f"query symbol {q!r} not declared by the oracle")
    for s, r, _ in tm.responses:
        if r not in o.alphabet.gamma_resp:
            raise ValueError(f"response symbol {r!r} not declared by the oracle")

    tape = _input_tape(tm, x)
    blanks = (BLANK,) * tm.work_size
    ostate0 = o.initial_state()
    start = (tm.initial, 0, blanks, 0, (), o.canonical_key(ostate0))
    ostates = {start[5]: ostate0}
    best = {start: 0}
    queue = deque([(start, 0)])
    pruned = False
    while queue:
        cfg, blocks = queue.popleft()
        if blocks > best.get(cfg, blocks):
            continue
        q, i, work, head, u, okey = cfg
        if q in tm.accepting:
            if not u and o.accepting(ostates[okey]):
                return Verdict.ACCEPT
            continue
        if q in tm.rejecting:
            continue

        moves = []
        for rule in tm._rules_from.get(q, ()):
            if rule.in_sym != tape[i] or rule.work_sym != work[head]:
                continue
            moved = _move_heads(tm, rule, i, head, len(tape))
            if moved is None:
                continue
            ni, nh = moved
            nu = u
            if rule.qwrite is not None:
                if len(u) >= bounds.max_tape:
                    pruned = True
                    continue
                nu = u + (rule.qwrite,)
            nwork = work[:head] + (rule.work_write,) + work[head + 1:]
            moves.append(((rule.dst, ni, nwork, nh, nu, okey), blocks))
        for qsym in tm._queries_from.get(q, ()):
            answer = o.respond(ostates[okey], u, qsym)
            if answer is None:
                continue
            r, nstate = answer
            targets = tm._responses_from.get((q, r), ())
            if not targets:
                continue
            if blocks + 1 > bounds.max_blocks:
                pruned = True
                continue
            nkey = o.canonical_key(nstate)
            ostates.setdefault(nkey, nstate)
            for dst in targets:
                moves.append(((dst, i, work, head, (), nkey), blocks + 1))

        for ncfg, nblocks in moves:
            if ncfg in best:
                if nblocks < best[ncfg]:
                    best[ncfg] = nblocks
                    queue.append((ncfg, nblocks))
                continue
            if len(best) >= bounds.max_configs:
                pruned = True
                continue
            best[ncfg] = nblocks
            queue.append((ncfg, nblocks))
    return Verdict.UNKNOWN if pruned else Verdict.REJECT


# -- toy machines -----------------------------------------------------------

AB = Alphabet(["a", "b"])
_WORK = Alphabet([BLANK])


def _advice_tm(states, rules, accepting, initial, rejecting=()):
    return LogTm(
        states=states,
        input_alphabet=AB,
        work_alphabet=_WORK,
        work_size=1,
        rules=rules,
        initial=initial,
        accepting=accepting,
        rejecting=rejecting,
        advice_alphabet=AB,
    )


def toy_first_symbol_tm() -> LogTm:
    """Accepts when the first advice symbol equals the first input symbol."""
    rules = [TmRule("s0", LM, BLANK, None, "s1", BLANK, "R", "S")]
    for sym in AB:
        rules.append(TmRule("s1", sym, BLANK, sym, "drain", BLANK, "S", "S", consume=True))
        for adv in AB:
            rules.append(TmRule("drain", sym, BLANK, adv, "drain", BLANK, "S", "S", consume=True))
        rules.append(TmRule("drain", sym, BLANK, None, "acc", BLANK, "S", "S"))
    return _advice_tm({"s0", "s1", "drain", "acc"}, rules, {"acc"}, "s0")


def toy_equality_tm() -> LogTm:
    """Accepts exactly when the advice word equals the input word."""
    rules = [TmRule("e0", LM, BLANK, None, "e1", BLANK, "R", "S")]
    for sym in AB:
        rules.append(TmRule("e1", sym, BLANK, sym, "e1", BLANK, "R", "S", consume=True))
    rules.append(TmRule("e1", RM, BLANK, None, "acc", BLANK, "S", "S"))
    return _advice_tm({"e0", "e1", "acc"}, rules, {"acc"}, "e0")


def toy_always_tm() -> LogTm:
    """Accepts immediately; only the empty advice word works."""
    return _advice_tm({"acc"}, [], {"acc"}, "acc")


def toy_never_tm() -> LogTm:
    return _advice_tm({"rej"}, [], set(), "rej", rejecting={"rej"})


def _protocol_tm(states, rules, queries, responses, accepting, initial):
    return LogTm(
        states=states,
        input_alphabet=AB,
        work_alphabet=_WORK,
        work_size=1,
        rules=rules,
        initial=initial,
        accepting=accepting,
        queries=queries,
        responses=responses,
    )


def toy_insert_test_tm() -> LogTm:
    """Inserts the input into the set, then tests it: accepts everything."""
    rules = [TmRule("p0", LM, BLANK, None, "w1", BLANK, "R", "S")]
    for sym in AB:
        rules.append(TmRule("w1", sym, BLANK, None, "w1", BLANK, "R", "S", qwrite=sym))
        rules.append(TmRule("r1", sym, BLANK, None, "r1", BLANK, "L", "S"))
        rules.append(TmRule("w2", sym, BLANK, None, "w2", BLANK, "R", "S", qwrite=sym))
    rules.append(TmRule("w1", RM, BLANK, None, "qi", BLANK, "S", "S"))
    rules.append(TmRule("r1", RM, BLANK, None, "r1", BLANK, "L", "S"))
    rules.append(TmRule("r1", LM, BLANK, None, "w2", BLANK, "R", "S"))
    rules.append(TmRule("w2", RM, BLANK, None, "qt", BLANK, "S", "S"))
    return _protocol_tm(
        {"p0", "w1", "qi", "r1", "w2", "qt", "acc"},
        rules,
        queries={("qi", "#ins"), ("qt", "#test")},
        responses={("qi", "#", "r1"), ("qt", "+#", "acc")},
        accepting={"acc"},
        initial="p0",
    )


def toy_test_first_tm() -> LogTm:
    """Demands a positive test before anything was inserted: rejects everything."""
    return _protocol_tm(
        {"t0", "acc"},
        [],
        queries={("t0", "#test")},
        responses={("t0", "+#", "acc")},
        accepting={"acc"},
        initial="t0",
    )


def toy_palindrome_tm() -> LogTm:
    """Inserts the input, then tests its reversal: accepts palindromes."""
    rules = [TmRule("p0", LM, BLANK, None, "w1", BLANK, "R", "S")]
    for sym in AB:
        rules.append(TmRule("w1", sym, BLANK, None, "w1", BLANK, "R", "S", qwrite=sym))
        rules.append(TmRule("b1", sym, BLANK, None, "b1", BLANK, "L", "S", qwrite=sym))
    rules.append(TmRule("w1", RM, BLANK, None, "qi", BLANK, "S", "S"))
    rules.append(TmRule("b1", RM, BLANK, None, "b1", BLANK, "L", "S"))
    rules.append(TmRule("b1", LM, BLANK, None, "qt", BLANK, "S", "S"))
    return _protocol_tm(
        {"p0", "w1", "qi", "b1", "qt", "acc"},
        rules,
        queries={("qi", "#ins"), ("qt", "#test")},
        responses={("qi", "#", "b1"), ("qt", "+#", "acc")},
        accepting={"acc"},
        initial="p0",
    )
