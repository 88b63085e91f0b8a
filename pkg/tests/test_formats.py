"""Parser/writer round trips for the four textual machine formats."""

import pytest

from adskit.ads import AdsAutomaton
from adskit.automata import Alphabet, Dfa, Nfa
from adskit.errors import FormatError
from adskit.formats import (
    dump_ads,
    dump_automaton,
    dump_fst,
    dump_tm,
    fst_dot,
    load_ads,
    load_automaton,
    load_fst,
    load_tm,
)
from adskit.logtm import LogTm, TmRule
from adskit.protocols import dyck_oracle, set_oracle
from adskit.transducers import Fst

from genrand import random_dag_nfa
import random


NFA_TEXT = """\
# comment line
type nfa
states s0 s1 s2
alphabet a b
initial s0
accept s2

trans s0 a s1
trans s1 eps s2
trans s2 b s2
"""


class TestAutomata:
    def test_load_basic(self):
        a = load_automaton(NFA_TEXT)
        assert isinstance(a, Nfa) and not isinstance(a, Dfa)
        assert a.states == frozenset({"s0", "s1", "s2"})
        assert a.initial == "s0"
        assert a.accepting == frozenset({"s2"})
        assert ("s1", None, "s2") in a.transitions
        assert a.accepts(("a", "b"))

    def test_round_trip(self):
        a = load_automaton(NFA_TEXT)
        assert load_automaton(dump_automaton(a)) == a

    def test_dump_is_canonical(self):
        a = load_automaton(NFA_TEXT)
        assert dump_automaton(load_automaton(dump_automaton(a))) == dump_automaton(a)

    def test_dfa_type_preserved(self):
        text = ("type dfa\nstates q0 q1\nalphabet 0 1\ninitial q0\naccept q1\n"
                "trans q0 0 q1\ntrans q0 1 q0\ntrans q1 0 q1\ntrans q1 1 q1\n")
        d = load_automaton(text)
        assert isinstance(d, Dfa)
        again = load_automaton(dump_automaton(d))
        assert isinstance(again, Dfa) and again == d

    def test_random_round_trips(self):
        rng = random.Random(7)
        for _ in range(40):
            a = random_dag_nfa(rng, max_states=6)
            assert load_automaton(dump_automaton(a)) == a

    def test_hash_only_comments_at_line_start(self):
        # '#' is an ordinary token mid-line: several protocols use it
        text = ("type nfa\nstates p q\nalphabet # a\ninitial p\naccept q\n"
                "trans p # q\n")
        a = load_automaton(text)
        assert a.accepts(("#",))

    def test_unknown_type(self):
        with pytest.raises(FormatError, match="unknown automaton type"):
            load_automaton("type pda\nstates s\nalphabet a\ninitial s\n")

    def test_missing_states_line(self):
        with pytest.raises(FormatError, match="states"):
            load_automaton("type nfa\nalphabet a\ninitial s\n")

    def test_bad_transition_arity_has_line_number(self):
        text = "type nfa\nstates s\nalphabet a\ninitial s\naccept s\ntrans s a\n"
        with pytest.raises(FormatError, match="line 6"):
            load_automaton(text)

    def test_undeclared_symbol_rejected(self):
        text = ("type nfa\nstates s\nalphabet a\ninitial s\naccept s\n"
                "trans s b s\n")
        with pytest.raises(FormatError, match="alphabet"):
            load_automaton(text)

    def test_unknown_directive(self):
        text = NFA_TEXT + "frobnicate s0\n"
        with pytest.raises(FormatError, match="frobnicate"):
            load_automaton(text)

    def test_eps_reserved_in_alphabet(self):
        text = "type nfa\nstates s\nalphabet eps a\ninitial s\naccept s\n"
        with pytest.raises(FormatError):
            load_automaton(text)

    def test_no_accept_line_means_empty(self):
        text = "type nfa\nstates s\nalphabet a\ninitial s\ntrans s a s\n"
        a = load_automaton(text)
        assert a.accepting == frozenset()
        assert load_automaton(dump_automaton(a)) == a


FST_TEXT = """\
type fst
states t0 t1
alphabet a b
outalphabet x y
initial t0
accept t1
trans t0 a x,y t1
trans t0 b - t1
trans t1 eps x t1
"""


class TestTransducers:
    def test_load_basic(self):
        t = load_fst(FST_TEXT)
        assert ("t0", "a", ("x", "y"), "t1") in t.transitions
        assert ("t0", "b", (), "t1") in t.transitions
        assert ("t1", None, ("x",), "t1") in t.transitions

    def test_round_trip(self):
        t = load_fst(FST_TEXT)
        assert load_fst(dump_fst(t)) == t

    def test_empty_output_written_as_dash(self):
        t = load_fst(FST_TEXT)
        assert " b - " in dump_fst(t)

    def test_eps_forbidden_inside_word(self):
        bad = FST_TEXT.replace("x,y", "x,eps")
        with pytest.raises(FormatError, match="eps"):
            load_fst(bad)

    def test_dot_output_mentions_edges(self):
        dot = fst_dot(load_fst(FST_TEXT))
        assert dot.startswith("digraph") and "a/x·y" in dot

    def test_missing_outalphabet(self):
        text = FST_TEXT.replace("outalphabet x y\n", "")
        with pytest.raises(FormatError, match="outalphabet"):
            load_fst(text)


ADS_TEXT = """\
type ads
alphabet a b
partition wr w0 w1 acc
partition query q0
initial w0
accept acc
wmove w0 lm - w1
wmove w1 a a w1
wmove w1 b b,a w1
wmove w1 rm - q0
qmove q0 #ins # acc
"""


class TestStorageMachines:
    def test_load_basic(self):
        m = load_ads(ADS_TEXT, set_oracle().alphabet)
        assert m.write_states == frozenset({"w0", "w1", "acc"})
        assert m.query_states == frozenset({"q0"})
        assert ("w1", "b", ("b", "a"), "w1") in m.write_moves
        assert ("q0", "#ins", "#", "acc") in m.query_moves

    def test_round_trip_canonical(self):
        pa = set_oracle().alphabet
        m = load_ads(ADS_TEXT, pa)
        text = dump_ads(m)
        again = load_ads(text, pa)
        assert dump_ads(again) == text
        assert again.write_moves == m.write_moves
        assert again.query_moves == m.query_moves
        assert again.initial == m.initial and again.accepting == m.accepting

    def test_endmarkers_are_plain_tokens(self):
        m = load_ads(ADS_TEXT, set_oracle().alphabet)
        assert ("w0", "lm", (), "w1") in m.write_moves

    def test_wrong_protocol_rejected(self):
        with pytest.raises(FormatError):
            load_ads(ADS_TEXT, dyck_oracle().alphabet)

    def test_bad_partition_kind(self):
        text = ADS_TEXT.replace("partition wr", "partition push")
        with pytest.raises(FormatError, match="partition kind"):
            load_ads(text, set_oracle().alphabet)

    def test_qmove_arity_line_number(self):
        text = ADS_TEXT + "qmove q0 #ins acc\n"
        with pytest.raises(FormatError, match="line 12"):
            load_ads(text, set_oracle().alphabet)


TM_TEXT = """\
type tm
tmstate p0 initial
tmstate loop
tmstate qs
tmstate acc accepting
tmstate rej rejecting
alphabet a b
workalphabet x
worksize 2
advicealphabet 0 1
rule p0 lm _ - -> loop _ R S hold
rule loop a _ 0 -> loop x R S consume
rule loop b _ - -> qs _ R S qwrite:a
rule loop rm _ - -> acc _ S S hold
query qs ask
onresp qs + acc
onresp qs - rej
"""


class TestLogSpaceMachines:
    def test_load_basic(self):
        tm = load_tm(TM_TEXT)
        assert tm.initial == "p0"
        assert tm.accepting == frozenset({"acc"})
        assert tm.rejecting == frozenset({"rej"})
        assert tm.work_size == 2
        assert ("qs", "ask") in tm.queries
        assert ("qs", "+", "acc") in tm.responses
        consume = [r for r in tm.rules if r.consume]
        assert len(consume) == 1 and consume[0].advice == "0"
        qw = [r for r in tm.rules if r.qwrite is not None]
        assert len(qw) == 1 and qw[0].qwrite == "a"

    def test_round_trip_canonical(self):
        tm = load_tm(TM_TEXT)
        text = dump_tm(tm)
        again = load_tm(text)
        assert dump_tm(again) == text
        assert again.rules == tm.rules
        assert again.states == tm.states
        assert again.queries == tm.queries and again.responses == tm.responses

    def test_no_advice_alphabet_round_trip(self):
        text = ("type tm\ntmstate s initial accepting\nalphabet a\n"
                "workalphabet x\nworksize 1\n")
        tm = load_tm(text)
        assert tm.advice_alphabet is None
        assert load_tm(dump_tm(tm)).advice_alphabet is None

    def test_blank_added_to_work_alphabet(self):
        tm = load_tm(TM_TEXT)
        assert "_" in tm.work_alphabet

    def test_two_initial_states_rejected(self):
        text = TM_TEXT.replace("tmstate loop", "tmstate loop initial")
        with pytest.raises(FormatError, match="initial"):
            load_tm(text)

    def test_consume_needs_advice(self):
        text = TM_TEXT.replace("0 -> loop x R S consume",
                               "- -> loop x R S consume")
        with pytest.raises(FormatError, match="consume"):
            load_tm(text)

    def test_hold_refuses_advice(self):
        text = TM_TEXT.replace("rule loop rm _ - -> acc _ S S hold",
                               "rule loop rm _ 0 -> acc _ S S hold")
        with pytest.raises(FormatError, match="hold"):
            load_tm(text)

    def test_worksize_must_be_integer(self):
        text = TM_TEXT.replace("worksize 2", "worksize two")
        with pytest.raises(FormatError, match="worksize"):
            load_tm(text)

    def test_unknown_rule_mode(self):
        text = TM_TEXT.replace("S S hold\nquery", "S S shout\nquery")
        with pytest.raises(FormatError, match="mode"):
            load_tm(text)
