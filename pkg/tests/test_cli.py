"""End-to-end checks of the command-line surface.

Commands run in-process through main(argv); stdout is the report under
test.  Fixture files live in tmp_path so every test owns its inputs.
"""

import json

import pytest

from adskit.cli import main
from adskit.formats import load_ads, load_automaton, load_fst
from adskit.automata import Dfa
from adskit.protocols import set_oracle


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


DYCK_NFA = """\
type nfa
states s0 s1 s2 s3 s4
alphabet push( push[ pop ( ) [ ]
initial s0
accept s4
trans s0 push( s1
trans s1 ( s2
trans s2 pop s3
trans s3 ) s4
"""

AB_NFA = """\
type nfa
states n0 n1
alphabet a b
initial n0
accept n1
trans n0 a n1
trans n1 b n1
"""

DUP_FST = """\
type fst
states t0
alphabet a b
outalphabet a b
initial t0
accept t0
trans t0 a a,a t0
trans t0 b b t0
"""

SWAP_FST = """\
type fst
states u0
alphabet a b
outalphabet a b
initial u0
accept u0
trans u0 a b u0
trans u0 b a u0
"""

INS_ADS = """\
type ads
alphabet a b
partition wr w0 w1 acc
partition query q0
initial w0
accept acc
wmove w0 lm - w1
wmove w1 a a w1
wmove w1 b b w1
wmove w1 rm - q0
qmove q0 #ins # acc
"""

WRITE_LOOP_NFA = """\
type nfa
states s0 s1
alphabet a b #ins #out #test # +# -#
initial s0
accept s1
trans s0 a s1
trans s1 a s1
"""

EVEN_TM = """\
type tm
tmstate p0 initial
tmstate even
tmstate odd
tmstate acc accepting
alphabet a b
workalphabet x
worksize 1
rule p0 lm _ - -> even _ R S hold
rule even a _ - -> odd _ R S hold
rule even b _ - -> odd _ R S hold
rule odd a _ - -> even _ R S hold
rule odd b _ - -> even _ R S hold
rule even rm _ - -> acc _ S S hold
"""

UNI_NFA = """\
type nfa
states v0 v1 v2 v3
alphabet 0 1 # + - r
initial v0
accept v3
trans v0 0 v1
trans v1 # v2
trans v2 + v3
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("dyck.nfa", DYCK_NFA), ("ab.nfa", AB_NFA),
                       ("dup.fst", DUP_FST), ("swap.fst", SWAP_FST),
                       ("ins.ads", INS_ADS), ("loop.nfa", WRITE_LOOP_NFA),
                       ("even.tm", EVEN_TM), ("uni.nfa", UNI_NFA)]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    members = tmp_path / "x.members"
    members.write_text("0\n10\n")
    paths["x.members"] = str(members)
    return paths


class TestReadmeExamples:
    def test_nrr_decide_dyck_witness(self, capsys, files):
        code, out, _ = run(capsys, "nrr", "decide", files["dyck.nfa"],
                           "--filter", "dyck")
        assert code == 0
        assert "verdict: accept" in out
        assert "witness: push( ( pop )" in out

    def test_universality_forward(self, capsys):
        code, out, _ = run(capsys, "universality", "forward", "0")
        assert code == 0
        assert out.strip() == "01110111 # +"

    def test_protocol_fuzz_clean(self, capsys):
        code, out, _ = run(capsys, "protocol", "fuzz", "--oracle", "set",
                           "--axiom", "v", "--trials", "1000")
        assert code == 0
        assert "0 violations" in out


class TestExitCodes:
    def test_yes_no_unknown(self, capsys, files):
        assert run(capsys, "accepts", files["ab.nfa"], "a")[0] == 0
        assert run(capsys, "accepts", files["ab.nfa"], "b")[0] == 1
        code, out, _ = run(capsys, "nrr", "decide", files["loop.nfa"],
                           "--filter", "set")
        assert code == 2 and "verdict: unknown" in out

    def test_usage_errors(self, capsys, files):
        assert run(capsys, "frobnicate")[0] == 64
        assert run(capsys, "nrr", "decide", files["ab.nfa"],
                   "--filter", "nope")[0] == 64
        assert run(capsys, "accepts", files["ab.nfa"], "a",
                   "--format", "dot")[0] == 64

    def test_data_errors(self, capsys, tmp_path):
        assert run(capsys, "accepts", str(tmp_path / "missing.nfa"), "a")[0] == 65
        bad = tmp_path / "bad.nfa"
        bad.write_text("type nfa\nstates s\nalphabet a\ninitial s\naccept s\n"
                       "trans s b s\n")
        code, _, err = run(capsys, "trim", str(bad))
        assert code == 65
        assert "line 6" in err

    def test_bad_bounds_is_usage_error(self, capsys, files):
        assert run(capsys, "ads", "simulate", files["ins.ads"], "a",
                   "--oracle", "set", "--bounds", "max-configs=x")[0] == 64


class TestReports:
    def test_byte_identical_runs(self, capsys, files):
        first = run(capsys, "nrr", "decide", files["dyck.nfa"], "--filter", "dyck")
        second = run(capsys, "nrr", "decide", files["dyck.nfa"], "--filter", "dyck")
        assert first == second
        fuzz1 = run(capsys, "protocol", "fuzz", "--oracle", "dyck",
                    "--axiom", "ii", "--trials", "200", "--seed", "5")
        fuzz2 = run(capsys, "protocol", "fuzz", "--oracle", "dyck",
                    "--axiom", "ii", "--trials", "200", "--seed", "5")
        assert fuzz1 == fuzz2

    def test_jsonl_mirrors_text(self, capsys, files):
        _, text, _ = run(capsys, "universality", "decide", files["uni.nfa"],
                         "--oracle-file", files["x.members"])
        _, lines, _ = run(capsys, "universality", "decide", files["uni.nfa"],
                          "--oracle-file", files["x.members"],
                          "--format", "jsonl")
        record = json.loads(lines)
        text_keys = [line.split(":")[0] for line in text.strip().splitlines()]
        assert list(record) == text_keys

    def test_accepts_report_shape(self, capsys, files):
        _, out, _ = run(capsys, "accepts", files["ab.nfa"], "a,b,b")
        assert out == "accepts: yes\n"


class TestMachineEmission:
    def test_trim_round_trips(self, capsys, files):
        code, out, _ = run(capsys, "trim", files["dyck.nfa"])
        assert code == 0
        emitted = load_automaton(out)
        assert emitted == load_automaton(DYCK_NFA).trim()

    def test_product_round_trips(self, capsys, files):
        code, out, _ = run(capsys, "product", files["ab.nfa"], files["ab.nfa"])
        assert code == 0
        assert load_automaton(out).accepts(("a", "b"))

    def test_dot_output(self, capsys, files):
        code, out, _ = run(capsys, "trim", files["dyck.nfa"], "--format", "dot")
        assert code == 0
        assert out.startswith("digraph")

    def test_jsonl_machine_record_parses(self, capsys, files):
        _, out, _ = run(capsys, "trim", files["dyck.nfa"], "--format", "jsonl")
        record = json.loads(out)
        assert load_automaton(record["machine"]) == load_automaton(DYCK_NFA).trim()

    def test_fst_compose_semantics(self, capsys, files):
        code, out, _ = run(capsys, "fst", "compose", files["dup.fst"],
                           files["swap.fst"])
        assert code == 0
        composed = load_fst(out)
        assert composed.apply(("a",)).words == {("b", "b")}

    def test_fst_invert_round_trips(self, capsys, files):
        _, out, _ = run(capsys, "fst", "invert", files["swap.fst"])
        inv = load_fst(out)
        assert inv.apply(("b",)).words == {("a",)}

    def test_fst_image_preimage(self, capsys, files):
        _, image, _ = run(capsys, "fst", "image", files["dup.fst"], files["ab.nfa"])
        assert load_automaton(image).accepts(("a", "a", "b"))
        _, pre, _ = run(capsys, "fst", "preimage", files["swap.fst"], files["ab.nfa"])
        assert load_automaton(pre).accepts(("b", "a"))

    def test_ads_emissions_parse_back(self, capsys, files):
        _, ext, _ = run(capsys, "ads", "extract", files["ins.ads"],
                        "--oracle", "set")
        load_fst(ext)
        _, mp, _ = run(capsys, "ads", "mprot", "--oracle", "set")
        load_ads(mp, set_oracle().alphabet)
        _, rec, _ = run(capsys, "ads", "recode", files["ins.ads"],
                        "--oracle", "set")
        load_ads(rec, set_oracle().alphabet)
        _, dec, _ = run(capsys, "ads", "recode", files["ins.ads"],
                        "--oracle", "set", "--emit", "decoder")
        load_fst(dec)

    def test_nrr_reductions_parse_back(self, capsys, files):
        _, a_text, _ = run(capsys, "nrr", "reduce-from-ads", files["ins.ads"],
                           "--oracle", "set")
        load_automaton(a_text)
        _, m_text, _ = run(capsys, "nrr", "reduce-to-ads", files["dyck.nfa"],
                           "--filter", "dyck")
        from adskit.protocols import dyck_oracle
        load_ads(m_text, dyck_oracle().alphabet)
        _, d_text, _ = run(capsys, "nrr", "member-to-reg", files["ins.ads"], "a",
                           "--oracle", "set")
        assert isinstance(load_automaton(d_text), Dfa)

    def test_filter_transfer_parses_back(self, capsys, files):
        _, out, _ = run(capsys, "nrr", "filter-transfer", files["ab.nfa"],
                        files["swap.fst"])
        load_automaton(out)


class TestFstApply:
    def test_outputs_listed(self, capsys, files):
        code, out, _ = run(capsys, "fst", "apply", files["dup.fst"], "a,b")
        assert code == 0
        assert "outputs: a,a,b" in out
        assert "truncated: no" in out

    def test_no_output_exits_one(self, capsys, files):
        code, out, _ = run(capsys, "fst", "apply", files["swap.fst"])
        assert code == 0  # empty input maps to the empty output word
        assert "outputs: -" in out

    def test_jsonl_outputs(self, capsys, files):
        _, out, _ = run(capsys, "fst", "apply", files["dup.fst"], "a",
                        "--format", "jsonl")
        record = json.loads(out)
        assert record["outputs"] == [["a", "a"]]


class TestAdsAndLogtm:
    def test_simulate_accepts(self, capsys, files):
        code, out, _ = run(capsys, "ads", "simulate", files["ins.ads"], "a,b",
                           "--oracle", "set")
        assert code == 0 and "verdict: accept" in out

    def test_logtm_run_parity(self, capsys, files):
        assert run(capsys, "logtm", "run", files["even.tm"], "a,b")[0] == 0
        assert run(capsys, "logtm", "run", files["even.tm"], "a,b,a")[0] == 1

    def test_surface_nfa_parses_back(self, capsys, files):
        code, out, _ = run(capsys, "logtm", "surface-nfa", files["even.tm"], "a,b")
        assert code == 0
        load_automaton(out)

    def test_lambda_elim(self, capsys, tmp_path):
        dfa = tmp_path / "pad.dfa"
        dfa.write_text("type dfa\nstates d0 d1\nalphabet a Λ\ninitial d0\n"
                       "accept d1\ntrans d0 a d1\ntrans d1 a d0\n"
                       "trans d0 Λ d0\ntrans d1 Λ d1\n")
        code, out, _ = run(capsys, "logtm", "lambda-elim", str(dfa))
        assert code == 0
        slim = load_automaton(out)
        assert isinstance(slim, Dfa)
        assert slim.accepts(("a",))
        assert not any(sym == "Λ" for _, sym, _ in slim.transitions)


class TestUniversality:
    def test_decide_yes_and_calls(self, capsys, files):
        code, out, _ = run(capsys, "universality", "decide", files["uni.nfa"],
                           "--oracle-file", files["x.members"])
        assert code == 0
        assert "nonempty: yes" in out
        assert "oracle-calls:" in out

    def test_decide_no(self, capsys, files, tmp_path):
        text = UNI_NFA.replace("trans v2 + v3", "trans v2 - v3")
        neg = tmp_path / "neg.nfa"
        neg.write_text(text)
        code, out, _ = run(capsys, "universality", "decide", str(neg),
                           "--oracle-file", files["x.members"])
        assert code == 1 and "nonempty: no" in out

    def test_lmember(self, capsys, files):
        assert run(capsys, "universality", "lmember", "0",
                   "--oracle-file", files["x.members"])[0] == 0
        assert run(capsys, "universality", "lmember", "10",
                   "--oracle-file", files["x.members"])[0] == 1

    def test_wparams_first_triple(self, capsys):
        code, out, _ = run(capsys, "universality", "wparams", "0", "0", "0")
        assert code == 0
        assert "r: 2047" in out and "q: 2047" in out
        assert "r-length: 4096" in out and "q-length: 4097" in out

    def test_forward_jsonl(self, capsys):
        _, out, _ = run(capsys, "universality", "forward", "0",
                        "--format", "jsonl")
        record = json.loads(out)
        assert record["protocol"] == list("01110111") + ["#", "+"]

    def test_oracle_file_comments_and_validation(self, capsys, tmp_path, files):
        ok = tmp_path / "ok.members"
        ok.write_text("# members\n0\n\n10\n")
        assert run(capsys, "universality", "lmember", "0",
                   "--oracle-file", str(ok))[0] == 0
        bad = tmp_path / "bad.members"
        bad.write_text("0\n2\n")
        code, _, err = run(capsys, "universality", "lmember", "0",
                           "--oracle-file", str(bad))
        assert code == 65 and "line 2" in err
