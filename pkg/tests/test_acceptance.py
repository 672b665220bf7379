"""Acceptance gate: every criterion at exact rational tolerance, with runtime bounds.

Each test records one pass/fail line, printed in the terminal summary.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from fractions import Fraction

import pytest

from stochvote import cli
from stochvote.axioms import DomainBounds, check_axioms, check_iia
from stochvote.certificates import running_example, verify_certificate
from stochvote.characterization import alpha_table, check_alpha_additive_normalized, \
    check_alpha_well_defined, check_equals_urd
from stochvote.rules import REGISTRY_NAMES, borda, condorcet_quota, dictatorship, get_rule, \
    plurality, uniform_random_dictatorship
from stochvote.selfeq import Decomposition, DetRuleHandle, check_decomposition, \
    refute_self_equivalence_degenerate, verify_urd_self_equivalence

pytestmark = pytest.mark.acceptance

F = Fraction
SIX = ("anonymity", "optimality", "monotonicity", "neutrality", "iia", "regularity")


def brute_extension_count(weak) -> int:
    """Oracle: count strict rankings of the carrier refining each voter's weak order."""
    carrier = weak.alternatives.labels
    total = 1
    for w in weak.orders:
        total *= sum(1 for r in itertools.permutations(carrier) if w.is_refined_by(r))
    return total


def factorial_product(weak) -> int:
    return math.prod(math.factorial(len(c)) for w in weak.orders for c in w.classes)


def test_c1_outcomes_at_fixed_profile(criterion):
    with criterion(1, "outcomes at the four-voter profile"):
        start = time.perf_counter()
        p = running_example()
        point_y = {"x": 0, "y": 1, "z": 0}
        assert plurality()(p).as_dict() == point_y
        assert borda()(p).as_dict() == point_y
        assert condorcet_quota()(p).as_dict() == point_y
        # oracle: top counts x=1, y=2, z=1 over n=4
        assert uniform_random_dictatorship()(p).as_dict() == {"x": F(1, 4), "y": F(1, 2), "z": F(1, 4)}
        assert time.perf_counter() - start < 1


def test_c2_plurality_refutation(criterion):
    with criterion(2, "plurality refutation k=1,2,3"):
        start = time.perf_counter()
        cert = refute_self_equivalence_degenerate(plurality(), running_example(), "x", (1, 2, 3))
        assert [len(b.records) for b in cert.blocks] == [1, 16, 1296]
        for block in cert.blocks:
            assert len(block.records) == factorial_product(block.weak_profile)
            assert len(block.records) == brute_extension_count(block.weak_profile)
            assert len({r.profile for r in block.records}) == len(block.records)
            assert all(r.rival_mass > 0 for r in block.records)
        assert cert.refuted
        assert time.perf_counter() - start < 10


@pytest.fixture(scope="module")
def borda_cert():
    start = time.perf_counter()
    cert = refute_self_equivalence_degenerate(borda(), running_example(), "x", (1, 2, 3))
    return cert, time.perf_counter() - start


def test_c3_borda_scores_and_refutation(criterion, borda_cert):
    with criterion(3, "borda refutation: rival score 2+2t, total 4(t^2+t)/2, share 1/t"):
        cert, elapsed = borda_cert
        assert cert.refuted
        for block in cert.blocks:
            t = block.k + 1
            assert t == block.t
            for r in block.records:
                kappa = r.scores["rival"]
                lam = sum(r.scores.values())
                assert kappa == 2 + 2 * t
                assert lam == F(4 * (t * t + t), 2)
                assert F(kappa, lam) == F(1, t)
            summary = cert.to_json()["blocks"][block.k - 1]["borda"]
            assert summary["kappa_rival"] == [2 + 2 * t]
            assert summary["matches_formula"]
        assert elapsed < 10


@pytest.mark.xfail(strict=True, reason="rival lottery mass is 0 in some compatible profiles "
                                       "for t >= 3; only the score share equals 1/t")
def test_c3_borda_rival_mass_one_over_t(criterion, borda_cert):
    with criterion(3, "borda refutation: rival mass exactly 1/t in every compatible profile"):
        cert, _ = borda_cert
        for block in cert.blocks:
            assert all(r.rival_mass == F(1, block.t) for r in block.records), \
                f"t={block.t}: observed rival masses {block.rival_masses}"


def test_c4_condorcet_refutation(criterion):
    with criterion(4, "condorcet refutation k=1,2,3"):
        start = time.perf_counter()
        cert = refute_self_equivalence_degenerate(condorcet_quota(), running_example(), "x", (1, 2, 3))
        for block in cert.blocks:
            assert len(block.records) == factorial_product(block.weak_profile)
            for r in block.records:
                q = r.profile
                support = [h for h in q.alternatives if h != "rival"]
                above_all = sum(1 for rk in q.rankings()
                                if all(rk.index("rival") < rk.index(s) for s in support))
                assert above_all == 2
                assert r.rival_mass > 0
        assert cert.refuted
        assert time.perf_counter() - start < 10


def test_c5_urd_witness(criterion):
    with criterion(5, "uniform random dictatorship witness, with and without extras"):
        start = time.perf_counter()
        p = running_example()
        plain = verify_urd_self_equivalence(p)
        assert plain.holds and plain.method == "constructed"
        assert plain.lottery.as_dict() == {f"d{i}": F(1, 4) for i in range(1, 5)}
        extras = [DetRuleHandle.opaque("ty", {p: "y"}), DetRuleHandle.opaque("tx", {p: "x"})]
        cert = verify_urd_self_equivalence(p, extras)
        assert cert.holds and cert.method == "constructed"
        q = cert.compatible
        # oracle: each carrier element's mass is (voters ranking it first) / 4
        tops = [q.top(i) for i in range(1, 5)]
        for h in q.alternatives:
            assert cert.lottery[h] == F(tops.count(h), 4)
            assert cert.lottery[h] == (F(1, 4) if h.startswith("d") else 0)
        assert time.perf_counter() - start < 1


def test_c6_axiom_matrix(criterion):
    with criterion(6, "axiom matrix n in {2,3} exhaustive, n=4 tau=3 spot check"):
        start = time.perf_counter()
        urd, d1 = uniform_random_dictatorship(), dictatorship(1)
        for b in (DomainBounds(2, 3), DomainBounds(3, 3), DomainBounds(4, 3)):
            assert all(r.passed for r in check_axioms(urd, b, SIX).values()), b
        for b in (DomainBounds(2, 3), DomainBounds(3, 3)):
            res = check_axioms(d1, b, SIX)
            for name in ("optimality", "monotonicity", "neutrality", "iia"):
                assert res[name].passed, (name, b)
            anon = res["anonymity"]
            assert anon.status == "violation" and anon.witness.replay(d1)
        bi = check_iia(borda(), DomainBounds(2, 3))
        assert bi.status == "violation" and bi.witness.replay(borda())
        assert bi.witness.profiles[0].n == 2 and bi.witness.profiles[0].tau == 3
        pi = check_iia(plurality(), DomainBounds(4, 3))
        assert pi.status == "violation" and pi.witness.replay(plurality())
        assert pi.witness.profiles[0].n == 4 and pi.witness.profiles[0].tau == 3
        assert time.perf_counter() - start < 300


def test_c7_decomposition(criterion):
    with criterion(7, "uniform dictator decomposition"):
        start = time.perf_counter()
        urd = uniform_random_dictatorship()
        for n in (2, 3):
            assert check_decomposition(urd, Decomposition.uniform_dictators(n), DomainBounds(n, 3)).passed
        p = running_example()
        res = check_decomposition(plurality(), Decomposition.uniform_dictators(4), DomainBounds(4, 3),
                                  profiles=[p])
        assert res.status == "violation"
        assert res.witness.profiles == (p,)
        assert res.witness.lotteries[0].as_dict() == {"x": 0, "y": 1, "z": 0}
        assert res.witness.replay(plurality())
        assert time.perf_counter() - start < 60


def test_c8_alpha_diagnostics(criterion):
    with criterion(8, "coalition power at n=4"):
        start = time.perf_counter()
        urd, d1 = uniform_random_dictatorship(), dictatorship(1)
        b = DomainBounds(4, 3)
        table = alpha_table(urd, 4)
        for i in range(1, 5):
            assert table[{i}] == F(1, 4)
        voters = frozenset(range(1, 5))
        assert table[voters] == 1
        for c in table.values:
            assert table[c] == F(len(c), 4)
        assert check_alpha_additive_normalized(urd, b).passed
        assert check_alpha_well_defined(urd, b).passed
        dt = alpha_table(d1, 4)
        for c, v in dt.values.items():
            assert v == (1 if 1 in c else 0)
        assert time.perf_counter() - start < 60


def test_c9_premises_vs_equality(criterion):
    with criterion(9, "four-axiom premise set vs equality with uniform random dictatorship"):
        start = time.perf_counter()
        b = DomainBounds(3, 3)
        four = ("anonymity", "optimality", "monotonicity", "iia")
        verdicts = {}
        for name in REGISTRY_NAMES:
            rule = get_rule(name)
            res = check_axioms(rule, b, four)
            premises = all(r.passed for r in res.values())
            equal = check_equals_urd(rule, b).passed
            assert premises == equal, name
            for r in res.values():
                if r.status == "violation":
                    assert r.witness.replay(rule), (name, r.axiom)
            verdicts[name] = premises
        assert verdicts == {"urd": True, "plurality": False, "borda": False,
                            "condorcet": False, "dictator:1": False}
        assert time.perf_counter() - start < 300


def _emit_artifacts(out):
    assert cli.main(["selfeq", "refute", "plurality", "--profile", "running-example", "--rival", "x",
                     "--out", str(out / "plurality.json")]) == 0
    assert cli.main(["selfeq", "refute", "borda", "--profile", "running-example", "--rival", "x",
                     "--out", str(out / "borda.json")]) == 0
    assert cli.main(["selfeq", "refute", "condorcet", "--profile", "running-example", "--rival", "x",
                     "--out", str(out / "condorcet.json")]) == 0
    assert cli.main(["selfeq", "verify-urd", "--profile", "running-example",
                     "--out", str(out / "urd.json")]) == 0
    assert cli.main(["selfeq", "verify-urd", "--profile", "running-example", "--extras", "ty=y,tx=x",
                     "--out", str(out / "urd_extras.json")]) == 0
    return sorted(out.iterdir())


def test_c10_certificate_replay(criterion, tmp_path, capsys):
    with criterion(10, "certificate replay and byte-identical rerun"):
        first = _emit_artifacts(tmp_path / "a")
        second = _emit_artifacts(tmp_path / "b")
        assert [f.name for f in first] == [f.name for f in second]
        assert len(first) == 5
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes(), a.name
        capsys.readouterr()
        for f in first:
            assert cli.main(["verify-certificate", str(f)]) == 0, f.name
            assert json.loads(capsys.readouterr().out)["ok"] is True
            assert verify_certificate(json.loads(f.read_text())).ok


def test_c10_tampered_certificate_rejected(tmp_path):
    (path,) = [f for f in _emit_artifacts(tmp_path) if f.name == "plurality.json"]
    data = json.loads(path.read_text())
    data["blocks"][1]["records"][0]["lottery"] = "rival:0, s1:1, s2:0"
    assert not verify_certificate(data).ok
