from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochvote.certificates import running_example
from stochvote.errors import InputError
from stochvote.prefcore import AlternativeSet, Profile, canonical_relabel, enumerate_profiles
from stochvote.rules import (
    REGISTRY_NAMES,
    anti_plurality,
    borda,
    borda_scores,
    condorcet_quota,
    dictatorship,
    fixed_alternative,
    get_rule,
    plurality,
    top_counts,
    uniform_lottery,
    uniform_random_dictatorship,
)

F = Fraction
ALL = [get_rule(n) for n in REGISTRY_NAMES] + [uniform_lottery(), anti_plurality(), fixed_alternative()]


def urd_oracle(p):
    """mass(x) = (# voters with top x) / n, counted directly from the rankings."""
    tops = [r[0] for r in p.rankings()]
    return {a: F(tops.count(a), p.n) for a in p.alternatives}


def borda_oracle(p):
    tau = p.tau
    return {a: sum(tau - r.index(a) for r in p.rankings()) for a in p.alternatives}


def test_dictators_at_fixed_profile():
    p = running_example()
    assert dictatorship(1)(p).degenerate_at() == "x"
    assert dictatorship(3)(p).degenerate_at() == "z"


def test_dictator_index_out_of_range():
    with pytest.raises(InputError):
        dictatorship(5)(running_example())


def test_urd_at_fixed_profile():
    lot = uniform_random_dictatorship()(running_example())
    assert lot.as_dict() == {"x": F(1, 4), "y": F(1, 2), "z": F(1, 4)}


def test_top_counts():
    tc = top_counts(running_example())
    assert (tc["x"], tc["y"], tc["z"]) == (1, 2, 1)


def test_borda_scores_at_fixed_profile():
    p = running_example()
    assert dict(zip(p.alternatives.labels, borda_scores(p.orders, p.tau))) == {"x": 7, "y": 9, "z": 8}
    assert borda_oracle(p) == {"x": 7, "y": 9, "z": 8}
    assert borda()(p).degenerate_at() == "y"


def test_plurality_tie_split():
    assert plurality()(Profile.parse("x>y\ny>x")).as_dict() == {"x": F(1, 2), "y": F(1, 2)}


def test_condorcet_two_two_split():
    p = Profile.parse("x>y>z\nx>z>y\ny>x>z\ny>z>x")
    assert condorcet_quota()(p).as_dict() == {"x": F(1, 2), "y": F(1, 2), "z": 0}
    assert condorcet_quota(quota=2)(running_example()).degenerate_at() == "y"


def test_condorcet_fallback_when_nobody_meets_quota():
    p = Profile.parse("x>y>z\ny>z>x\nz>x>y\nx>z>y\ny>x>z")
    # quota 3 of 5; tops x=2, y=2, z=1
    assert condorcet_quota()(p).as_dict() == {"x": F(1, 2), "y": F(1, 2), "z": 0}


def test_condorcet_quota_validation():
    with pytest.raises(InputError):
        condorcet_quota(0)


@pytest.mark.parametrize("rule", ALL[:5], ids=lambda r: r.name)
def test_single_alternative(rule):
    p = Profile.parse("a\na")
    assert rule(p).as_dict() == {"a": 1}


@pytest.mark.parametrize("rule", [uniform_random_dictatorship(), plurality(), borda(), condorcet_quota()],
                         ids=lambda r: r.name)
def test_unanimous_top(rule):
    p = Profile.parse("y>x>z\ny>z>x\ny>x>z")
    assert rule(p).degenerate_at() == "y"


def test_registry_names_and_unknowns():
    assert get_rule("dictator:2").name == "dictator:2"
    assert get_rule("condorcet:3").name == "condorcet:3"
    for bad in ("nope", "dictator:0", "dictator:x", "condorcet:-1"):
        with pytest.raises(InputError):
            get_rule(bad)


@pytest.mark.parametrize("n,tau", [(2, 3), (3, 3), (4, 2)])
def test_urd_matches_oracle_and_dictator_mix(n, tau):
    urd = uniform_random_dictatorship()
    dictators = [dictatorship(i) for i in range(1, n + 1)]
    for p in enumerate_profiles(n, tau):
        assert urd(p).as_dict() == urd_oracle(p)
        mix = {a: sum(d(p)[a] for d in dictators) / n for a in p.alternatives}
        assert urd(p).as_dict() == mix


@pytest.mark.parametrize("rule", ALL, ids=lambda r: r.name)
def test_outputs_are_lotteries(rule):
    for p in enumerate_profiles(3, 3):
        lot = rule(p)
        assert sum(lot.as_dict().values()) == 1
        assert all(m >= 0 for m in lot.as_dict().values())


def test_deterministic_iff_singleton_winner_set():
    for p in enumerate_profiles(3, 3):
        tc = top_counts(p)
        counts = [tc[a] for a in p.alternatives]
        assert plurality()(p).is_degenerate == (counts.count(max(counts)) == 1)
        scores = borda_oracle(p)
        assert borda()(p).is_degenerate == (list(scores.values()).count(max(scores.values())) == 1)


@given(st.data())
def test_neutral_on_arbitrary_carriers(data):
    n = data.draw(st.integers(2, 4))
    tau = data.draw(st.integers(1, 4))
    p = Profile(AlternativeSet.standard(tau),
                tuple(tuple(data.draw(st.permutations(range(tau)))) for _ in range(n)))
    target = AlternativeSet(tuple(f"h{k}" for k in range(tau)))
    beta = dict(zip(p.alternatives.labels, data.draw(st.permutations(target.labels))))
    q = canonical_relabel(p, beta, target)
    for rule in (uniform_random_dictatorship(), plurality(), borda(), condorcet_quota()):
        assert {beta[a]: m for a, m in rule(p).as_dict().items()} == rule(q).as_dict()
