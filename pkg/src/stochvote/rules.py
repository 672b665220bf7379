"""Concrete stochastic voting rules.

A rule is evaluated on the integer form of a profile: ``orders`` is a tuple
of per-voter rankings of ``range(tau)``.  A profile over any labelled carrier
is evaluated by reading its labels as the bijection onto ``range(tau)`` in
carrier order, so every rule here that ignores indices is neutral by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from stochvote.errors import InputError
from stochvote.prefcore import Lottery, Profile

Core = Callable[[tuple, int], tuple]


@dataclass(frozen=True)
class TopCount:
    """Top counts ``n(x, P)`` and top-voter sets ``N(x, P)``, keyed by label."""

    counts: dict
    voters: dict

    def __getitem__(self, label):
        return self.counts[label]


@dataclass(frozen=True, eq=False)
class Rule:
    name: str
    core: Core = field(repr=False)
    _cached: Callable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_cached", lru_cache(maxsize=1 << 17)(self.core))

    def masses(self, orders: tuple, tau: int) -> tuple:
        """Masses indexed by alternative index; memoised."""
        return self._cached(orders, tau)

    def __call__(self, p: Profile) -> Lottery:
        return Lottery(p.alternatives, self.masses(p.orders, p.tau))


def _tops(orders, tau):
    counts = [0] * tau
    for o in orders:
        counts[o[0]] += 1
    return counts


def _uniform_over(winners, tau):
    w = Fraction(1, len(winners))
    return tuple(w if k in winners else Fraction(0) for k in range(tau))


def _argmax(values):
    best = max(values)
    return {k for k, v in enumerate(values) if v == best}


def top_counts(p: Profile) -> TopCount:
    labels = p.alternatives.labels
    voters = {a: frozenset() for a in labels}
    for i, o in enumerate(p.orders, 1):
        voters[labels[o[0]]] = voters[labels[o[0]]] | {i}
    return TopCount({a: len(v) for a, v in voters.items()}, voters)


def dictatorship(i: int) -> Rule:
    """Voter ``i`` (1-based) always gets their top alternative."""
    if i < 1:
        raise InputError("dictator index must be >= 1")

    def core(orders, tau):
        if i > len(orders):
            raise InputError(f"dictator {i} out of range for n={len(orders)}")
        return _uniform_over({orders[i - 1][0]}, tau)

    return Rule(f"dictator:{i}", core)


def _urd(orders, tau):
    n = len(orders)
    return tuple(Fraction(c, n) for c in _tops(orders, tau))


def uniform_random_dictatorship() -> Rule:
    """Each voter is dictator with probability 1/n: mass of x is n(x, P)/n."""
    return Rule("urd", _urd)


def _plurality(orders, tau):
    return _uniform_over(_argmax(_tops(orders, tau)), tau)


def plurality() -> Rule:
    return Rule("plurality", _plurality)


def borda_scores(orders, tau) -> list[int]:
    """Scores under the vector (tau, tau-1, ..., 1)."""
    scores = [0] * tau
    for o in orders:
        for pos, k in enumerate(o):
            scores[k] += tau - pos
    return scores


def _borda(orders, tau):
    return _uniform_over(_argmax(borda_scores(orders, tau)), tau)


def borda() -> Rule:
    return Rule("borda", _borda)


def condorcet_quota(quota: int | None = None) -> Rule:
    """Uniform over alternatives top-ranked by at least ``quota`` voters.

    ``quota`` defaults to ceil(n/2).  When no alternative reaches the quota the
    rule falls back to uniform mass over the top-count maximisers.
    """
    if quota is not None and quota < 1:
        raise InputError("quota must be >= 1")

    def core(orders, tau):
        q = quota if quota is not None else math.ceil(len(orders) / 2)
        counts = _tops(orders, tau)
        winners = {k for k, c in enumerate(counts) if c >= q}
        return _uniform_over(winners or _argmax(counts), tau)

    return Rule("condorcet" if quota is None else f"condorcet:{quota}", core)


# Reference rules with known defects, used to exercise the axiom checkers.

def uniform_lottery() -> Rule:
    return Rule("uniform", lambda orders, tau: _uniform_over(set(range(tau)), tau))


def anti_plurality() -> Rule:
    """Uniform over the top-count minimisers (violates monotonicity)."""
    def core(orders, tau):
        counts = _tops(orders, tau)
        low = min(counts)
        return _uniform_over({k for k, c in enumerate(counts) if c == low}, tau)

    return Rule("anti-plurality", core)


def fixed_alternative(index: int = 0) -> Rule:
    """Always mass 1 on the carrier's ``index``-th alternative (not neutral)."""
    return Rule(f"fixed:{index}", lambda orders, tau: _uniform_over({min(index, tau - 1)}, tau))


REGISTRY_NAMES = ("urd", "plurality", "borda", "condorcet", "dictator:1")


def get_rule(name: str) -> Rule:
    """Resolve ``urd``, ``dictator:i``, ``plurality``, ``borda`` or ``condorcet[:quota]``."""
    head, _, arg = name.partition(":")
    try:
        if head == "urd" and not arg:
            return uniform_random_dictatorship()
        if head == "plurality" and not arg:
            return plurality()
        if head == "borda" and not arg:
            return borda()
        if head == "condorcet":
            return condorcet_quota(int(arg) if arg else None)
        if head == "dictator" and arg:
            return dictatorship(int(arg))
    except ValueError as exc:
        raise InputError(f"bad rule argument in {name!r}: {exc}") from None
    raise InputError(f"unknown rule {name!r}")
