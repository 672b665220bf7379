"""Exhaustive axiom checkers on bounded domains.

Every checker walks ``tau = 1..tau_max`` and, for each tau, the profiles of
:func:`~stochvote.prefcore.enumerate_profiles` in canonical order.  The first
violation found is returned as a :class:`ViolationWitness` that can be
replayed against the rule.  A pass means "no violation within bounds" and
nothing more.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from stochvote.errors import BoundExceeded, DomainError, InputError
from stochvote.prefcore import (
    DEFAULT_CAP,
    AlternativeSet,
    Lottery,
    Profile,
    apply_alternative_permutation,
    apply_voter_permutation,
    lower_contour,
    monotonic_orders,
    profile_count,
    restrict_profile,
)
from stochvote.rules import Rule

PASS = "pass"
VIOLATION = "violation"
PRECONDITION_FAILED = "precondition_failed"


@dataclass(frozen=True)
class DomainBounds:
    n: int
    tau_max: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("bounds need n >= 2")
        if self.tau_max < 1:
            raise DomainError("bounds need tau_max >= 1")
        total = sum(profile_count(self.n, t) for t in range(1, self.tau_max + 1))
        if total > self.cap:
            raise BoundExceeded(f"profiles for n={self.n}, tau<={self.tau_max}", total, self.cap)

    def taus(self, start: int = 1) -> range:
        return range(start, self.tau_max + 1)

    def as_dict(self) -> dict:
        return {"n": self.n, "tau_max": self.tau_max}


def order_stream(n: int, tau: int):
    """Raw index form of ``enumerate_profiles(n, tau)``, same order."""
    perms = list(itertools.permutations(range(tau)))
    return itertools.product(perms, repeat=n)


def standard_profile(orders, tau) -> Profile:
    return Profile(AlternativeSet.standard(tau), orders)


def restrict_orders(orders, keep) -> tuple:
    """Restrict raw orders to the sorted index list ``keep``, reindexing survivors."""
    reindex = {k: j for j, k in enumerate(keep)}
    return tuple(tuple(reindex[k] for k in o if k in reindex) for o in orders)


# --- witnesses -------------------------------------------------------------

_PREDICATES: dict[str, Callable] = {}


def violation_predicate(tag: str):
    """Register the check that a recorded witness really is a violation."""
    def deco(fn):
        _PREDICATES[tag] = fn
        return fn
    return deco


@dataclass(frozen=True)
class ViolationWitness:
    """Offending profiles, the rule's lotteries on them, and axiom-specific detail."""

    axiom: str
    profiles: tuple
    lotteries: tuple
    detail: dict = field(default_factory=dict)

    def holds(self) -> bool:
        """Whether the recorded data exhibits the violation (no re-evaluation)."""
        return bool(_PREDICATES[self.axiom](self))

    def replay(self, rule: Rule) -> bool:
        """Re-evaluate ``rule`` on the recorded profiles and re-check the violation."""
        if any(rule(p) != lot for p, lot in zip(self.profiles, self.lotteries)):
            return False
        return self.holds()

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "profiles": [{"alternatives": [str(a) for a in p.alternatives.labels],
                          "lines": p.lines()} for p in self.profiles],
            "lotteries": [lot.to_literal() for lot in self.lotteries],
            "detail": _jsonable(self.detail),
        }

    @classmethod
    def from_json(cls, data: dict) -> ViolationWitness:
        profiles = []
        for entry in data["profiles"]:
            alts = AlternativeSet(tuple(entry["alternatives"]))
            profiles.append(Profile.parse("\n".join(entry["lines"]), alts))
        lotteries = tuple(Lottery.parse(p.alternatives, text)
                          for p, text in zip(profiles, data["lotteries"]))
        return cls(data["axiom"], tuple(profiles), lotteries, _from_jsonable(data["detail"]))


def _jsonable(value):
    if isinstance(value, Fraction):
        return {"q": str(value)}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=str) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    return value


def _from_jsonable(value):
    if isinstance(value, dict):
        if set(value) == {"q"}:
            return Fraction(value["q"])
        return {k: _from_jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_from_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class CheckResult:
    axiom: str
    rule: str
    bounds: DomainBounds
    status: str
    witness: ViolationWitness | None = None
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "rule": self.rule, "bounds": self.bounds.as_dict(),
               "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.info:
            out["info"] = _jsonable(self.info)
        return out


def _violation(axiom, rule, bounds, profiles, detail, info=None) -> CheckResult:
    w = ViolationWitness(axiom, tuple(profiles), tuple(rule(p) for p in profiles), detail)
    return CheckResult(axiom, rule.name, bounds, VIOLATION, w, info or {})


def _pass(axiom, rule, bounds, **info) -> CheckResult:
    return CheckResult(axiom, rule.name, bounds, PASS, None, info)


# --- checkers --------------------------------------------------------------

def check_anonymity(rule: Rule, b: DomainBounds) -> CheckResult:
    """sigma(P) = sigma(piP) for every profile and voter permutation."""
    perms = list(itertools.permutations(range(b.n)))[1:]
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            base = rule.masses(orders, tau)
            for pi in perms:
                permuted = tuple(orders[j] for j in pi)
                if rule.masses(permuted, tau) != base:
                    p = standard_profile(orders, tau)
                    perm = [j + 1 for j in pi]
                    return _violation("anonymity", rule, b,
                                      [p, apply_voter_permutation(p, perm)], {"perm": perm})
    return _pass("anonymity", rule, b)


@violation_predicate("anonymity")
def _anonymity_broken(w):
    p, q = w.profiles
    return apply_voter_permutation(p, w.detail["perm"]) == q and w.lotteries[0] != w.lotteries[1]


def check_optimality(rule: Rule, b: DomainBounds) -> CheckResult:
    """Unanimously dominated alternatives get zero mass."""
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for x, y in itertools.permutations(range(tau), 2):
                if masses[y] != 0 and all(o.index(x) < o.index(y) for o in orders):
                    labels = AlternativeSet.standard(tau).labels
                    return _violation("optimality", rule, b, [standard_profile(orders, tau)],
                                      {"dominant": labels[x], "dominated": labels[y]})
    return _pass("optimality", rule, b)


@violation_predicate("optimality")
def _optimality_broken(w):
    (p,), (lot,) = w.profiles, w.lotteries
    x, y = w.detail["dominant"], w.detail["dominated"]
    return all(r.index(x) < r.index(y) for r in p.rankings()) and lot[y] != 0


def check_monotonicity(rule: Rule, b: DomainBounds) -> CheckResult:
    """mass_P(x) <= mass_Q(x) for every Q whose lower contour sets at x contain P's."""
    for tau in b.taus(2):
        table = {}
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for x in range(tau):
                per_voter = []
                for o in orders:
                    key = (o, x)
                    if key not in table:
                        table[key] = monotonic_orders(o, x)
                    per_voter.append(table[key])
                for q in itertools.product(*per_voter):
                    if rule.masses(q, tau)[x] < masses[x]:
                        labels = AlternativeSet.standard(tau).labels
                        return _violation("monotonicity", rule, b,
                                          [standard_profile(orders, tau), standard_profile(q, tau)],
                                          {"x": labels[x]})
    return _pass("monotonicity", rule, b)


@violation_predicate("monotonicity")
def _monotonicity_broken(w):
    p, q = w.profiles
    x = w.detail["x"]
    grows = all(lower_contour(p, i, x) <= lower_contour(q, i, x) for i in range(1, p.n + 1))
    return grows and w.lotteries[0][x] > w.lotteries[1][x]


def check_neutrality(rule: Rule, b: DomainBounds) -> CheckResult:
    """mass_P(x) = mass_muP(mu(x)) for every alternative permutation mu."""
    for tau in b.taus(2):
        perms = list(itertools.permutations(range(tau)))[1:]
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for mu in perms:
                moved = rule.masses(tuple(tuple(mu[k] for k in o) for o in orders), tau)
                for x in range(tau):
                    if masses[x] != moved[mu[x]]:
                        labels = AlternativeSet.standard(tau).labels
                        p = standard_profile(orders, tau)
                        mapping = {labels[k]: labels[mu[k]] for k in range(tau)}
                        return _violation("neutrality", rule, b,
                                          [p, apply_alternative_permutation(p, mapping)],
                                          {"mu": mapping, "x": labels[x]})
    return _pass("neutrality", rule, b)


@violation_predicate("neutrality")
def _neutrality_broken(w):
    p, q = w.profiles
    mu, x = w.detail["mu"], w.detail["x"]
    return apply_alternative_permutation(p, mu) == q and w.lotteries[0][x] != w.lotteries[1][mu[x]]


def check_determinism(rule: Rule, b: DomainBounds) -> CheckResult:
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            if 1 not in rule.masses(orders, tau):
                return _violation("determinism", rule, b, [standard_profile(orders, tau)], {})
    return _pass("determinism", rule, b)


@violation_predicate("determinism")
def _determinism_broken(w):
    return not w.lotteries[0].is_degenerate


def check_dictatorial(rule: Rule, b: DomainBounds) -> CheckResult:
    """Pass with ``info['dictator']`` if one voter's top always gets mass 1.

    On failure the witness holds, for each voter, the first profile where
    that voter's top does not get mass 1.
    """
    remaining = set(range(b.n))
    ruled_out = {}
    for tau in b.taus():
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for i in sorted(remaining):
                if masses[orders[i][0]] != 1:
                    remaining.discard(i)
                    ruled_out[i + 1] = standard_profile(orders, tau)
            if not remaining:
                voters = sorted(ruled_out)
                return _violation("dictatorial", rule, b, [ruled_out[i] for i in voters],
                                  {"voters": voters})
    return _pass("dictatorial", rule, b, dictator=min(remaining) + 1)


@violation_predicate("dictatorial")
def _dictatorial_broken(w):
    voters = w.detail["voters"]
    n = w.profiles[0].n
    return (sorted(voters) == list(range(1, n + 1))
            and all(lot[p.top(i)] != 1 for i, p, lot in zip(voters, w.profiles, w.lotteries)))


def check_iia(rule: Rule, b: DomainBounds) -> CheckResult:
    """Removing zero-mass alternatives leaves the survivors' masses unchanged."""
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            zero = [k for k in range(tau) if masses[k] == 0]
            for size in range(1, len(zero) + 1):
                for removed in itertools.combinations(zero, size):
                    keep = [k for k in range(tau) if k not in removed]
                    after = rule.masses(restrict_orders(orders, keep), len(keep))
                    if tuple(masses[k] for k in keep) != after:
                        return _restriction_witness("iia", rule, b, orders, tau, removed)
    return _pass("iia", rule, b)


def _restriction_witness(axiom, rule, b, orders, tau, removed, x=None):
    labels = AlternativeSet.standard(tau).labels
    p = standard_profile(orders, tau)
    gone = [labels[k] for k in removed]
    detail = {"removed": gone}
    if x is not None:
        detail["x"] = labels[x]
    return _violation(axiom, rule, b, [p, restrict_profile(p, gone)], detail)


@violation_predicate("iia")
def _iia_broken(w):
    p, q = w.profiles
    removed = w.detail["removed"]
    if restrict_profile(p, removed) != q or set(removed) & set(w.lotteries[0].support):
        return False
    return w.lotteries[0].restricted(q.alternatives) != w.lotteries[1].as_dict()


def check_regularity(rule: Rule, b: DomainBounds) -> CheckResult:
    """Removing alternatives never lowers a survivor's mass."""
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for size in range(1, tau):
                for removed in itertools.combinations(range(tau), size):
                    keep = [k for k in range(tau) if k not in removed]
                    after = rule.masses(restrict_orders(orders, keep), len(keep))
                    for j, k in enumerate(keep):
                        if masses[k] > after[j]:
                            return _restriction_witness("regularity", rule, b, orders, tau,
                                                        removed, x=k)
    return _pass("regularity", rule, b)


@violation_predicate("regularity")
def _regularity_broken(w):
    p, q = w.profiles
    x = w.detail["x"]
    return restrict_profile(p, w.detail["removed"]) == q and w.lotteries[0][x] > w.lotteries[1][x]


AXIOM_CHECKS = {
    "anonymity": check_anonymity,
    "optimality": check_optimality,
    "monotonicity": check_monotonicity,
    "neutrality": check_neutrality,
    "determinism": check_determinism,
    "dictatorial": check_dictatorial,
    "iia": check_iia,
    "regularity": check_regularity,
}


# determinism and dictatorial classify a rule rather than constrain it; opt-in only
STANDARD_AXIOMS = ("anonymity", "optimality", "monotonicity", "neutrality", "iia", "regularity")


def check_axioms(rule: Rule, b: DomainBounds, axioms=None) -> dict[str, CheckResult]:
    names = list(STANDARD_AXIOMS if axioms is None else axioms)
    unknown = [a for a in names if a not in AXIOM_CHECKS]
    if unknown:
        raise InputError(f"unknown axioms: {unknown}")
    return {a: AXIOM_CHECKS[a](rule, b) for a in names}
