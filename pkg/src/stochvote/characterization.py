"""Coalition power function alpha and diagnostics for equality with the
uniform random dictatorship.

``alpha(x, C, y)`` is the mass a rule gives ``x`` at a two-bloc profile:
voters in ``C`` rank ``x`` first, every other voter ranks ``y`` first and
``x`` second.  Positions below the constrained ones come from a *filler*
ranking (default: ascending label order).  For optimal and regular rules
alpha depends only on ``C``; the checks below test that, its additivity, and
that the rule's mass at any profile equals alpha of the top-voter coalition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from stochvote.axioms import (
    PRECONDITION_FAILED,
    CheckResult,
    DomainBounds,
    ViolationWitness,
    _pass,
    check_anonymity,
    check_iia,
    check_monotonicity,
    check_neutrality,
    check_optimality,
    check_regularity,
    order_stream,
    standard_profile,
    violation_predicate,
)
from stochvote.errors import BoundExceeded, DomainError, InputError
from stochvote.prefcore import AlternativeSet, Profile
from stochvote.rules import Rule, uniform_random_dictatorship

ALPHA_MAX_N = 6


def coalitions(n: int):
    """All subsets of 1..n, by size then lexicographically."""
    voters = range(1, n + 1)
    for size in range(n + 1):
        for c in itertools.combinations(voters, size):
            yield frozenset(c)


def _coalition_str(c) -> str:
    return "{" + ",".join(str(i) for i in sorted(c)) + "}"


def alpha_profile(x, coalition, y, tau: int, n: int, filler=None) -> Profile:
    """The constrained profile over ``a1..a_tau`` for ``(x, C, y)``."""
    alts = AlternativeSet.standard(tau)
    if tau < 2:
        raise DomainError("alpha needs tau >= 2")
    if x == y:
        raise DomainError("alpha needs x != y")
    coalition = frozenset(coalition)
    if not coalition <= set(range(1, n + 1)):
        raise InputError(f"coalition {sorted(coalition)} not within voters 1..{n}")
    filler = list(alts.labels) if filler is None else list(filler)
    if sorted(filler) != sorted(alts.labels):
        raise InputError("filler must rank every alternative exactly once")
    alts.index(x), alts.index(y)
    rankings = []
    for i in range(1, n + 1):
        head = [x] if i in coalition else [y, x]
        rankings.append(head + [a for a in filler if a not in head])
    return Profile.from_rankings(rankings, alts)


def alpha_instance(rule: Rule, x, coalition, y, tau: int, n: int, filler=None) -> Fraction:
    """Mass of ``x`` at the two-bloc profile for ``(x, C, y)``."""
    return rule(alpha_profile(x, coalition, y, tau, n, filler))[x]


def _is_alpha_profile(p: Profile, x, coalition, y) -> bool:
    coalition = set(coalition)
    for i, r in enumerate(p.rankings(), 1):
        if i in coalition:
            if r[0] != x:
                return False
        elif r[:2] != (y, x):
            return False
    return True


def _constrained_profiles(x, coalition, y, tau, n):
    """Every profile over ``a1..a_tau`` meeting the two-bloc constraints."""
    alts = AlternativeSet.standard(tau)
    per_voter = []
    for i in range(1, n + 1):
        head = [x] if i in coalition else [y, x]
        rest = [a for a in alts.labels if a not in head]
        per_voter.append([tuple(head) + tail for tail in itertools.permutations(rest)])
    for rankings in itertools.product(*per_voter):
        yield Profile.from_rankings(rankings, alts)


@dataclass(frozen=True)
class AlphaTable:
    n: int
    values: dict
    provenance: dict = field(default_factory=dict)

    def __getitem__(self, coalition) -> Fraction:
        return self.values[frozenset(coalition)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": {_coalition_str(c): str(v) for c, v in self.values.items()},
            "provenance": {_coalition_str(c): prov for c, prov in self.provenance.items()},
        }


def alpha_table(rule: Rule, n: int, tau: int = 2, x="a1", y="a2") -> AlphaTable:
    if n > ALPHA_MAX_N:
        raise BoundExceeded("alpha sweep voters", n, ALPHA_MAX_N)
    values, provenance = {}, {}
    for c in coalitions(n):
        p = alpha_profile(x, c, y, tau, n)
        values[c] = rule(p)[x]
        provenance[c] = {"x": x, "y": y, "tau": tau, "coalition": sorted(c), "profile": p.lines()}
    return AlphaTable(n, values, provenance)


# --- hypothesis gate -------------------------------------------------------

def _hypotheses(rule, b, check_name):
    """Optimality and regularity on ``b``; returns a precondition report or None.

    The alpha checks are conditional on these two axioms.  Pass
    ``check_hypotheses=False`` to a check to run its sweep regardless.
    """
    _n_guard(b)
    failed = [res for res in (check_optimality(rule, b), check_regularity(rule, b)) if not res]
    if not failed:
        return None
    return CheckResult(check_name, rule.name, b, PRECONDITION_FAILED, failed[0].witness,
                       {"failed_hypotheses": [r.axiom for r in failed]})


def _n_guard(b):
    if b.n > ALPHA_MAX_N:
        raise BoundExceeded("alpha sweep voters", b.n, ALPHA_MAX_N)


def _alpha_violation(tag, rule, b, profiles, detail):
    w = ViolationWitness(tag, tuple(profiles), tuple(rule(p) for p in profiles), detail)
    return CheckResult(tag, rule.name, b, "violation", w)


# --- coalition-power checks -----------------------------------------------

def check_alpha_well_defined(rule: Rule, b: DomainBounds,
                             check_hypotheses: bool = True) -> CheckResult:
    """alpha(x, C, y) is the same for every tau, filler and below-top arrangement,
    and alpha(x, C, y) = 1 - alpha(y, N - C, x)."""
    gate = _hypotheses(rule, b, "alpha_well_defined") if check_hypotheses else _n_guard(b)
    if gate is not None:
        return gate
    voters = frozenset(range(1, b.n + 1))
    seen = {}
    for tau in b.taus(2):
        labels = AlternativeSet.standard(tau).labels
        for x, y in itertools.permutations(labels, 2):
            for c in coalitions(b.n):
                for p in _constrained_profiles(x, c, y, tau, b.n):
                    key = (x, c, y)
                    value = rule(p)[x]
                    if key not in seen:
                        seen[key] = (value, p)
                    elif seen[key][0] != value:
                        return _alpha_violation("alpha_well_defined", rule, b, [seen[key][1], p],
                                                {"x": x, "y": y, "coalition": sorted(c)})
    for (x, c, y), (value, p) in seen.items():
        other, q = seen[(y, voters - c, x)]
        if value + other != 1:
            return _alpha_violation("alpha_complement", rule, b, [p, q],
                                    {"x": x, "y": y, "coalition": sorted(c)})
    return _pass("alpha_well_defined", rule, b, instances=len(seen))


@violation_predicate("alpha_well_defined")
def _alpha_not_well_defined(w):
    p, q = w.profiles
    x, y, c = w.detail["x"], w.detail["y"], w.detail["coalition"]
    return (_is_alpha_profile(p, x, c, y) and _is_alpha_profile(q, x, c, y)
            and w.lotteries[0][x] != w.lotteries[1][x])


@violation_predicate("alpha_complement")
def _alpha_complement_broken(w):
    p, q = w.profiles
    x, y, c = w.detail["x"], w.detail["y"], set(w.detail["coalition"])
    rest = set(range(1, p.n + 1)) - c
    return (_is_alpha_profile(p, x, c, y) and _is_alpha_profile(q, y, rest, x)
            and w.lotteries[0][x] + w.lotteries[1][y] != 1)


def check_alpha_label_invariance(rule: Rule, b: DomainBounds,
                                 check_hypotheses: bool = True) -> CheckResult:
    """alpha(x, C, y) does not depend on which labels play x and y."""
    gate = _hypotheses(rule, b, "alpha_label_invariance") if check_hypotheses else _n_guard(b)
    if gate is not None:
        return gate
    for tau in b.taus(2):
        labels = AlternativeSet.standard(tau).labels
        for c in coalitions(b.n):
            first = None
            for x, y in itertools.permutations(labels, 2):
                p = alpha_profile(x, c, y, tau, b.n)
                value = rule(p)[x]
                if first is None:
                    first = (value, p, x, y)
                elif value != first[0]:
                    return _alpha_violation("alpha_label_invariance", rule, b, [first[1], p],
                                            {"coalition": sorted(c),
                                             "pairs": [[first[2], first[3]], [x, y]]})
    return _pass("alpha_label_invariance", rule, b)


@violation_predicate("alpha_label_invariance")
def _alpha_label_dependent(w):
    (x1, y1), (x2, y2) = w.detail["pairs"]
    c = w.detail["coalition"]
    p, q = w.profiles
    return (_is_alpha_profile(p, x1, c, y1) and _is_alpha_profile(q, x2, c, y2)
            and w.lotteries[0][x1] != w.lotteries[1][x2])


def _three_bloc_profile(d, e, n) -> Profile:
    rankings = []
    for i in range(1, n + 1):
        if i in d:
            rankings.append(("a1", "a2", "a3"))
        elif i in e:
            rankings.append(("a2", "a3", "a1"))
        else:
            rankings.append(("a3", "a1", "a2"))
    return Profile.from_rankings(rankings, AlternativeSet.standard(3))


def check_alpha_additive_normalized(rule: Rule, b: DomainBounds,
                                    check_hypotheses: bool = True) -> CheckResult:
    """alpha(D) + alpha(E) = alpha(D | E) for disjoint D, E, read off the three-bloc
    profile, and alpha(N) = sum of alpha({i}) = 1."""
    gate = _hypotheses(rule, b, "alpha_additive_normalized") if check_hypotheses else _n_guard(b)
    if gate is not None:
        return gate
    if b.tau_max < 3:
        return CheckResult("alpha_additive_normalized", rule.name, b, PRECONDITION_FAILED,
                           None, {"reason": "needs tau_max >= 3"})
    n = b.n
    voters = frozenset(range(1, n + 1))
    table = alpha_table(rule, n)
    for d in coalitions(n):
        for e in coalitions(n):
            if d & e:
                continue
            rest = voters - d - e
            p = _three_bloc_profile(d, e, n)
            lot = rule(p)
            ok = (lot["a1"] == table[d] and lot["a2"] == table[e] and lot["a3"] == table[rest]
                  and table[d] + table[e] == table[d | e])
            if not ok:
                profiles = [p] + [alpha_profile("a1", c, "a2", 2, n) for c in (d, e, d | e, rest)]
                return _alpha_violation("alpha_additivity", rule, b, profiles,
                                        {"D": sorted(d), "E": sorted(e)})
    singles = [frozenset({i}) for i in range(1, n + 1)]
    if table[voters] != 1 or sum(table[s] for s in singles) != 1:
        profiles = [alpha_profile("a1", c, "a2", 2, n) for c in [voters] + singles]
        return _alpha_violation("alpha_normalization", rule, b, profiles, {})
    return _pass("alpha_additive_normalized", rule, b,
                 alpha={_coalition_str(c): v for c, v in table.values.items()})


@violation_predicate("alpha_additivity")
def _alpha_not_additive(w):
    d, e = set(w.detail["D"]), set(w.detail["E"])
    p, pd, pe, pde, prest = w.profiles
    n = p.n
    rest = set(range(1, n + 1)) - d - e
    if p != _three_bloc_profile(d, e, n):
        return False
    if not all(_is_alpha_profile(q, "a1", c, "a2")
               for q, c in zip((pd, pe, pde, prest), (d, e, d | e, rest))):
        return False
    lot, ad, ae, ade, arest = w.lotteries
    return not (lot["a1"] == ad["a1"] and lot["a2"] == ae["a1"] and lot["a3"] == arest["a1"]
                and ad["a1"] + ae["a1"] == ade["a1"])


@violation_predicate("alpha_normalization")
def _alpha_not_normalized(w):
    n = w.profiles[0].n
    if not _is_alpha_profile(w.profiles[0], "a1", range(1, n + 1), "a2"):
        return False
    whole = w.lotteries[0]["a1"]
    singles = sum(lot["a1"] for lot in w.lotteries[1:])
    return whole != 1 or singles != 1


def check_top_coalition_mass(rule: Rule, b: DomainBounds,
                    check_hypotheses: bool = True) -> CheckResult:
    """At every profile, mass of x equals alpha of the coalition ranking x first.

    tau = 1 is a vacuous pass.
    """
    gate = _hypotheses(rule, b, "top_coalition_mass") if check_hypotheses else _n_guard(b)
    if gate is not None:
        return gate
    table = alpha_table(rule, b.n)
    for tau in b.taus(2):
        labels = AlternativeSet.standard(tau).labels
        for orders in order_stream(b.n, tau):
            masses = rule.masses(orders, tau)
            for k in range(tau):
                c = frozenset(i for i, o in enumerate(orders, 1) if o[0] == k)
                if masses[k] != table[c]:
                    p = standard_profile(orders, tau)
                    return _alpha_violation("top_coalition_mass", rule, b,
                                            [p, alpha_profile("a1", c, "a2", 2, b.n)],
                                            {"x": labels[k], "coalition": sorted(c)})
    return _pass("top_coalition_mass", rule, b)


@violation_predicate("top_coalition_mass")
def _top_coalition_mass_broken(w):
    p, q = w.profiles
    x, c = w.detail["x"], set(w.detail["coalition"])
    tops = {i for i in range(1, p.n + 1) if p.top(i) == x}
    return tops == c and _is_alpha_profile(q, "a1", c, "a2") and w.lotteries[0][x] != w.lotteries[1]["a1"]


def augmented_profile(p: Profile, x) -> Profile:
    """Add a fresh alternative ranked first by voters not ranking ``x`` first
    and second by those who do."""
    new = f"a{p.tau + 1}"
    while new in p.alternatives:
        new += "'"
    alts = AlternativeSet(p.alternatives.labels + (new,))
    rankings = []
    for r in p.rankings():
        rankings.append((r[0], new) + r[1:] if r[0] == x else (new,) + r)
    return Profile.from_rankings(rankings, alts)


def check_alpha_lower_bound(rule: Rule, b: DomainBounds,
                            check_hypotheses: bool = True) -> CheckResult:
    """mass_P(x) >= alpha(N(x, P)), together with mass_P(x) >= mass(x) on the
    profile augmented by one alternative (the regularity step behind it)."""
    gate = _hypotheses(rule, b, "alpha_lower_bound") if check_hypotheses else _n_guard(b)
    if gate is not None:
        return gate
    table = alpha_table(rule, b.n)
    for tau in b.taus(2):
        for orders in order_stream(b.n, tau):
            p = standard_profile(orders, tau)
            lot = rule(p)
            for x in p.alternatives:
                c = frozenset(i for i in range(1, p.n + 1) if p.top(i) == x)
                aug = augmented_profile(p, x)
                if lot[x] < table[c] or lot[x] < rule(aug)[x]:
                    return _alpha_violation("alpha_lower_bound", rule, b,
                                            [p, aug, alpha_profile("a1", c, "a2", 2, b.n)],
                                            {"x": x, "coalition": sorted(c)})
    return _pass("alpha_lower_bound", rule, b)


@violation_predicate("alpha_lower_bound")
def _alpha_lower_bound_broken(w):
    p, aug, q = w.profiles
    x, c = w.detail["x"], set(w.detail["coalition"])
    if aug != augmented_profile(p, x) or not _is_alpha_profile(q, "a1", c, "a2"):
        return False
    base, up, alpha = w.lotteries
    return base[x] < alpha["a1"] or base[x] < up[x]


def check_equals_urd(rule: Rule, b: DomainBounds) -> CheckResult:
    """The rule's lottery equals top-count / n on every bounded profile."""
    urd = uniform_random_dictatorship()
    for tau in b.taus():
        for orders in order_stream(b.n, tau):
            if rule.masses(orders, tau) != urd.masses(orders, tau):
                return _alpha_violation("equals_urd", rule, b, [standard_profile(orders, tau)], {})
    return _pass("equals_urd", rule, b)


@violation_predicate("equals_urd")
def _differs_from_urd(w):
    (p,), (lot,) = w.profiles, w.lotteries
    return lot != uniform_random_dictatorship()(p)


ALPHA_CHECKS = {
    "alpha_well_defined": check_alpha_well_defined,
    "alpha_label_invariance": check_alpha_label_invariance,
    "alpha_additive_normalized": check_alpha_additive_normalized,
    "top_coalition_mass": check_top_coalition_mass,
    "alpha_lower_bound": check_alpha_lower_bound,
}


def characterize(rule: Rule, b: DomainBounds) -> dict:
    """Run the axioms, the alpha chain and the equality check, and report the
    instance-wise verdicts.

    ``characterization_consistent`` is false only if the rule passes anonymity,
    optimality, monotonicity and IIA yet differs from the uniform random
    dictatorship within bounds.
    """
    axioms = {
        "anonymity": check_anonymity(rule, b),
        "optimality": check_optimality(rule, b),
        "monotonicity": check_monotonicity(rule, b),
        "neutrality": check_neutrality(rule, b),
        "iia": check_iia(rule, b),
        "regularity": check_regularity(rule, b),
    }
    alpha = {name: fn(rule, b) for name, fn in ALPHA_CHECKS.items()}
    if b.tau_max < 3:
        del alpha["alpha_additive_normalized"]
    equals = check_equals_urd(rule, b)
    premises = all(axioms[a].passed for a in ("anonymity", "optimality", "monotonicity", "iia"))
    omi = all(axioms[a].passed for a in ("optimality", "monotonicity", "iia"))
    chain_ok = all(r.status != "violation" for r in alpha.values())
    return {
        "rule": rule.name,
        "bounds": b.as_dict(),
        "axioms": {k: v.to_json() for k, v in axioms.items()},
        "alpha": {k: v.to_json() for k, v in alpha.items()},
        "equals_urd": equals.to_json(),
        "verdict": {
            "characterization_premises": premises,
            "equals_urd": equals.passed,
            "characterization_consistent": (not premises) or equals.passed,
            "regularity_implied_consistent": (not omi) or axioms["regularity"].passed,
            "alpha_chain_consistent": chain_ok,
        },
    }
