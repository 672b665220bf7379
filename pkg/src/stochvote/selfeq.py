"""Self-equivalence: induced weak profiles over rule sets, compatible profiles,
decompositions, refutation certificates and the uniform-random-dictatorship
witness.

Deterministic neutral rules are represented by :class:`DetRuleHandle`.  A
dictator handle is fully evaluable; an opaque handle is known only through
its choices at the base profiles under test, which is all the agreement
condition at a fixed base profile ever looks at.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from stochvote.axioms import (
    CheckResult,
    DomainBounds,
    ViolationWitness,
    _pass,
    order_stream,
    standard_profile,
    violation_predicate,
)
from stochvote.errors import BoundExceeded, InputError, UnsupportedCase
from stochvote.prefcore import (
    DEFAULT_CAP,
    AlternativeSet,
    Lottery,
    Profile,
    WeakOrder,
    WeakProfile,
    linear_extensions,
    natural_key,
)
from stochvote.rules import Rule, borda_scores, top_counts, uniform_random_dictatorship

SCHEMA = "stochvote.certificate/1"


@dataclass(frozen=True, eq=False)
class DetRuleHandle:
    id: str
    kind: str
    voter: int | None = None
    choices: Mapping = field(default_factory=dict)
    chooser: Callable | None = field(default=None, repr=False)

    @classmethod
    def dictator(cls, i: int) -> DetRuleHandle:
        if i < 1:
            raise InputError("dictator index must be >= 1")
        return cls(f"d{i}", "dictator", voter=i)

    @classmethod
    def opaque(cls, id: str, choices: Mapping | None = None,
               chooser: Callable | None = None) -> DetRuleHandle:
        """A handle known by its ``choices`` at given profiles, or through ``chooser``."""
        return cls(str(id), "opaque", choices=dict(choices or {}), chooser=chooser)

    def choice_at(self, p: Profile):
        if self.kind == "dictator":
            if self.voter > p.n:
                raise InputError(f"{self.id}: voter {self.voter} out of range for n={p.n}")
            return p.top(self.voter)
        if p in self.choices:
            choice = self.choices[p]
        elif self.chooser is not None:
            choice = self.chooser(p)
        else:
            raise InputError(f"handle {self.id!r} has no choice recorded at profile {p}")
        if choice not in p.alternatives:
            raise InputError(f"handle {self.id!r} chooses {choice!r}, not an alternative")
        return choice

    def describe(self, p: Profile) -> dict:
        out = {"id": self.id, "kind": self.kind, "choice": str(self.choice_at(p))}
        if self.voter is not None:
            out["voter"] = self.voter
        return out


@dataclass(frozen=True)
class RuleSetT:
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) < 2:
            raise InputError("a rule set needs at least two members")
        ids = [h.id for h in members]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate handle ids in {ids}")
        object.__setattr__(self, "members", members)

    @property
    def carrier(self) -> AlternativeSet:
        """Handle ids in canonical (natural) id order."""
        return AlternativeSet(tuple(sorted((h.id for h in self.members), key=natural_key)))

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def induced_weak_profile(t: RuleSetT, p: Profile) -> WeakProfile:
    """Group handles by chosen alternative, ordered by each voter's ranking."""
    carrier = t.carrier
    by_choice = {}
    for h in t:
        by_choice.setdefault(h.choice_at(p), []).append(h.id)
    for ids in by_choice.values():
        ids.sort(key=carrier.index)
    orders = []
    for ranking in p.rankings():
        orders.append(WeakOrder(tuple(tuple(by_choice[a]) for a in ranking if a in by_choice)))
    return WeakProfile(carrier, tuple(orders))


def compatible_profiles(t: RuleSetT, p: Profile, cap: int = DEFAULT_CAP) -> Iterator[Profile]:
    """All strict profiles over ``t`` refining the induced weak profile."""
    weak = induced_weak_profile(t, p)
    count = weak.extension_count()
    if count > cap:
        raise BoundExceeded("compatible profiles", count, cap)
    return _compatible_stream(weak)


def _compatible_stream(weak: WeakProfile):
    per_voter = [list(linear_extensions(w)) for w in weak.orders]
    for rankings in itertools.product(*per_voter):
        yield Profile.from_rankings(rankings, weak.alternatives)


# --- decompositions --------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """A finite lottery over deterministic neutral rule handles."""

    mass: tuple  # pairs (handle, Fraction)

    def __post_init__(self):
        pairs = tuple((h, Fraction(m)) for h, m in self.mass)
        if not pairs:
            raise InputError("empty decomposition")
        if any(m <= 0 for _, m in pairs):
            raise InputError("decomposition masses must be positive")
        if sum(m for _, m in pairs) != 1:
            raise InputError("decomposition masses must sum to 1")
        ids = [h.id for h, _ in pairs]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate handle ids in decomposition")
        object.__setattr__(self, "mass", pairs)

    @classmethod
    def uniform_dictators(cls, n: int) -> Decomposition:
        return cls(tuple((DetRuleHandle.dictator(i), Fraction(1, n)) for i in range(1, n + 1)))

    @property
    def support(self) -> tuple:
        return tuple(h for h, _ in self.mass)

    def combination(self, p: Profile) -> Lottery:
        """The pointwise convex combination of the handles at ``p``."""
        acc = dict.fromkeys(p.alternatives.labels, Fraction(0))
        for h, m in self.mass:
            acc[h.choice_at(p)] += m
        return Lottery.from_mapping(p.alternatives, acc)


def _bounded_profiles(b: DomainBounds):
    for tau in b.taus():
        for orders in order_stream(b.n, tau):
            yield standard_profile(orders, tau)


def check_decomposition(rule: Rule, d: Decomposition, b: DomainBounds,
                        profiles: Iterable[Profile] | None = None) -> CheckResult:
    """Pass iff the rule equals the decomposition's combination on every bounded
    profile, or on ``profiles`` when given."""
    for p in _bounded_profiles(b) if profiles is None else profiles:
        combined = d.combination(p)
        lot = rule(p)
        if combined != lot:
            detail = {"decomposition": {h.id: {"mass": m, "choice": h.choice_at(p),
                                               "kind": h.kind, "voter": h.voter}
                                        for h, m in d.mass}}
            w = ViolationWitness("decomposition", (p,), (lot,), detail)
            return CheckResult("decomposition", rule.name, b, "violation", w)
    return _pass("decomposition", rule, b)


@violation_predicate("decomposition")
def _decomposition_broken(w):
    (p,), (lot,) = w.profiles, w.lotteries
    acc = dict.fromkeys(p.alternatives.labels, Fraction(0))
    for entry in w.detail["decomposition"].values():
        if entry.get("kind") == "dictator" and p.top(entry["voter"]) != entry["choice"]:
            return False
        acc[entry["choice"]] += Fraction(entry["mass"])
    return acc != lot.as_dict()


# --- refutation ------------------------------------------------------------

@dataclass(frozen=True)
class CompatibleRecord:
    profile: Profile
    lottery: Lottery
    violation: str | None
    scores: dict | None = None

    @property
    def rival_mass(self) -> Fraction:
        return self.lottery["rival"]


@dataclass(frozen=True)
class RefutationBlock:
    """All compatible profiles for one support size ``k``."""

    k: int
    rule_set: RuleSetT
    weak_profile: WeakProfile
    records: tuple

    @property
    def t(self) -> int:
        return self.k + 1

    @property
    def expected_count(self) -> int:
        return self.weak_profile.extension_count()

    @property
    def refuted(self) -> bool:
        return (len(self.records) == self.expected_count
                and all(r.violation is not None for r in self.records))

    @property
    def rival_masses(self) -> list:
        return sorted({r.rival_mass for r in self.records})


@dataclass(frozen=True)
class RefutationCertificate:
    rule: str
    base_profile: Profile
    outcome: object
    rival: object
    blocks: tuple

    @property
    def refuted(self) -> bool:
        return bool(self.blocks) and all(b.refuted for b in self.blocks)

    def to_json(self) -> dict:
        p = self.base_profile
        return {
            "schema": SCHEMA,
            "kind": "refutation",
            "rule": self.rule,
            "base_profile": {"alternatives": [str(a) for a in p.alternatives.labels],
                             "lines": p.lines()},
            "outcome": str(self.outcome),
            "rival": str(self.rival),
            "support_sizes": [b.k for b in self.blocks],
            "refuted": self.refuted,
            "blocks": [_block_json(b, p, self.rule) for b in self.blocks],
        }


def _block_json(block: RefutationBlock, base: Profile, rule_name: str) -> dict:
    out = {
        "k": block.k,
        "t": block.t,
        "rule_set": [h.describe(base) for h in block.rule_set],
        "weak_profile": [str(w) for w in block.weak_profile.orders],
        "expected_count": block.expected_count,
        "count": len(block.records),
        "refuted": block.refuted,
        "all_rival_positive": all(r.rival_mass > 0 for r in block.records),
        "rival_masses": [str(m) for m in block.rival_masses],
        "records": [],
    }
    if rule_name == "borda":
        out["borda"] = borda_summary(block, base)
    for r in block.records:
        tc = top_counts(r.profile)
        rec = {"lines": r.profile.lines(), "lottery": r.lottery.to_literal(),
               "rival_mass": str(r.rival_mass), "rival_top_count": tc["rival"],
               "violation": r.violation}
        if r.scores is not None:
            rec["scores"] = r.scores
        out["records"].append(rec)
    return out


def borda_summary(block: RefutationBlock, base: Profile) -> dict:
    """Rival score and score total, observed and by formula.

    In every compatible profile the rival sits either first (score t) or last
    (score 1), so its score is ``a*t + (n - a)`` where ``a`` counts voters
    ranking the rival's choice above the common choice of the support.
    """
    t, n = block.t, base.n
    rival_choice = next(h for h in block.rule_set if h.id == "rival").choice_at(base)
    y = next(h for h in block.rule_set if h.id != "rival").choice_at(base)
    a = sum(1 for r in base.rankings() if r.index(rival_choice) < r.index(y))
    kappas = sorted({r.scores["rival"] for r in block.records})
    lambdas = sorted({sum(r.scores.values()) for r in block.records})
    kappa_formula = a * t + (n - a)
    lambda_formula = Fraction(n * (t * t + t), 2)
    return {
        "kappa_rival": kappas,
        "lambda": lambdas,
        "kappa_formula": kappa_formula,
        "lambda_formula": str(lambda_formula),
        "share": [str(Fraction(k, total)) for k in kappas for total in lambdas],
        "matches_formula": kappas == [kappa_formula] and lambdas == [lambda_formula],
    }


def _violation_kind(lot: Lottery, support_ids) -> str | None:
    """How the lottery misses every decomposition supported exactly on ``support_ids``."""
    if lot["rival"] > 0:
        return "rival_positive"
    if any(lot[s] == 0 for s in support_ids):
        return "support_null"
    return None


def refute_self_equivalence_degenerate(rule: Rule, p: Profile, rival_choice,
                                       support_sizes: Iterable[int] = (1, 2, 3),
                                       cap: int = DEFAULT_CAP) -> RefutationCertificate:
    """Certify that no decomposition of support size k agrees with ``rule`` on
    any compatible profile, for each requested k.

    ``rule(p)`` must be degenerate at some ``y``; every support handle must
    then choose ``y`` at ``p``.  The rule set is a rival choosing
    ``rival_choice`` plus k interchangeable ``y``-choosers.  A compatible
    profile fails the agreement condition when the rival gets positive mass or
    some support member gets none.
    """
    base = rule(p)
    y = base.degenerate_at()
    if y is None:
        raise UnsupportedCase(f"{rule.name} is not degenerate at the base profile: {base}")
    if rival_choice not in p.alternatives:
        raise InputError(f"unknown rival choice {rival_choice!r}")
    if rival_choice == y:
        raise InputError("rival must choose an alternative other than the rule's outcome")
    sizes = list(support_sizes)
    if not sizes or any(k < 1 for k in sizes):
        raise InputError("support sizes must be positive integers")
    blocks = []
    for k in sizes:
        members = [DetRuleHandle.opaque("rival", {p: rival_choice})]
        members += [DetRuleHandle.opaque(f"s{j}", {p: y}) for j in range(1, k + 1)]
        t = RuleSetT(tuple(members))
        weak = induced_weak_profile(t, p)
        support_ids = [h.id for h in members[1:]]
        records = []
        for q in compatible_profiles(t, p, cap):
            lot = rule(q)
            scores = None
            if rule.name == "borda":
                raw = borda_scores(q.orders, q.tau)
                scores = dict(zip(q.alternatives.labels, raw))
            records.append(CompatibleRecord(q, lot, _violation_kind(lot, support_ids), scores))
        blocks.append(RefutationBlock(k, t, weak, tuple(records)))
    return RefutationCertificate(rule.name, p, y, rival_choice, tuple(blocks))


# --- uniform random dictatorship witness -----------------------------------

@dataclass(frozen=True)
class WitnessCertificate:
    rule: str
    base_profile: Profile
    rule_set: RuleSetT
    decomposition: dict  # handle id -> Fraction
    weak_profile: WeakProfile
    compatible: Profile | None
    lottery: Lottery | None
    method: str

    @property
    def holds(self) -> bool:
        if self.compatible is None:
            return False
        target = {h: self.decomposition.get(h, Fraction(0)) for h in self.rule_set.carrier}
        return self.weak_profile.is_refined_by(self.compatible) and self.lottery.as_dict() == target

    def to_json(self) -> dict:
        p = self.base_profile
        return {
            "schema": SCHEMA,
            "kind": "urd_witness",
            "rule": self.rule,
            "base_profile": {"alternatives": [str(a) for a in p.alternatives.labels],
                             "lines": p.lines()},
            "rule_set": [h.describe(p) for h in self.rule_set],
            "decomposition": {k: str(v) for k, v in self.decomposition.items()},
            "weak_profile": [str(w) for w in self.weak_profile.orders],
            "compatible": None if self.compatible is None else self.compatible.lines(),
            "lottery": None if self.lottery is None else self.lottery.to_literal(),
            "method": self.method,
            "holds": self.holds,
        }


def _dictator_first_profile(weak: WeakProfile) -> Profile:
    rankings = []
    for i, w in enumerate(weak.orders, 1):
        own = f"d{i}"
        ranking = []
        for c in w.classes:
            ranking.extend(sorted(c, key=lambda h: (h != own, weak.alternatives.index(h))))
        rankings.append(ranking)
    return Profile.from_rankings(rankings, weak.alternatives)


def verify_urd_self_equivalence(p: Profile, extras: Sequence[DetRuleHandle] = (),
                                cap: int = DEFAULT_CAP) -> WitnessCertificate:
    """Build the compatible profile on which the uniform random dictatorship
    selects each dictator with probability 1/n and every extra handle with 0.

    Voter i puts dictator i first within its top class (which contains it).
    If that construction does not verify, all compatible profiles are searched.
    """
    dictators = [DetRuleHandle.dictator(i) for i in range(1, p.n + 1)]
    taken = {h.id for h in dictators}
    for h in extras:
        if h.id in taken:
            raise InputError(f"extra handle {h.id!r} duplicates an existing id")
        taken.add(h.id)
    t = RuleSetT(tuple(dictators) + tuple(extras))
    weak = induced_weak_profile(t, p)
    urd = uniform_random_dictatorship()
    delta = {h.id: Fraction(1, p.n) for h in dictators}

    def make(q, method):
        return WitnessCertificate(urd.name, p, t, delta, weak, q,
                                  None if q is None else urd(q), method)

    cert = make(_dictator_first_profile(weak), "constructed")
    if cert.holds:
        return cert
    for q in compatible_profiles(t, p, cap):
        cert = make(q, "search")
        if cert.holds:
            return cert
    return make(None, "none")
