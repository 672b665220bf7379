"""Profiles, weak orders, lotteries and the enumeration streams built on them.

Alternatives are stored as integer indices into an :class:`AlternativeSet`;
the labels only matter at the I/O boundary.  Voters are numbered from 1 in
every public function, as in the usual ``N = {1, ..., n}`` convention.

Profile literal format (used by fixtures, the CLI and certificates): one
voter per line, alternatives best to worst separated by ``>``::

    x>y>z
    y>z>x

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from stochvote.errors import BoundExceeded, DomainError, InputError

DEFAULT_CAP = 10**7

Label = Hashable
StrictOrder = tuple  # ranking of labels, best first


def natural_key(label):
    """Sort key that orders ``a2`` before ``a10``."""
    parts = re.split(r"(\d+)", str(label))
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts)


@dataclass(frozen=True)
class AlternativeSet:
    labels: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise InputError("an alternative set needs at least one alternative")
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate alternative labels in {labels!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {a: k for k, a in enumerate(labels)})

    @classmethod
    def standard(cls, tau: int) -> AlternativeSet:
        """The set ``a1, ..., a_tau``."""
        if tau < 1:
            raise DomainError("tau must be positive")
        return cls(tuple(f"a{k}" for k in range(1, tau + 1)))

    @classmethod
    def sorted(cls, labels: Iterable[Label]) -> AlternativeSet:
        return cls(tuple(sorted(set(labels), key=natural_key)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown alternative {label!r}") from None

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index


def _standard_or(alts) -> AlternativeSet:
    if isinstance(alts, AlternativeSet):
        return alts
    if isinstance(alts, int):
        return AlternativeSet.standard(alts)
    return AlternativeSet(tuple(alts))


@dataclass(frozen=True)
class Profile:
    """A strict preference profile; ``orders[i]`` lists alternative indices best first."""

    alternatives: AlternativeSet
    orders: tuple

    def __post_init__(self):
        orders = tuple(tuple(o) for o in self.orders)
        if len(orders) < 2:
            raise DomainError("a profile needs at least two voters")
        full = tuple(range(self.alternatives.size))
        for i, o in enumerate(orders, 1):
            if tuple(sorted(o)) != full:
                raise InputError(f"voter {i}: ranking is not a permutation of the alternatives")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def from_rankings(cls, rankings: Sequence[Sequence[Label]],
                      alternatives: AlternativeSet | None = None) -> Profile:
        """Build a profile from label rankings.

        Without an explicit ``alternatives`` the carrier is the set of labels
        seen, in natural sort order.
        """
        rankings = [tuple(r) for r in rankings]
        if alternatives is None:
            alternatives = AlternativeSet.sorted(a for r in rankings for a in r)
        orders = []
        for i, r in enumerate(rankings, 1):
            if len(r) != alternatives.size or set(r) != set(alternatives.labels):
                raise InputError(f"voter {i}: ranking {r!r} does not cover the alternatives exactly once")
            orders.append(tuple(alternatives.index(a) for a in r))
        return cls(alternatives, tuple(orders))

    @classmethod
    def parse(cls, text: str, alternatives: AlternativeSet | None = None) -> Profile:
        rankings = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = [t.strip() for t in line.split(">")]
            if any(not t for t in tokens):
                raise InputError(f"malformed ranking line {line!r}")
            rankings.append(tokens)
        return cls.from_rankings(rankings, alternatives)

    def to_literal(self) -> str:
        return "\n".join(">".join(str(a) for a in r) for r in self.rankings())

    def lines(self) -> list[str]:
        return self.to_literal().split("\n")

    @property
    def n(self) -> int:
        return len(self.orders)

    @property
    def tau(self) -> int:
        return self.alternatives.size

    def rankings(self) -> tuple:
        labels = self.alternatives.labels
        return tuple(tuple(labels[k] for k in o) for o in self.orders)

    def ranking(self, voter: int) -> StrictOrder:
        return self.rankings()[self._voter_index(voter)]

    def top(self, voter: int) -> Label:
        return self.alternatives.labels[self.orders[self._voter_index(voter)][0]]

    def _voter_index(self, voter: int) -> int:
        if not 1 <= voter <= self.n:
            raise InputError(f"voter {voter} out of range 1..{self.n}")
        return voter - 1

    def __str__(self):
        return " | ".join(">".join(str(a) for a in r) for r in self.rankings())


# --- lotteries -------------------------------------------------------------

def _exact(value) -> Fraction:
    if isinstance(value, float):
        raise InputError("lottery masses must be exact rationals, not floats")
    return Fraction(value)


@dataclass(frozen=True)
class Lottery:
    """An exact probability measure over an alternative set."""

    alternatives: AlternativeSet
    masses: tuple

    def __post_init__(self):
        masses = tuple(_exact(m) for m in self.masses)
        if len(masses) != self.alternatives.size:
            raise InputError("one mass per alternative is required")
        if any(m < 0 for m in masses):
            raise InputError("negative mass in lottery")
        if sum(masses) != 1:
            raise InputError(f"lottery masses sum to {sum(masses)}, not 1")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_mapping(cls, alternatives: AlternativeSet, mass: Mapping[Label, object]) -> Lottery:
        for a in mass:
            alternatives.index(a)
        return cls(alternatives, tuple(mass.get(a, 0) for a in alternatives.labels))

    @classmethod
    def point(cls, alternatives: AlternativeSet, label: Label) -> Lottery:
        return cls.from_mapping(alternatives, {label: 1})

    @classmethod
    def parse(cls, alternatives: AlternativeSet, text: str) -> Lottery:
        mass = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            label, _, value = item.rpartition(":")
            mass[label.strip()] = Fraction(value.strip())
        return cls.from_mapping(alternatives, mass)

    def __getitem__(self, label: Label) -> Fraction:
        return self.masses[self.alternatives.index(label)]

    def mass(self, label: Label) -> Fraction:
        return self[label]

    @property
    def support(self) -> tuple:
        return tuple(a for a, m in zip(self.alternatives.labels, self.masses) if m > 0)

    @property
    def is_degenerate(self) -> bool:
        return any(m == 1 for m in self.masses)

    def degenerate_at(self):
        """The alternative carrying mass 1, or None."""
        for a, m in zip(self.alternatives.labels, self.masses):
            if m == 1:
                return a
        return None

    def as_dict(self) -> dict:
        return dict(zip(self.alternatives.labels, self.masses))

    def restricted(self, labels: Iterable[Label]) -> dict:
        """Masses of ``labels`` only (the restriction of the measure)."""
        return {a: self[a] for a in labels}

    def to_literal(self) -> str:
        return ", ".join(f"{a}:{m}" for a, m in zip(self.alternatives.labels, self.masses))

    def __str__(self):
        return "{" + self.to_literal() + "}"


# --- weak orders -----------------------------------------------------------

@dataclass(frozen=True)
class WeakOrder:
    """Ordered indifference classes, best class first."""

    classes: tuple

    def __post_init__(self):
        classes = tuple(tuple(c) for c in self.classes)
        seen = set()
        for c in classes:
            if not c:
                raise InputError("empty indifference class")
            if seen & set(c) or len(set(c)) != len(c):
                raise InputError("indifference classes must be disjoint")
            seen |= set(c)
        object.__setattr__(self, "classes", classes)

    @property
    def elements(self) -> frozenset:
        return frozenset(a for c in self.classes for a in c)

    def rank_of(self, label) -> int:
        for k, c in enumerate(self.classes):
            if label in c:
                return k
        raise InputError(f"{label!r} not ranked by this weak order")

    def extension_count(self) -> int:
        return math.prod(math.factorial(len(c)) for c in self.classes)

    def is_refined_by(self, ranking: Sequence[Label]) -> bool:
        """True iff strict preference in ``ranking`` never contradicts this order."""
        if set(ranking) != self.elements or len(ranking) != len(self.elements):
            return False
        ranks = [self.rank_of(a) for a in ranking]
        return all(r1 <= r2 for r1, r2 in zip(ranks, ranks[1:]))

    def __str__(self):
        return " > ".join("{" + ",".join(map(str, c)) + "}" for c in self.classes)


@dataclass(frozen=True)
class WeakProfile:
    alternatives: AlternativeSet
    orders: tuple

    def __post_init__(self):
        orders = tuple(self.orders)
        for o in orders:
            if o.elements != frozenset(self.alternatives.labels):
                raise InputError("weak order does not partition the alternative set")
        object.__setattr__(self, "orders", orders)

    @property
    def n(self) -> int:
        return len(self.orders)

    def extension_count(self) -> int:
        return math.prod(w.extension_count() for w in self.orders)

    def is_refined_by(self, p: Profile) -> bool:
        return (p.n == self.n and set(p.alternatives.labels) == set(self.alternatives.labels)
                and all(w.is_refined_by(r) for w, r in zip(self.orders, p.rankings())))


def linear_extensions(w: WeakOrder) -> Iterator[StrictOrder]:
    """All strict orders refining ``w``; each class is permuted lexicographically."""
    per_class = [list(itertools.permutations(c)) for c in w.classes]
    for choice in itertools.product(*per_class):
        yield tuple(a for block in choice for a in block)


# --- profile operations ----------------------------------------------------

def restrict_profile(p: Profile, removed: Iterable[Label]) -> Profile:
    """Drop ``removed`` from every ranking; survivors keep their carrier order."""
    removed = set(removed)
    for a in removed:
        p.alternatives.index(a)
    if len(removed) >= p.tau:
        raise DomainError("cannot remove every alternative")
    if not removed:
        return p
    keep = [k for k in range(p.tau) if p.alternatives.labels[k] not in removed]
    reindex = {k: j for j, k in enumerate(keep)}
    alts = AlternativeSet(tuple(p.alternatives.labels[k] for k in keep))
    orders = tuple(tuple(reindex[k] for k in o if k in reindex) for o in p.orders)
    return Profile(alts, orders)


def _as_bijection(perm, domain: Sequence) -> dict:
    if isinstance(perm, Mapping):
        mapping = dict(perm)
    else:
        perm = list(perm)
        if len(perm) != len(domain):
            raise InputError("permutation has the wrong length")
        mapping = dict(zip(domain, perm))
    if set(mapping) != set(domain) or set(mapping.values()) != set(domain):
        raise InputError("map is not a bijection on its domain")
    return mapping


def apply_voter_permutation(p: Profile, perm) -> Profile:
    """Voter ``i`` of the result holds voter ``perm(i)``'s ranking.

    ``perm`` is a mapping on 1..n or a sequence whose ``i-1``-th entry is ``perm(i)``.
    """
    voters = range(1, p.n + 1)
    pi = _as_bijection(perm, voters)
    return Profile(p.alternatives, tuple(p.orders[pi[i] - 1] for i in voters))


def apply_alternative_permutation(p: Profile, mu) -> Profile:
    """Relabel every ranking position through the bijection ``mu`` on the alternatives."""
    labels = p.alternatives.labels
    m = _as_bijection(mu, labels)
    idx = [p.alternatives.index(m[a]) for a in labels]
    return Profile(p.alternatives, tuple(tuple(idx[k] for k in o) for o in p.orders))


def canonical_relabel(p: Profile, beta: Mapping[Label, Label],
                      target: AlternativeSet | None = None) -> Profile:
    """Transport ``p`` through the bijection ``beta`` onto ``target`` (default: standard set)."""
    if target is None:
        target = AlternativeSet.standard(p.tau)
    if target.size != p.tau:
        raise InputError(f"carrier has {p.tau} elements, target has {target.size}")
    if set(beta) != set(p.alternatives.labels) or set(beta.values()) != set(target.labels):
        raise InputError("beta is not a bijection from the carrier onto the target")
    return Profile.from_rankings([[beta[a] for a in r] for r in p.rankings()], target)


def lower_contour(p: Profile, voter: int, x: Label) -> frozenset:
    """Alternatives strictly below ``x`` in the voter's ranking."""
    r = p.ranking(voter)
    if x not in p.alternatives:
        raise InputError(f"unknown alternative {x!r}")
    return frozenset(r[r.index(x) + 1:])


def monotonic_orders(order: Sequence[int], x: int) -> list[tuple]:
    """Rankings (as index tuples) whose lower contour at ``x`` contains the one of ``order``."""
    below = set(order[order.index(x) + 1:])
    out = []
    for cand in itertools.permutations(sorted(order)):
        if below <= set(cand[cand.index(x) + 1:]):
            out.append(cand)
    return out


def monotonic_transformations(p: Profile, x: Label) -> Iterator[Profile]:
    """Every profile in which no voter's lower contour set at ``x`` shrinks."""
    xi = p.alternatives.index(x)
    per_voter = [monotonic_orders(o, xi) for o in p.orders]
    for orders in itertools.product(*per_voter):
        yield Profile(p.alternatives, orders)


def profile_count(n: int, tau: int) -> int:
    return math.factorial(tau) ** n


def enumerate_profiles(n: int, alts, cap: int = DEFAULT_CAP) -> Iterator[Profile]:
    """All ``(tau!)^n`` strict profiles.

    Order: lexicographic over the tuple of per-voter permutation ranks, where
    permutations of the carrier are ranked lexicographically by index.
    """
    alts = _standard_or(alts)
    if n < 2:
        raise DomainError("need n >= 2 voters")
    count = profile_count(n, alts.size)
    if count > cap:
        raise BoundExceeded(f"profiles for n={n}, tau={alts.size}", count, cap)
    return _profile_stream(n, alts)


def _profile_stream(n, alts):
    perms = list(itertools.permutations(range(alts.size)))
    for orders in itertools.product(perms, repeat=n):
        yield Profile(alts, orders)
