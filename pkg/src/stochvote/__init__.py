"""Exact-arithmetic engine for stochastic voting rules: axiom checking on
bounded domains, self-equivalence certificates, and the coalition-power
diagnostics characterising the uniform random dictatorship."""

from stochvote.axioms import CheckResult, DomainBounds, ViolationWitness, check_axioms
from stochvote.errors import BoundExceeded, DomainError, InputError, StochvoteError, UnsupportedCase
from stochvote.prefcore import (
    AlternativeSet,
    Lottery,
    Profile,
    WeakOrder,
    WeakProfile,
    enumerate_profiles,
)
from stochvote.rules import (
    Rule,
    borda,
    condorcet_quota,
    dictatorship,
    get_rule,
    plurality,
    uniform_random_dictatorship,
)

__version__ = "0.1.0"

__all__ = [
    "AlternativeSet",
    "BoundExceeded",
    "CheckResult",
    "DomainBounds",
    "DomainError",
    "InputError",
    "Lottery",
    "Profile",
    "Rule",
    "StochvoteError",
    "UnsupportedCase",
    "ViolationWitness",
    "WeakOrder",
    "WeakProfile",
    "borda",
    "check_axioms",
    "condorcet_quota",
    "dictatorship",
    "enumerate_profiles",
    "get_rule",
    "plurality",
    "uniform_random_dictatorship",
]
