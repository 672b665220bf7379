"""JSON serialisation and independent replay of emitted certificates.

Serialisation is canonical (sorted keys, fixed indentation, no timestamps)
so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from stochvote.axioms import ViolationWitness
from stochvote.errors import InputError, StochvoteError
from stochvote.prefcore import AlternativeSet, Lottery, Profile
from stochvote.rules import get_rule, uniform_random_dictatorship
from stochvote.selfeq import (
    SCHEMA,
    DetRuleHandle,
    RuleSetT,
    induced_weak_profile,
    refute_self_equivalence_degenerate,
    verify_urd_self_equivalence,
)


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write(data, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def load_profile(source: str) -> Profile:
    """Read a profile literal from a file, or the bundled four-voter
    ``running-example`` fixture."""
    if source == "running-example":
        text = resources.files("stochvote.data").joinpath("running_example.txt").read_text()
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read profile fixture {source!r}: {exc}") from None
    return Profile.parse(text)


def running_example() -> Profile:
    return load_profile("running-example")


def _profile(entry) -> Profile:
    return Profile.parse("\n".join(entry["lines"]), AlternativeSet(tuple(entry["alternatives"])))


@dataclass
class Verification:
    kind: str
    ok: bool = True
    messages: list = field(default_factory=list)

    def fail(self, msg):
        self.ok = False
        self.messages.append(msg)

    def to_json(self) -> dict:
        return {"kind": self.kind, "ok": self.ok, "messages": self.messages}


def verify_certificate(data: dict) -> Verification:
    """Re-derive a certificate from its recorded inputs and re-check every record."""
    kind = data.get("kind", "?")
    v = Verification(kind)
    try:
        if data.get("schema") != SCHEMA:
            v.fail(f"unsupported schema {data.get('schema')!r}")
        elif kind == "refutation":
            _verify_refutation(data, v)
        elif kind == "urd_witness":
            _verify_urd_witness(data, v)
        elif kind == "violation_witness":
            w = ViolationWitness.from_json(data["witness"])
            if not w.replay(get_rule(data["rule"])):
                v.fail("witness does not replay")
        elif kind == "axiom_report":
            for name, res in data["results"].items():
                if "witness" in res:
                    w = ViolationWitness.from_json(res["witness"])
                    if not w.replay(get_rule(data["rule"])):
                        v.fail(f"{name}: witness does not replay")
        else:
            v.fail(f"unknown certificate kind {kind!r}")
    except (StochvoteError, KeyError, ValueError, TypeError) as exc:
        v.fail(f"malformed certificate: {exc}")
    return v


def _handles(entries, base: Profile):
    out = []
    for e in entries:
        if e["kind"] == "dictator":
            h = DetRuleHandle.dictator(e["voter"])
            if h.id != e["id"]:
                raise InputError(f"dictator handle id {e['id']!r} does not match voter")
        else:
            h = DetRuleHandle.opaque(e["id"], {base: e["choice"]})
        if str(h.choice_at(base)) != e["choice"]:
            raise InputError(f"handle {e['id']!r} does not choose {e['choice']!r} at the base profile")
        out.append(h)
    return out


def _verify_refutation(data, v):
    rule = get_rule(data["rule"])
    base = _profile(data["base_profile"])
    lot = rule(base)
    if str(lot.degenerate_at()) != data["outcome"]:
        v.fail(f"rule outcome at base is {lot}, certificate says {data['outcome']}")
        return
    for block in data["blocks"]:
        k = block["k"]
        t = RuleSetT(tuple(_handles(block["rule_set"], base)))
        weak = induced_weak_profile(t, base)
        if [str(w) for w in weak.orders] != block["weak_profile"]:
            v.fail(f"k={k}: induced weak profile differs")
        support = [h.id for h in t if h.id != "rival"]
        if len(support) != k:
            v.fail(f"k={k}: rule set has {len(support)} support handles")
        seen = set()
        for rec in block["records"]:
            q = Profile.parse("\n".join(rec["lines"]), weak.alternatives)
            if q in seen:
                v.fail(f"k={k}: duplicate compatible profile")
            seen.add(q)
            if not weak.is_refined_by(q):
                v.fail(f"k={k}: profile {q} is not compatible")
            got = rule(q)
            if got != Lottery.parse(q.alternatives, rec["lottery"]):
                v.fail(f"k={k}: lottery at {q} re-evaluates to {got}")
            violated = got["rival"] > 0 or any(got[s] == 0 for s in support)
            if violated != (rec["violation"] is not None):
                v.fail(f"k={k}: violation flag wrong at {q}")
        if len(seen) != weak.extension_count() or block["count"] != len(seen):
            v.fail(f"k={k}: {len(seen)} records, expected {weak.extension_count()}")
    again = refute_self_equivalence_degenerate(rule, base, data["rival"], data["support_sizes"])
    if again.to_json() != data:
        v.fail("re-derived certificate differs from the recorded one")


def _verify_urd_witness(data, v):
    base = _profile(data["base_profile"])
    handles = _handles(data["rule_set"], base)
    t = RuleSetT(tuple(handles))
    weak = induced_weak_profile(t, base)
    q = Profile.parse("\n".join(data["compatible"]), weak.alternatives)
    if not weak.is_refined_by(q):
        v.fail("witness profile is not compatible with the induced weak profile")
    delta = {k: Fraction(m) for k, m in data["decomposition"].items()}
    got = uniform_random_dictatorship()(q)
    if got.as_dict() != {h: delta.get(h, Fraction(0)) for h in weak.alternatives}:
        v.fail(f"lottery {got} does not match the decomposition")
    extras = [h for h in handles if h.kind != "dictator"]
    again = verify_urd_self_equivalence(base, extras)
    if again.to_json() != data:
        v.fail("re-derived certificate differs from the recorded one")
