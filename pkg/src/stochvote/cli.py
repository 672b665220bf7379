"""Exact axiom checks and replayable certificates for stochastic voting rules.

Exit codes: 0 pass, 1 violation (or expected refutation absent), 2 input
error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from stochvote import certificates
from stochvote.axioms import AXIOM_CHECKS, DomainBounds, check_axioms
from stochvote.characterization import alpha_table, characterize
from stochvote.errors import BoundExceeded, InputError, StochvoteError, UnsupportedCase
from stochvote.prefcore import DEFAULT_CAP, Profile
from stochvote.rules import borda, condorcet_quota, get_rule, plurality, uniform_random_dictatorship
from stochvote.selfeq import (
    SCHEMA,
    DetRuleHandle,
    refute_self_equivalence_degenerate,
    verify_urd_self_equivalence,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def parse_extras(text: str | None, base: Profile) -> list[DetRuleHandle]:
    """``id=alt,id=alt`` -> opaque handles choosing ``alt`` at ``base``."""
    if not text:
        return []
    out = []
    for item in text.split(","):
        hid, sep, alt = item.partition("=")
        if not sep or not hid.strip() or not alt.strip():
            raise InputError(f"bad extras entry {item!r}; expected id=alternative")
        out.append(DetRuleHandle.opaque(hid.strip(), {base: alt.strip()}))
    return out


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad support sizes {text!r}") from None


def axiom_report(rule_name: str, b: DomainBounds, axioms=None) -> dict:
    results = check_axioms(get_rule(rule_name), b, axioms)
    return {"schema": SCHEMA, "kind": "axiom_report", "rule": rule_name, "bounds": b.as_dict(),
            "results": {k: v.to_json() for k, v in results.items()}}


def demo_worked_example(out_dir=None) -> dict:
    """Reproduce the worked examples on the four-voter, three-alternative profile.

    Returns a report whose ``ok`` field is False if any expected outcome or
    certificate replay fails.  Certificates are written to ``out_dir`` if given.
    """
    p = certificates.running_example()
    checks = []

    def fmt(value):
        if isinstance(value, dict):
            return "{" + ", ".join(f"{k}:{v}" for k, v in value.items()) + "}"
        return str(value)

    def expect(name, got, want):
        checks.append({"check": name, "got": fmt(got), "expected": fmt(want), "ok": got == want})

    outcomes = {}
    for rule in (plurality(), borda(), condorcet_quota(), uniform_random_dictatorship()):
        lot = rule(p)
        outcomes[rule.name] = lot.to_literal()
    expect("plurality", plurality()(p).as_dict(), {"x": 0, "y": 1, "z": 0})
    expect("borda", borda()(p).as_dict(), {"x": 0, "y": 1, "z": 0})
    expect("condorcet", condorcet_quota()(p).as_dict(), {"x": 0, "y": 1, "z": 0})
    expect("urd", uniform_random_dictatorship()(p).as_dict(),
           {"x": Fraction(1, 4), "y": Fraction(1, 2), "z": Fraction(1, 4)})

    artifacts = {}
    for rule in (plurality(), borda(), condorcet_quota()):
        cert = refute_self_equivalence_degenerate(rule, p, "x", (1, 2, 3))
        artifacts[f"{rule.name}_refutation"] = cert.to_json()
        expect(f"{rule.name} refuted for k=1,2,3", cert.refuted, True)
        if rule.name == "borda":
            first = cert.blocks[0]
            expect("borda k=1 rival score", first.records[0].scores["rival"], 6)
            expect("borda k=1 rival mass", first.records[0].rival_mass, Fraction(1, 2))
    plain = verify_urd_self_equivalence(p)
    extras = verify_urd_self_equivalence(p, [DetRuleHandle.opaque("tx", {p: "x"}),
                                             DetRuleHandle.opaque("ty", {p: "y"})])
    artifacts["urd_witness"] = plain.to_json()
    artifacts["urd_witness_extras"] = extras.to_json()
    expect("urd witness", plain.lottery.as_dict(), {f"d{i}": Fraction(1, 4) for i in range(1, 5)})
    expect("urd witness with extras holds", extras.holds, True)

    for name, data in artifacts.items():
        expect(f"replay {name}", certificates.verify_certificate(data).ok, True)
        if out_dir is not None:
            certificates.write(data, Path(out_dir) / f"{name}.json")

    report = {"schema": SCHEMA, "kind": "worked_example_report", "profile": p.lines(),
              "outcomes": outcomes, "checks": checks, "ok": all(c["ok"] for c in checks),
              "artifacts": sorted(artifacts)}
    if out_dir is not None:
        certificates.write(report, Path(out_dir) / "worked_example.json")
    return report


@dataclass
class RunConfig:
    rules: list = field(default_factory=list)
    n: int = 3
    tau_max: int = 3
    profile: str | None = None
    rival: str | None = None
    support_sizes: list = field(default_factory=lambda: [1, 2, 3])
    output: str = "reports"
    cap: int = DEFAULT_CAP
    tasks: list = field(default_factory=lambda: ["axioms"])

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        for name in self.rules:
            get_rule(name)
        DomainBounds(self.n, self.tau_max, self.cap)
        bad = set(self.tasks) - {"axioms", "characterize", "alpha", "refute", "verify-urd"}
        if bad:
            raise InputError(f"unknown tasks {sorted(bad)}")
        if {"refute", "verify-urd"} & set(self.tasks) and not self.profile:
            raise InputError("refute/verify-urd tasks need a profile")


def run(config: RunConfig) -> list[Path]:
    """Execute ``config`` and write deterministic JSON reports; returns written paths."""
    config.validate()
    out = Path(config.output)
    b = DomainBounds(config.n, config.tau_max, config.cap)
    written = []
    if "axioms" in config.tasks:
        grid = {name: axiom_report(name, b)["results"] for name in config.rules}
        written.append(certificates.write({"schema": SCHEMA, "kind": "axiom_matrix",
                                           "bounds": b.as_dict(), "rules": grid},
                                          out / "axiom_matrix.json"))
    if "characterize" in config.tasks:
        for name in config.rules:
            written.append(certificates.write(characterize(get_rule(name), b),
                                              out / f"characterize_{_slug(name)}.json"))
    if "alpha" in config.tasks:
        for name in config.rules:
            written.append(certificates.write(alpha_table(get_rule(name), config.n).to_json(),
                                              out / f"alpha_{_slug(name)}.json"))
    base = certificates.load_profile(config.profile) if config.profile else None
    if "refute" in config.tasks:
        for name in config.rules:
            cert = refute_self_equivalence_degenerate(get_rule(name), base, config.rival,
                                                      config.support_sizes, config.cap)
            written.append(certificates.write(cert.to_json(), out / f"refute_{_slug(name)}.json"))
    if "verify-urd" in config.tasks:
        cert = verify_urd_self_equivalence(base, cap=config.cap)
        written.append(certificates.write(cert.to_json(), out / "urd_witness.json"))
    return written


def _slug(name: str) -> str:
    return name.replace(":", "-")


def _emit(data, out):
    if out:
        certificates.write(data, out)
    else:
        sys.stdout.write(certificates.dumps(data))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stochvote", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="reproduce worked examples")
    demo.add_argument("which", choices=["worked-example"])
    demo.add_argument("--out", help="directory for the report and certificates")

    ax = sub.add_parser("axioms", help="axiom checks")
    ax_sub = ax.add_subparsers(dest="action", required=True)
    chk = ax_sub.add_parser("check")
    chk.add_argument("rule")
    chk.add_argument("--n", type=int, required=True)
    chk.add_argument("--tau-max", type=int, required=True)
    chk.add_argument("--axioms", help="comma-separated subset of " + ",".join(AXIOM_CHECKS)
                     + " (default: all but determinism,dictatorial)")
    chk.add_argument("--cap", type=int, default=DEFAULT_CAP)
    chk.add_argument("--out")

    se = sub.add_parser("selfeq", help="self-equivalence certificates")
    se_sub = se.add_subparsers(dest="action", required=True)
    ref = se_sub.add_parser("refute")
    ref.add_argument("rule")
    ref.add_argument("--profile", required=True, help="profile file, or 'running-example'")
    ref.add_argument("--rival", required=True)
    ref.add_argument("--support-sizes", default="1,2,3")
    ref.add_argument("--cap", type=int, default=DEFAULT_CAP)
    ref.add_argument("--out")
    urd = se_sub.add_parser("verify-urd")
    urd.add_argument("--profile", required=True, help="profile file, or 'running-example'")
    urd.add_argument("--extras", help="id=alternative,... opaque handles")
    urd.add_argument("--out")

    al = sub.add_parser("alpha", help="coalition power function")
    al_sub = al.add_subparsers(dest="action", required=True)
    tab = al_sub.add_parser("table")
    tab.add_argument("rule")
    tab.add_argument("--n", type=int, required=True)
    tab.add_argument("--tau", type=int, default=2)
    tab.add_argument("--out")

    ch = sub.add_parser("characterize", help="full diagnostic chain")
    ch.add_argument("rule")
    ch.add_argument("--n", type=int, default=3)
    ch.add_argument("--tau-max", type=int, default=3)
    ch.add_argument("--out")

    ver = sub.add_parser("verify-certificate", help="replay an emitted certificate")
    ver.add_argument("file")

    rn = sub.add_parser("run", help="batch run from a JSON config")
    rn.add_argument("config")
    return ap


def _dispatch(args) -> int:
    if args.command == "demo":
        report = demo_worked_example(args.out)
        if args.out is None:
            sys.stdout.write(certificates.dumps(report))
        return EXIT_OK if report["ok"] else EXIT_VIOLATION

    if args.command == "axioms":
        b = DomainBounds(args.n, args.tau_max, args.cap)
        names = args.axioms.split(",") if args.axioms else None
        report = axiom_report(args.rule, b, names)
        _emit(report, args.out)
        ok = all(r["status"] == "pass" for r in report["results"].values())
        return EXIT_OK if ok else EXIT_VIOLATION

    if args.command == "selfeq":
        base = certificates.load_profile(args.profile)
        if args.action == "refute":
            cert = refute_self_equivalence_degenerate(get_rule(args.rule), base, args.rival,
                                                      _sizes(args.support_sizes), args.cap)
            _emit(cert.to_json(), args.out)
            return EXIT_OK if cert.refuted else EXIT_VIOLATION
        cert = verify_urd_self_equivalence(base, parse_extras(args.extras, base))
        _emit(cert.to_json(), args.out)
        return EXIT_OK if cert.holds else EXIT_VIOLATION

    if args.command == "alpha":
        _emit(alpha_table(get_rule(args.rule), args.n, args.tau).to_json(), args.out)
        return EXIT_OK

    if args.command == "characterize":
        report = characterize(get_rule(args.rule), DomainBounds(args.n, args.tau_max))
        _emit(report, args.out)
        return EXIT_OK if report["verdict"]["characterization_consistent"] else EXIT_VIOLATION

    if args.command == "verify-certificate":
        try:
            data = json.loads(Path(args.file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read certificate: {exc}") from None
        result = certificates.verify_certificate(data)
        sys.stdout.write(certificates.dumps(result.to_json()))
        return EXIT_OK if result.ok else EXIT_VIOLATION

    if args.command == "run":
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from None
        for path in run(RunConfig.from_dict(data)):
            print(path)
        return EXIT_OK
    raise InputError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except BoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, UnsupportedCase) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StochvoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
