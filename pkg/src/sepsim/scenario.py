"""Scenario files: the complete, seed-free description of one experiment.

Line-delimited text, one record per line, integers in decimal:

    sepsim-scenario 1
    construction <anticomplete|upclosure|nosupermax|twodegrees>
    horizon <n>
    case <1 k|2>                       (upclosure only)
    cert <attempt> <ell> <k> <odd|even> <settling>   (nosupermax, up to two)
    set <NAME> <element> <stage>
    bound f <x> <f(x)>                 (upclosure only)
    rule <prog> <input> <output> <use> <avail> <npairs> [<pos> <bit>]...
    end

Set names: upclosure uses A, B, C; nosupermax uses A, B; twodegrees uses C,
K, W0, W1, ... Program names: anticomplete and twodegrees use phi0, phi1,
...; upclosure uses gamma and delta. '#' starts a comment.

Scripted event stages must stay below the horizon so every event is visible
to an executed stage; nosupermax events additionally start at stage 1.
Hypothesis audits run at load time: upclosure scenarios must have disjoint
scripted sides, a hole below the horizon, and operators that compute each
side from the other bit by bit; nosupermax scenarios must script disjoint
sides.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .enumcore import StageSet
from .errors import HypothesisViolation, UsageError
from .functionals import OracleProgram, OracleRule, UseBound, UseBoundedOperator
from .nosupermax import SpeedupCertificate
from .upclosure import CaseTag, audit_hypotheses

CONSTRUCTIONS = ("anticomplete", "upclosure", "nosupermax", "twodegrees")

_SET_NAMES = {
    "anticomplete": (),
    "upclosure": ("A", "B", "C"),
    "nosupermax": ("A", "B"),
    "twodegrees": ("C", "K"),  # plus W<e>
}

_PROG_RE = {
    "anticomplete": re.compile(r"^phi(\d+)$"),
    "upclosure": re.compile(r"^(gamma|delta)$"),
    "nosupermax": None,
    "twodegrees": re.compile(r"^phi(\d+)$"),
}

DEFAULT_HORIZON = 1000


@dataclass
class Scenario:
    construction: str
    horizon: int = DEFAULT_HORIZON
    sets: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    rules: dict[str, list[OracleRule]] = field(default_factory=dict)
    bound_table: list[tuple[int, int]] = field(default_factory=list)
    case: CaseTag | None = None
    certs: list[SpeedupCertificate] = field(default_factory=list)

    # -- canonical form and digest

    def canonical(self) -> str:
        lines = ["sepsim-scenario 1", f"construction {self.construction}"]
        lines.append(f"horizon {self.horizon}")
        if self.case is not None:
            if self.case.tag == 1:
                lines.append(f"case 1 {self.case.k}")
            else:
                lines.append("case 2")
        for c in self.certs:
            parity = "odd" if c.parity == 1 else "even"
            lines.append(
                f"cert {c.attempt} {c.ell} {c.k} {parity} {c.settling_stage}"
            )
        for name in sorted(self.sets):
            for e, t in sorted(self.sets[name], key=lambda p: (p[1], p[0])):
                lines.append(f"set {name} {e} {t}")
        for x, fx in sorted(self.bound_table):
            lines.append(f"bound f {x} {fx}")
        for prog in sorted(self.rules):
            for r in sorted(
                self.rules[prog],
                key=lambda r: (r.input, r.use, r.available_at, r.guard, r.output),
            ):
                parts = [
                    "rule",
                    prog,
                    str(r.input),
                    str(r.output),
                    str(r.use),
                    str(r.available_at),
                    str(len(r.guard)),
                ]
                for p, b in r.guard:
                    parts.append(str(p))
                    parts.append(str(b))
                lines.append(" ".join(parts))
        lines.append("end")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # -- typed views

    def stage_set(self, name: str) -> StageSet:
        return StageSet(
            events=tuple(self.sets.get(name, [])), horizon=self.horizon
        )

    def program(self, name: str) -> OracleProgram:
        return OracleProgram(self.rules.get(name, []))

    def programs_by_index(self, prefix="phi") -> dict[int, OracleProgram]:
        out = {}
        for name, rules in self.rules.items():
            if name.startswith(prefix):
                out[int(name[len(prefix) :])] = OracleProgram(rules)
        return out

    def use_bound(self) -> UseBound:
        table = sorted(self.bound_table)
        if [x for x, _ in table] != list(range(len(table))):
            raise UsageError("bound table must cover an initial segment")
        return UseBound(table=tuple(fx for _, fx in table))

    def w_events_by_index(self) -> dict[int, list[tuple[int, int]]]:
        out = {}
        for name, events in self.sets.items():
            if name.startswith("W"):
                out[int(name[1:])] = list(events)
        return out


def _schema_error(msg, lineno=None):
    loc = None if lineno is None else f"line {lineno}"
    return UsageError(msg, location=loc)


def parse_scenario(text: str) -> Scenario:
    """Parse and schema-validate; hypothesis audits are separate."""
    lines = text.splitlines()
    if not lines or lines[0].split("#")[0].strip() != "sepsim-scenario 1":
        raise _schema_error("missing or unsupported scenario header", 1)
    sc = Scenario(construction="")
    horizon_seen = False
    ended = False
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if ended:
            raise _schema_error("content after end record", lineno)
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "construction":
                if parts[1] not in CONSTRUCTIONS:
                    raise _schema_error(f"unknown construction {parts[1]}", lineno)
                sc.construction = parts[1]
            elif kind == "horizon":
                sc.horizon = int(parts[1])
                horizon_seen = True
            elif kind == "case":
                tag = int(parts[1])
                sc.case = CaseTag(1, int(parts[2])) if tag == 1 else CaseTag(2)
            elif kind == "cert":
                parity = {"odd": 1, "even": 0}.get(parts[4])
                if parity is None:
                    raise _schema_error(f"bad parity word {parts[4]}", lineno)
                sc.certs.append(
                    SpeedupCertificate(
                        attempt=int(parts[1]),
                        ell=int(parts[2]),
                        k=int(parts[3]),
                        parity=parity,
                        settling_stage=int(parts[5]),
                    )
                )
            elif kind == "set":
                name = parts[1]
                sc.sets.setdefault(name, []).append((int(parts[2]), int(parts[3])))
            elif kind == "bound":
                if parts[1] != "f":
                    raise _schema_error("only the bound named f exists", lineno)
                sc.bound_table.append((int(parts[2]), int(parts[3])))
            elif kind == "rule":
                name = parts[1]
                npairs = int(parts[6])
                nums = parts[7:]
                if len(nums) != 2 * npairs:
                    raise _schema_error("guard pair count mismatch", lineno)
                guard = tuple(
                    (int(nums[2 * i]), int(nums[2 * i + 1])) for i in range(npairs)
                )
                sc.rules.setdefault(name, []).append(
                    OracleRule(
                        guard=guard,
                        input=int(parts[2]),
                        output=int(parts[3]),
                        use=int(parts[4]),
                        available_at=int(parts[5]),
                    )
                )
            elif kind == "end":
                ended = True
            else:
                raise _schema_error(f"unknown record {kind}", lineno)
        except UsageError:
            raise
        except (ValueError, IndexError) as exc:
            raise _schema_error(f"malformed {kind} record: {exc}", lineno)
    if not ended:
        raise _schema_error("missing end record")
    if not sc.construction:
        raise _schema_error("missing construction record")
    if not horizon_seen:
        sc.horizon = DEFAULT_HORIZON
    validate_schema(sc)
    return sc


def validate_schema(sc: Scenario):
    if sc.horizon < 1:
        raise _schema_error("horizon must be positive")
    allowed = _SET_NAMES[sc.construction]
    for name, events in sc.sets.items():
        ok = name in allowed or (
            sc.construction == "twodegrees" and re.fullmatch(r"W\d+", name)
        )
        if not ok:
            raise _schema_error(
                f"set {name} not allowed for {sc.construction}"
            )
        seen = set()
        min_stage = 1 if sc.construction == "nosupermax" else 0
        for e, t in events:
            if e < 0:
                raise _schema_error(f"set {name} element {e} negative")
            if t < min_stage or t > sc.horizon - 1:
                raise _schema_error(
                    f"set {name} event ({e}, {t}) outside stages"
                    f" [{min_stage}, {sc.horizon - 1}]"
                )
            if e in seen:
                raise _schema_error(f"set {name} element {e} enters twice")
            seen.add(e)
        if sc.construction == "twodegrees" and name == "C":
            for e, _ in events:
                if e > 32:
                    raise _schema_error(
                        f"set C column {e} exceeds 32; the bounded-quantifier"
                        " decoding walks all of its slots"
                    )
    prog_re = _PROG_RE[sc.construction]
    for name, rules in sc.rules.items():
        if prog_re is None or not prog_re.match(name):
            raise _schema_error(
                f"program {name} not allowed for {sc.construction}"
            )
        for r in rules:
            if r.use > 4096:
                raise _schema_error(
                    f"program {name}: rule use {r.use} exceeds 4096"
                )
        try:
            OracleProgram(rules)
        except ValueError as exc:
            raise _schema_error(f"program {name}: {exc}")
    if sc.construction == "upclosure":
        if sc.case is None:
            raise _schema_error("upclosure scenarios declare their case")
        try:
            f = sc.use_bound()
        except ValueError as exc:
            raise _schema_error(f"bound table: {exc}")
        if f.domain < sc.horizon:
            raise _schema_error(
                f"bound table covers [0, {f.domain}), horizon {sc.horizon}"
            )
        if f.table and max(f.table) > sc.horizon + 4096:
            raise _schema_error("bound table values exceed the horizon by 4096")
        for name in ("gamma", "delta"):
            try:
                UseBoundedOperator(program=sc.program(name), bound=f)
            except ValueError as exc:
                raise _schema_error(f"operator {name}: {exc}")
    else:
        if sc.case is not None:
            raise _schema_error("only upclosure scenarios declare a case")
        if sc.bound_table:
            raise _schema_error("only upclosure scenarios carry a bound table")
    if sc.certs:
        if sc.construction != "nosupermax":
            raise _schema_error("only nosupermax scenarios carry certificates")
        if len(sc.certs) > 2:
            raise _schema_error("at most two certificates")
        for i, c in enumerate(sc.certs):
            if c.attempt != i + 1:
                raise _schema_error(
                    f"certificate {i + 1} must target attempt {i + 1}"
                )


def audit_scenario(sc: Scenario):
    """Hypothesis audits; raises HypothesisViolation."""
    if sc.construction == "upclosure":
        f = sc.use_bound()
        audit_hypotheses(
            sc.stage_set("A"),
            sc.stage_set("B"),
            UseBoundedOperator(program=sc.program("gamma"), bound=f),
            UseBoundedOperator(program=sc.program("delta"), bound=f),
            f,
            sc.horizon,
        )
    elif sc.construction == "nosupermax":
        a = {e for e, _ in sc.sets.get("A", [])}
        b = {e for e, _ in sc.sets.get("B", [])}
        inter = a & b
        if inter:
            raise HypothesisViolation(
                f"scripted sets intersect at element {min(inter)}"
            )


def load_scenario(text: str, horizon_override: int | None = None) -> Scenario:
    sc = parse_scenario(text)
    if horizon_override is not None:
        sc.horizon = horizon_override
        validate_schema(sc)
    audit_scenario(sc)
    return sc


def load_scenario_file(path, horizon_override: int | None = None) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read scenario: {exc}")
    return load_scenario(text, horizon_override)
