"""Finite, scriptable oracle functionals and use-bounded operators.

A functional is a finite rule table, not an interpreter: every construction
here only ever consults a functional on finitely many (oracle prefix, input)
pairs below the horizon, and rule tables make adversaries exactly scriptable.
Rules carry an availability stage so a scenario can delay convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .enumcore import SeparatorSnapshot


@dataclass(frozen=True)
class OracleRule:
    guard: tuple[tuple[int, int], ...]  # (oracle position, required bit)
    input: int
    output: int
    use: int
    available_at: int = 0

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(sorted(self.guard)))
        positions = [p for p, _ in self.guard]
        if len(set(positions)) != len(positions):
            raise ValueError("guard mentions a position twice")
        for p, b in self.guard:
            if p < 0 or b not in (0, 1):
                raise ValueError(f"bad guard entry ({p}, {b})")
            if p >= self.use:
                raise ValueError(
                    f"use-honesty violated: guard position {p} >= use {self.use}"
                )
        if self.input < 0 or self.use < 0 or self.available_at < 0:
            raise ValueError("rule fields must be naturals")
        if self.output not in (0, 1):
            raise ValueError("output must be a bit")

    def guard_satisfied(self, oracle_bits: str) -> bool:
        return all(oracle_bits[p] == "01"[b] for p, b in self.guard)


def _guards_compatible(g1, g2) -> bool:
    m = dict(g1)
    return all(m.get(p, b) == b for p, b in g2)


class OracleProgram:
    """A deterministic finite functional.

    Determinism: two rules for the same input whose guards could both be
    satisfied by one oracle must agree on output and use (availability may
    differ; it only delays convergence).
    """

    def __init__(self, rules=()):
        self.rules = tuple(rules)
        self._by_input: dict[int, list[OracleRule]] = {}
        for r in self.rules:
            self._by_input.setdefault(r.input, []).append(r)
        for y, rs in self._by_input.items():
            for i in range(len(rs)):
                for j in range(i + 1, len(rs)):
                    a, b = rs[i], rs[j]
                    if _guards_compatible(a.guard, b.guard) and (
                        a.output != b.output or a.use != b.use
                    ):
                        raise ValueError(
                            f"nondeterministic program: rules for input {y} with "
                            f"compatible guards disagree on output or use"
                        )
        # Largest C such that inputs [0, C) all have at least one rule.
        c = 0
        while c in self._by_input:
            c += 1
        self.contiguous_cover = c

    def __len__(self):
        return len(self.rules)

    def rules_for(self, y: int) -> list[OracleRule]:
        return self._by_input.get(y, [])

    def wake_stages(self) -> list[int]:
        """Stages at which a rule can newly come into play: its availability,
        its use (the oracle must be at least that long), and one past its
        largest guard position."""
        stages = set()
        for r in self.rules:
            stages.add(r.available_at)
            stages.add(r.use)
            if r.guard:
                stages.add(max(p for p, _ in r.guard) + 1)
        return sorted(stages)


EMPTY_PROGRAM = OracleProgram()


def evaluate(prog: OracleProgram, oracle, y: int, s: int):
    """Run the functional on a finite oracle string at stage s.

    Returns (output, use) when some rule matches, None otherwise. A rule
    matches when it is available by stage s, the oracle is at least as long
    as its use, and its guard holds on the oracle. Among matching rules the
    one with least use (tie: least availability) answers; the determinism
    invariant makes the answer unique anyway.
    """
    bits = oracle.bits if isinstance(oracle, SeparatorSnapshot) else oracle
    best = None
    for r in prog.rules_for(y):
        if r.available_at > s or r.use > len(bits):
            continue
        if not r.guard_satisfied(bits):
            continue
        key = (r.use, r.available_at)
        if best is None or key < best[0]:
            best = (key, r)
    if best is None:
        return None
    rule = best[1]
    return (rule.output, rule.use)


# ---------------------------------------------------------------------------
# Use bounds and wtt operators


@dataclass(frozen=True)
class UseBound:
    """A finite monotone table f with f(x) > x, bounding oracle use."""

    table: tuple[int, ...]

    def __post_init__(self):
        prev = None
        for x, fx in enumerate(self.table):
            if fx <= x:
                raise ValueError(f"use bound not strict: f({x}) = {fx}")
            if prev is not None and fx < prev:
                raise ValueError(f"use bound not monotone at {x}")
            prev = fx

    @property
    def domain(self) -> int:
        return len(self.table)

    def __call__(self, x: int) -> int:
        if x < 0 or x >= len(self.table):
            raise ValueError(f"bound table exhausted at {x}")
        return self.table[x]


@dataclass(frozen=True)
class UseBoundedOperator:
    """A wtt operator: a program whose use on input x never exceeds bound(x)."""

    program: OracleProgram
    bound: UseBound

    def __post_init__(self):
        for r in self.program.rules:
            if r.input >= self.bound.domain:
                raise ValueError(
                    f"bound table exhausted: rule input {r.input} outside table"
                )
            if r.use > self.bound(r.input):
                raise ValueError(
                    f"rule for input {r.input} has use {r.use} > bound "
                    f"{self.bound(r.input)}"
                )


def wtt_apply(op: UseBoundedOperator, oracle_members, x: int, s: int):
    """Apply the operator to the oracle set restricted below bound(x).

    Returns the output bit, or None when the computation diverges at stage s.
    """
    limit = op.bound(x)  # raises "bound table exhausted" outside the table
    bits = "".join("1" if i in oracle_members else "0" for i in range(limit))
    res = evaluate(op.program, bits, x, s)
    return None if res is None else res[0]
