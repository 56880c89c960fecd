"""Stage-indexed set machinery, the column pairing scheme, and separator checks.

Everything downstream consumes these primitives: monotone stage-stamped sets
(the c.e. approximations), finite binary strings standing in for separators,
the injective column coding with code(n, i) >= n^3, and the fresh-number
source that makes "pick a large number" reproducible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

Stage = int

PAIRING_SCHEME_ID = "greedy-cantor-cube"


# ---------------------------------------------------------------------------
# Stage-stamped sets


@dataclass(frozen=True)
class StageSet:
    """A monotone stage-indexed finite set: elements enter once, never leave.

    events holds (element, entry_stage) pairs. Snapshots are derived views;
    the event log is the ground truth so entry stages are never lost.
    """

    events: tuple[tuple[int, int], ...]
    horizon: int

    def __post_init__(self):
        seen = set()
        for element, stage in self.events:
            if element < 0 or stage < 0:
                raise ValueError(f"negative event ({element}, {stage})")
            if stage > self.horizon:
                raise ValueError(
                    f"event ({element}, {stage}) beyond horizon {self.horizon}"
                )
            if element in seen:
                raise ValueError(f"element {element} enters more than once")
            seen.add(element)
        ordered = tuple(sorted(self.events, key=lambda ev: (ev[1], ev[0])))
        object.__setattr__(self, "events", ordered)

    def snapshot(self, s: Stage) -> frozenset[int]:
        """Elements with entry stage <= s."""
        if s > self.horizon:
            raise ValueError(f"horizon exceeded: stage {s} > horizon {self.horizon}")
        if s < 0:
            raise ValueError(f"negative stage {s}")
        return frozenset(e for e, t in self.events if t <= s)

    def entry_stage(self, element: int) -> int | None:
        for e, t in self.events:
            if e == element:
                return t
        return None

    def final(self) -> frozenset[int]:
        return self.snapshot(self.horizon)

    def __len__(self) -> int:
        return len(self.events)


class StageSetBuilder:
    """Mutable accumulator used while a construction is running."""

    def __init__(self, horizon: int):
        self.horizon = horizon
        self._entry: dict[int, int] = {}

    def add(self, element: int, stage: int) -> bool:
        """Record entry; returns False (no-op) when the element is present."""
        if element in self._entry:
            return False
        self._entry[element] = stage
        return True

    def __contains__(self, element: int) -> bool:
        return element in self._entry

    def entry_stage(self, element: int) -> int | None:
        return self._entry.get(element)

    def members(self) -> set[int]:
        return set(self._entry)

    def freeze(self) -> StageSet:
        events = tuple(sorted(self._entry.items(), key=lambda ev: (ev[1], ev[0])))
        return StageSet(events=events, horizon=self.horizon)


# ---------------------------------------------------------------------------
# Separator snapshots


@dataclass(frozen=True)
class SeparatorSnapshot:
    """A finite binary string read as a subset of [0, length)."""

    bits: str

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError("bits must be a 0/1 string")

    @property
    def length(self) -> int:
        return len(self.bits)

    def __getitem__(self, position: int) -> int:
        return 1 if self.bits[position] == "1" else 0

    def members(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.bits) if c == "1")

    @staticmethod
    def from_set(members, length: int) -> "SeparatorSnapshot":
        return SeparatorSnapshot(
            "".join("1" if i in members else "0" for i in range(length))
        )


def is_separator(x: SeparatorSnapshot, a, b) -> bool:
    """True iff a is contained in x and x misses b entirely."""
    for e in a:
        if e >= x.length:
            raise ValueError(f"domain mismatch: element {e} >= length {x.length}")
    for e in b:
        if e >= x.length:
            raise ValueError(f"domain mismatch: element {e} >= length {x.length}")
    return all(x[e] == 1 for e in a) and all(x[e] == 0 for e in b)


# ---------------------------------------------------------------------------
# Column pairing


class PairingScheme:
    """Greedy column coding: walk pairs (n, i) in Cantor diagonal order
    ((0,0), (1,0), (0,1), (2,0), ...) and give each the least natural >= n^3
    not yet taken.

    Injective by construction, code(n, i) >= n^3, and dense enough that the
    whole of N is eventually covered, so decoding a code only takes extending
    the walk until the least unassigned value passes it.
    """

    name = PAIRING_SCHEME_ID

    def __init__(self):
        self._code: dict[tuple[int, int], int] = {}
        self._pair_of: dict[int, tuple[int, int]] = {}
        self._used: set[int] = set()
        self._min_unused = 0
        self._diag = 0  # next diagonal to enumerate
        self._next_free: dict[int, int] = {}  # floor -> scan start hint
        self._lock = threading.Lock()  # runs may share the process-wide scheme

    def _assign_diagonal(self):
        d = self._diag
        for n in range(d, -1, -1):
            i = d - n
            floor = n * n * n
            c = max(floor, self._next_free.get(floor, floor))
            while c in self._used:
                c += 1
            self._used.add(c)
            self._next_free[floor] = c + 1
            self._code[(n, i)] = c
            self._pair_of[c] = (n, i)
        while self._min_unused in self._used:
            self._min_unused += 1
        self._diag += 1

    def code(self, n: int, i: int) -> int:
        if n < 0 or i < 0:
            raise ValueError("pair components must be naturals")
        with self._lock:
            while (n, i) not in self._code:
                self._assign_diagonal()
            return self._code[(n, i)]

    def decode(self, c: int) -> tuple[int, int] | None:
        if c < 0:
            return None
        with self._lock:
            while self._min_unused <= c and c not in self._pair_of:
                self._assign_diagonal()
            return self._pair_of.get(c)


_SCHEME = PairingScheme()


def pair(n: int, i: int) -> int:
    return _SCHEME.code(n, i)


def unpair(c: int) -> tuple[int, int] | None:
    return _SCHEME.decode(c)


# ---------------------------------------------------------------------------
# Fresh numbers


class FreshSource:
    """Single source for every "pick a large/fresh number" choice in a run.

    Tracks the maximum of every number recorded in the trace so far; fresh()
    hands out that maximum plus one. Keeps runs reproducible without a seed.
    """

    def __init__(self):
        self._max = -1

    def note(self, *numbers: int):
        for v in numbers:
            if v > self._max:
                self._max = v

    def fresh(self) -> int:
        self._max += 1
        return self._max
