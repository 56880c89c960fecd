"""Finite-injury construction of disjoint c.e. sets A, B and auxiliary D.

Two families of strategies run under a priority scheduler:

* preservation strategies (one per k) freeze a number out of A and B by
  restraining everything below the current stage once the stage passes k;
* diagonalization strategies (one per functional index e) repeatedly claim a
  fresh number n, hunt for a full-width oracle string sigma compatible with
  the current A/B whose functional output matches D up to n, copy the tail of
  sigma into A/B above their restraint, and put n into D.

Every B entry is accompanied by a smaller same-stage A entry, which is the
whole point of the construction. Strategies are interleaved in priority order
(preservation 0, diagonalization 0, preservation 1, ...) and at stage s the
first s of them run; whoever acts re-initializes everything below itself.

Enumerations performed at stage s are stamped s+1 and are always < s.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from dataclasses import dataclass, field

from .enumcore import FreshSource, StageSetBuilder
from .functionals import EMPTY_PROGRAM, OracleProgram, evaluate
from .report import CheckResult


@dataclass
class NStrategyState:
    k: int
    satisfied_at: int | None = None
    restraint: int = 0


@dataclass
class RStrategyState:
    e: int
    restraint: int = 0  # stage as of which the strategy was last initialized
    claimed_n: int | None = None
    phase: str = "claiming"  # claiming | searching
    memo_epoch: int = -1
    memo_n: int = -1
    memo_wake: int = 0


# ---------------------------------------------------------------------------
# sigma search


def sigma_search(prog: OracleProgram, n: int, s: int, a_mem, b_mem, d_mem):
    """Least sigma in {0,1}^s (lexicographic, 0 before 1) such that

    * the functional halts on every y <= n with output matching D at y, and
    * sigma is 1 on A-members and 0 on B-members below s.

    Returns the bit string, or None when no such sigma exists at stage s.
    The search works on the finitely many positions rule guards mention;
    every other position is unconstrained and therefore 0 in the least
    solution.
    """
    if n >= prog.contiguous_cover:
        return None
    forced: dict[int, int] = {}
    for x in a_mem:
        if x < s:
            forced[x] = 1
    for x in b_mem:
        if x < s:
            forced[x] = 0

    # Candidate guards per needed input, filtered by availability, width,
    # required output, and compatibility with the forced bits.
    constraints: list[list[tuple[tuple[int, int], ...]]] = []
    for y in range(n + 1):
        want = 1 if y in d_mem else 0
        cands = []
        satisfied = False
        for r in prog.rules_for(y):
            if r.available_at > s or r.use > s or r.output != want:
                continue
            ok = True
            fully_forced = True
            for p, b in r.guard:
                v = forced.get(p)
                if v is None:
                    fully_forced = False
                elif v != b:
                    ok = False
                    break
            if not ok:
                continue
            if fully_forced:
                satisfied = True
                break
            cands.append(r.guard)
        if satisfied:
            continue
        if not cands:
            return None
        constraints.append(cands)

    assigned: dict[int, int] = {}

    def value(p):
        v = forced.get(p)
        return assigned.get(p) if v is None else v

    # Unit propagation: a constraint with a single candidate pins its guard.
    queue = list(range(len(constraints)))
    live = [True] * len(constraints)
    while queue:
        fresh_bits = False
        next_queue = []
        for ci in queue:
            if not live[ci]:
                continue
            cands = []
            satisfied = False
            for g in constraints[ci]:
                ok = True
                full = True
                for p, b in g:
                    v = value(p)
                    if v is None:
                        full = False
                    elif v != b:
                        ok = False
                        break
                if not ok:
                    continue
                if full:
                    satisfied = True
                    break
                cands.append(g)
            if satisfied:
                live[ci] = False
                continue
            if not cands:
                return None
            constraints[ci] = cands
            if len(cands) == 1:
                for p, b in cands[0]:
                    if value(p) is None:
                        assigned[p] = b
                        fresh_bits = True
                live[ci] = False
            else:
                next_queue.append(ci)
        queue = next_queue if fresh_bits else []

    remaining = [constraints[ci] for ci in range(len(constraints)) if live[ci]]

    if remaining:
        # Solve independent components with lexicographic backtracking.
        pos_of = [sorted({p for g in cs for p, _ in g if value(p) is None}) for cs in remaining]
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for ps in pos_of:
            for p in ps:
                parent.setdefault(p, p)
            for p in ps[1:]:
                union(ps[0], p)
        comp_cons: dict[int, list[int]] = {}
        for i, ps in enumerate(pos_of):
            root = find(ps[0])
            comp_cons.setdefault(root, []).append(i)
        for root in sorted(comp_cons):
            idxs = comp_cons[root]
            positions = sorted({p for i in idxs for p in pos_of[i]})
            cons = [remaining[i] for i in idxs]

            def feasible():
                for cs in cons:
                    ok = False
                    for g in cs:
                        good = True
                        for p, b in g:
                            v = value(p)
                            if v is not None and v != b:
                                good = False
                                break
                        if good:
                            ok = True
                            break
                    if not ok:
                        return False
                return True

            def dfs(i):
                if i == len(positions):
                    return feasible()
                p = positions[i]
                if value(p) is not None:
                    return feasible() and dfs(i + 1)
                for bit in (0, 1):
                    assigned[p] = bit
                    if feasible() and dfs(i + 1):
                        return True
                    del assigned[p]
                return False

            if not dfs(0):
                return None

    bits = ["0"] * s
    for p, b in forced.items():
        bits[p] = "01"[b]
    for p, b in assigned.items():
        bits[p] = "01"[b]
    sigma = "".join(bits)

    # Honest re-check through the evaluator.
    for y in range(n + 1):
        want = 1 if y in d_mem else 0
        res = evaluate(prog, sigma, y, s)
        if res is None or res[0] != want:
            raise AssertionError("sigma search produced a non-witness")
    return sigma


def apply_sigma(sigma: str, r: int, a_mem, b_mem):
    """Execute the copy step for a found sigma.

    Picks the least m >= r with sigma(m) = 1 and m not yet in A; when it
    exists, every position in [m, len(sigma)) joins A (bit 1) or B (bit 0)
    unless already present. Returns (m, new_a, new_b); m is None when no
    position qualifies, in which case nothing is enumerated.
    """
    m = None
    for x in range(r, len(sigma)):
        if sigma[x] == "1" and x not in a_mem:
            m = x
            break
    if m is None:
        return None, (), ()
    new_a, new_b = [], []
    for x in range(m, len(sigma)):
        if sigma[x] == "1":
            if x not in a_mem:
                new_a.append(x)
        else:
            if x not in b_mem:
                new_b.append(x)
    return m, tuple(new_a), tuple(new_b)


# ---------------------------------------------------------------------------
# strategy steps (shared by the reference and the event-driven runner)


def n_strategy_step(st: NStrategyState, s: int, run: "AnticompleteRun") -> bool:
    """Acts (once per initialization) at the first stage s > k, restraining
    everything at or below s by imposing restraint s + 1."""
    if st.satisfied_at is None and s > st.k:
        st.satisfied_at = s
        st.restraint = s + 1
        run._emit(("nact", s, st.k, s + 1))
        return True
    return False


def r_strategy_step(
    st: RStrategyState, s: int, run: "AnticompleteRun", use_memo: bool
) -> bool:
    """One loop iteration: claim a fresh number if none is claimed, then
    search for sigma; on success copy the tail into A/B above the restraint,
    put the claimed number into D, and return to the claiming phase."""
    prog = run.programs.get(st.e, EMPTY_PROGRAM)
    if st.claimed_n is None:
        n = run.fresh.fresh()
        st.claimed_n = n
        st.phase = "searching"
        run._emit(("rclaim", s, st.e, n))
    if len(prog) == 0:
        return False
    if (
        use_memo
        and st.memo_epoch == run.epoch
        and st.memo_n == st.claimed_n
        and s < st.memo_wake
    ):
        return False
    sigma = sigma_search(
        prog, st.claimed_n, s, run.a._entry, run.b._entry, run.d._entry
    )
    if sigma is None:
        st.memo_epoch = run.epoch
        st.memo_n = st.claimed_n
        wakes = run._wakes(st.e)
        i = bisect_right(wakes, s)
        st.memo_wake = wakes[i] if i < len(wakes) else run.horizon + 1
        if use_memo and st.memo_wake <= run.horizon:
            run._schedule(st.memo_wake, 2 * st.e + 1)
        return False
    m, new_a, new_b = apply_sigma(sigma, st.restraint, run.a._entry, run.b._entry)
    for x in new_a:
        run.a.add(x, s + 1)
    for x in new_b:
        run.b.add(x, s + 1)
    run.d.add(st.claimed_n, s + 1)
    run._emit(("ract", s, st.e, st.claimed_n, st.restraint, m, new_a, new_b))
    run.epoch += 1
    if use_memo:
        for e in run.scripted:
            run._schedule(s + 1, 2 * e + 1)
    st.claimed_n = None
    st.phase = "claiming"
    return True


# ---------------------------------------------------------------------------
# the scheduler


class AnticompleteRun:
    """Priority scheduler over the interleaved strategy list.

    run_stage() is the reference stepper: at stage s it steps every strategy
    with index < s in priority order. run_to_horizon(fast=True) is the
    event-driven equivalent that skips strategies whose step is provably a
    no-op; the two produce identical traces (tested).
    """

    def __init__(self, programs: dict[int, OracleProgram], horizon: int):
        self.programs = dict(programs)
        self.horizon = horizon
        self.a = StageSetBuilder(horizon)
        self.b = StageSetBuilder(horizon)
        self.d = StageSetBuilder(horizon)
        self.fresh = FreshSource()
        self.records: list[tuple] = []
        self.epoch = 0
        self.stage = 0
        self.nstates: list[NStrategyState] = []
        self.rstates: list[RStrategyState] = []
        self.scripted = sorted(e for e, p in self.programs.items() if len(p) > 0)
        self._wake_cache: dict[int, list[int]] = {}
        self._pending: dict[int, list[int]] = {}
        self._last_act_stage = -1

    # -- plumbing

    def _wakes(self, e: int) -> list[int]:
        w = self._wake_cache.get(e)
        if w is None:
            w = self.programs.get(e, EMPTY_PROGRAM).wake_stages()
            self._wake_cache[e] = w
        return w

    def _emit(self, record: tuple):
        self.records.append(record)
        for v in record[1:]:
            if isinstance(v, int):
                self.fresh.note(v)
            elif isinstance(v, tuple):
                self.fresh.note(*v)

    def _schedule(self, stage: int, idx: int):
        if stage <= self.horizon:
            bucket = self._pending.setdefault(stage, [])
            if idx not in bucket:
                insort(bucket, idx)

    def _materialize(self, idx: int):
        base = self._last_act_stage + 1
        while 2 * len(self.nstates) <= idx:
            self.nstates.append(NStrategyState(k=len(self.nstates)))
        while 2 * len(self.rstates) + 1 <= idx:
            self.rstates.append(
                RStrategyState(e=len(self.rstates), restraint=base)
            )

    def _reset(self, idx: int, s: int):
        if idx % 2 == 0:
            st = self.nstates[idx // 2]
            st.satisfied_at = None
            st.restraint = 0
        else:
            st = self.rstates[idx // 2]
            st.restraint = s + 1
            st.claimed_n = None
            st.phase = "claiming"
            st.memo_epoch = -1

    def _visit(self, idx: int, s: int, reset: bool, use_memo: bool) -> bool:
        self._materialize(idx)
        if reset:
            self._reset(idx, s)
        if idx % 2 == 0:
            acted = n_strategy_step(self.nstates[idx // 2], s, self)
        else:
            acted = r_strategy_step(self.rstates[idx // 2], s, self, use_memo)
        if acted:
            self._last_act_stage = s
        return acted

    # -- steppers

    def run_stage(self):
        """Reference semantics: step every strategy with index < s."""
        s = self.stage
        floor = None
        for idx in range(s):
            acted = self._visit(idx, s, reset=(floor is not None), use_memo=False)
            if acted and floor is None:
                floor = idx
        self.stage = s + 1

    def _run_stage_fast(self):
        s = self.stage
        pend = self._pending.pop(s, [])
        if s >= 1 and (s - 1) not in pend:
            insort(pend, s - 1)
        floor = None
        cur = -1
        i = 0
        while True:
            if floor is None:
                if i >= len(pend):
                    break
                idx = pend[i]
                i += 1
                if idx <= cur or idx >= s:
                    continue
            else:
                idx = cur + 1
                if idx >= s:
                    break
            cur = idx
            acted = self._visit(idx, s, reset=(floor is not None), use_memo=True)
            if acted and floor is None:
                floor = idx
        self.stage = s + 1

    def run_to_horizon(self, fast: bool = True):
        while self.stage < self.horizon:
            if fast:
                self._run_stage_fast()
            else:
                self.run_stage()
        return self


def run_anticomplete(programs: dict[int, OracleProgram], horizon: int, fast=True):
    run = AnticompleteRun(programs, horizon)
    run.run_to_horizon(fast=fast)
    return run


# ---------------------------------------------------------------------------
# trace verification


def verify_anticomplete(records, a_events, b_events, d_events, horizon):
    """Invariant suite over a finished run's records and final event logs.

    Returns (checks, caveats). Works purely on the recorded data; nothing is
    re-run.
    """
    checks: list[CheckResult] = []
    caveats: list[str] = []

    acts = []  # (stage, idx) in record order
    racts = []
    nacts = []
    claims = []
    for rec in records:
        if rec[0] == "nact":
            _, s, k, restraint = rec
            acts.append((s, 2 * k))
            nacts.append((s, k, restraint))
        elif rec[0] == "ract":
            _, s, e, n, r, m, new_a, new_b = rec
            acts.append((s, 2 * e + 1))
            racts.append((s, e, n, r, m, new_a, new_b))
        elif rec[0] == "rclaim":
            claims.append((rec[1], rec[2], rec[3]))

    # (i) every B entry has a smaller same-stage A entry
    ok = True
    detail = ""
    for s, e, n, r, m, new_a, new_b in racts:
        for x in new_b:
            if not any(y < x for y in new_a):
                ok = False
                detail = f"stage {s + 1} strategy r{e} element {x}"
                break
        if not ok:
            break
    checks.append(CheckResult("wtt-companion", ok, detail))

    # (ii) no strategy enumerates below its restraint; recorded restraint
    # matches the one implied by the act history.
    ok = True
    detail = ""
    for s, e, n, r, m, new_a, new_b in racts:
        idx = 2 * e + 1
        implied = 0
        for t, aidx in acts:
            if t > s or (t == s and aidx >= idx):
                break
            if aidx < idx:
                implied = max(implied, t + 1)
        if r != implied:
            ok = False
            detail = f"stage {s} strategy r{e} recorded restraint {r} != {implied}"
            break
        low = [x for x in (list(new_a) + list(new_b)) if x < r]
        if m is not None and m < r:
            low.append(m)
        if low:
            ok = False
            detail = f"stage {s} strategy r{e} element {min(low)} below restraint {r}"
            break
    checks.append(CheckResult("restraint-discipline", ok, detail))

    # (iii) A and B disjoint
    a_set = {e for e, _ in a_events}
    b_set = {e for e, _ in b_events}
    inter = a_set & b_set
    checks.append(
        CheckResult(
            "disjoint-ab",
            not inter,
            f"element {min(inter)}" if inter else "",
        )
    )

    # (iv) entries at stage s+1 are smaller than s
    ok = True
    detail = ""
    for e, t in sorted(a_events) + sorted(b_events):
        if e >= t - 1:
            ok = False
            detail = f"element {e} entered at stage {t}"
            break
    checks.append(CheckResult("entry-bound", ok, detail))

    # N preservation: an n-strategy acting at stage s and never initialized
    # afterward keeps s out of A and B.
    act_stages = sorted(acts)
    suffix_min = []
    m = float("inf")
    for t, idx in reversed(act_stages):
        m = min(m, idx)
        suffix_min.append(m)
    suffix_min.reverse()
    ok = True
    detail = ""
    union = a_set | b_set
    for s, k, restraint in nacts:
        j = bisect_right(act_stages, (s, 2 * k))
        initialized_later = j < len(act_stages) and suffix_min[j] < 2 * k
        if not initialized_later and s in union:
            ok = False
            detail = f"n{k} acted at stage {s} but {s} entered A or B"
            break
    checks.append(CheckResult("n-preservation", ok, detail))

    # Claims strictly increase across the whole run.
    ok = True
    detail = ""
    prev = -1
    for s, e, n in claims:
        if n <= prev:
            ok = False
            detail = f"claim {n} at stage {s} not above previous {prev}"
            break
        prev = n
    checks.append(CheckResult("claim-freshness", ok, detail))

    # D bookkeeping: every D entry is produced by exactly one recorded act.
    d_from_racts = sorted((n, s + 1) for s, e, n, r, m, na, nb in racts)
    ok = sorted(d_events) == d_from_racts
    checks.append(
        CheckResult(
            "d-entries-have-acts",
            ok,
            "" if ok else "final D does not match recorded acts",
        )
    )

    # A/B bookkeeping: final logs match recorded enumerations.
    ab_ok = sorted(a_events) == sorted(
        (x, s + 1) for s, e, n, r, m, na, nb in racts for x in na
    ) and sorted(b_events) == sorted(
        (x, s + 1) for s, e, n, r, m, na, nb in racts for x in nb
    )
    checks.append(
        CheckResult(
            "records-consistent",
            ab_ok,
            "" if ab_ok else "final A/B do not match recorded acts",
        )
    )

    # Per-strategy D counts, with a stability note over the final fifth.
    window = max(1, horizon // 5)
    cutoff = horizon - window
    per: dict[int, int] = {}
    late: dict[int, int] = {}
    for s, e, n, r, m, na, nb in racts:
        per[e] = per.get(e, 0) + 1
        if s >= cutoff:
            late[e] = late.get(e, 0) + 1
    for e in sorted(per):
        caveats.append(
            f"strategy r{e} enumerated {per[e]} numbers into D"
            f" ({late.get(e, 0)} in the final {window} stages);"
            " finiteness beyond the horizon is not decidable"
        )

    return checks, caveats
