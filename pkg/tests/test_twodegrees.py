"""Spectrum construction: axioms, blocking, column coding, censuses."""

import random

import pytest

from sepsim.enumcore import pair
from sepsim.errors import HardFault
from sepsim.functionals import OracleProgram, OracleRule
from sepsim.twodegrees import (
    VeAxiom,
    block_census,
    column_threshold,
    cube_census,
    decode_b_from_c,
    decode_c_from_b,
    run_twodegrees,
    verify_twodegrees,
)


def prefix_program(epochs, width):
    """One rule set per oracle-prefix epoch: guards pin the full prefix, so
    distinct epochs are incompatible and the program stays deterministic."""
    rules = []
    for prefix, zeros, avail in epochs:
        guard = tuple((p, int(prefix[p])) for p in range(len(prefix)))
        for y in range(width):
            rules.append(
                OracleRule(
                    guard=guard,
                    input=y,
                    output=0 if y in zeros else 1,
                    use=len(prefix),
                    available_at=avail,
                )
            )
    return OracleProgram(rules)


def w_epoch_program(w_events, length, zeros_per_epoch, width, avail=0):
    """Epochs follow the scripted W evolution; epoch prefixes are the
    successive snapshots, all of one length."""
    stages = sorted({0} | {t for _, t in w_events})
    epochs = []
    members = set()
    events_by_stage = {}
    for x, t in w_events:
        events_by_stage.setdefault(t, []).append(x)
    for i, t in enumerate(stages):
        members |= set(events_by_stage.get(t, []))
        prefix = "".join("1" if p in members else "0" for p in range(length))
        zeros = zeros_per_epoch[min(i, len(zeros_per_epoch) - 1)]
        epochs.append((prefix, zeros, avail))
    return prefix_program(epochs, width)


class TestThresholds:
    def test_thresholds(self):
        assert column_threshold(0) == 0
        assert column_threshold(1) == 3
        assert column_threshold(2) == 15  # pair(2, 4) lands on 15
        assert column_threshold(3) == 42  # pair(3, 9) lands on 42


class TestRStrategy:
    def test_empty_program_no_axioms(self):
        run = run_twodegrees([], [], {0: []}, {0: OracleProgram()}, 50)
        assert run.axioms == []

    def test_three_phase_script(self):
        # axiom created once the witness fits under the stage, W frozen,
        # then the number enters K and the witness is promoted
        prog = prefix_program([("0000", {9}, 0)], 30)
        run = run_twodegrees([], [(0, 15)], {0: []}, {0: prog}, 40)
        axioms = [r for r in run.records if r[0] == "axiom"]
        assert axioms[0][:6] == ("axiom", 9, 0, 0, 9, 4)
        promotes = [r for r in run.records if r[0] == "promote"]
        assert promotes == [("promote", 15, 0, 0, 9)]
        assert run.a.entry_stage(9) == 16
        checks, _ = verify_twodegrees(run)
        assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]

    def test_w_change_invalidates_and_researches(self):
        w_events = [(2, 12)]
        prog = prefix_program(
            [("0000", {9}, 0), ("0010", {11}, 0)], 30
        )
        run = run_twodegrees([], [], {0: w_events}, {0: prog}, 40)
        kills = [r for r in run.records if r[0] == "kill"]
        assert kills and kills[0][:4] == ("kill", 12, 0, 0)
        # the fresh epoch yields a new axiom the same stage the old one dies
        recreated = [
            r for r in run.records if r[0] == "axiom" and r[1] == 12 and r[4] == 11
        ]
        assert recreated
        assert run.a.members() == set()  # nothing promoted without K
        checks, _ = verify_twodegrees(run)
        assert all(c.passed for c in checks)

    def test_promotion_witness_in_b_is_a_hard_fault(self):
        prog = prefix_program([("0000", {9}, 0)], 30)
        run = run_twodegrees([], [], {0: []}, {0: prog}, 12).run()
        run.b.add(9, 10)  # simulate a corrupted scenario
        run.k_by_stage[12] = [0]
        run.horizon = 14
        run._k_now.add(0)
        with pytest.raises(HardFault, match="already enumerated into B"):
            run.r_strategy_step(0, 12)


class TestPStrategy:
    def test_never_fires_without_c(self):
        run = run_twodegrees([], [], {}, {}, 50)
        assert [r for r in run.records if r[0] == "pfire"] == []
        assert run.b.members() == set()

    def test_fires_least_slot(self):
        run = run_twodegrees([(2, 7)], [], {}, {}, 50)
        fires = [r for r in run.records if r[0] == "pfire"]
        assert fires == [("pfire", 7, 2, 0, pair(2, 0))]
        assert run.b.entry_stage(pair(2, 0)) == 8

    def test_skips_blocked_slot(self):
        # an axiom with witness pair(3, 0) = 27 blocks slot 0 of column 3
        prog = prefix_program([("0000", {27}, 0)], 40)
        run = run_twodegrees([(3, 30)], [], {0: []}, {0: prog}, 45)
        fires = [r for r in run.records if r[0] == "pfire"]
        assert fires == [("pfire", 30, 3, 1, pair(3, 1))]
        checks, _ = verify_twodegrees(run)
        assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]

    def test_skips_blocked_and_a_slots(self):
        # slots 0 and 1 of column 3 go into A via promotions; slot 2 fires
        prog0 = prefix_program([("0000", {27}, 0)], 40)
        prog1 = prefix_program([("0000", {28}, 0)], 40)
        run = run_twodegrees(
            [(3, 40)],
            [(2, 35)],
            {0: [], 1: []},
            {0: prog0, 1: prog1},
            50,
        )
        assert run.a.entry_stage(27) == 36
        assert run.a.entry_stage(28) == 36
        fires = [r for r in run.records if r[0] == "pfire"]
        assert fires == [("pfire", 40, 3, 2, pair(3, 2))]
        checks, _ = verify_twodegrees(run)
        assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]

    def test_column_exhaustion_is_a_hard_fault(self):
        run = run_twodegrees([], [], {}, {}, 20).run()
        run.axioms.append(
            VeAxiom(e=0, m=0, x=pair(0, 0), gamma=1, prefix="0", created_at=1)
        )
        run.live[(0, 0)] = run.axioms[-1]
        with pytest.raises(HardFault, match="no free column slot"):
            run.p_strategy_step(0, 10)


class TestCensus:
    def test_empty_run_zero(self):
        run = run_twodegrees([], [], {}, {}, 30)
        for n in range(8):
            for s in (0, 10, 30):
                assert block_census(run, n, s) == 0
        assert cube_census(run, 5, 30) == (0, 0)

    def test_single_axiom_counts_one(self):
        prog = prefix_program([("0000", {27}, 0)], 40)
        run = run_twodegrees([], [], {0: []}, {0: prog}, 40)
        assert block_census(run, 3, 39) == 1

    def test_single_firing_counts_in_cube(self):
        run = run_twodegrees([(3, 7)], [], {}, {}, 30)
        assert cube_census(run, 4, 30) == (0, 1)


class TestDecoding:
    def test_c_empty_decodes_zero(self):
        run = run_twodegrees([], [], {}, {}, 30)
        for n in range(10):
            assert decode_c_from_b(run.b.members(), n) == 0

    def test_entry_decodes_one(self):
        run = run_twodegrees([(2, 7)], [], {}, {}, 30)
        assert decode_c_from_b(run.b.members(), 2) == 1
        assert decode_c_from_b(run.b.members(), 3) == 0

    def test_b_from_c_miss_cases(self):
        run = run_twodegrees([(2, 7)], [], {}, {}, 30)
        events = tuple(run.b.freeze().events)
        # column outside C
        bit, settled = decode_b_from_c({2}, events, pair(5, 1), 30)
        assert (bit, settled) == (0, True)
        # inside C, wrong slot
        bit, settled = decode_b_from_c({2}, events, pair(2, 1), 30)
        assert (bit, settled) == (0, True)
        # inside C, right slot
        bit, settled = decode_b_from_c({2}, events, pair(2, 0), 30)
        assert (bit, settled) == (1, True)


def random_scenario(rng, horizon=300):
    n_funcs = rng.randrange(1, 3)
    w_events = {}
    programs = {}
    length = 6
    for e in range(n_funcs):
        events = []
        for x in rng.sample(range(length), rng.randrange(0, 3)):
            events.append((x, rng.randrange(2, horizon - 10)))
        w_events[e] = events
        n_epochs = len({t for _, t in events}) + 1
        zeros = []
        for _ in range(n_epochs):
            zs = set(rng.sample(range(10, 60), rng.randrange(1, 4)))
            zeros.append(zs)
        programs[e] = w_epoch_program(events, length, zeros, 70)
    k_events = [
        (m, rng.randrange(horizon // 2, horizon - 1))
        for m in rng.sample(range(3), rng.randrange(0, 3))
    ]
    c_events = [
        (n, rng.randrange(1, horizon - 1))
        for n in rng.sample(range(9), rng.randrange(1, 6))
    ]
    return c_events, k_events, w_events, programs


class TestVerifier:
    @pytest.mark.parametrize("seed", range(8))
    def test_adversarial_runs_clean(self, seed):
        rng = random.Random(seed)
        c, k, w, progs = random_scenario(rng)
        run = run_twodegrees(c, k, w, progs, 300)
        checks, _ = verify_twodegrees(run)
        bad = [c2.line() for c2 in checks if not c2.passed]
        assert not bad, bad

    def test_determinism(self):
        rng = random.Random(5)
        c, k, w, progs = random_scenario(rng)
        r1 = run_twodegrees(c, k, w, progs, 300)
        r2 = run_twodegrees(c, k, w, progs, 300)
        assert r1.records == r2.records

    def test_corrupt_axiom_prefix_flagged(self):
        prog = prefix_program([("0000", {9}, 0)], 30)
        run = run_twodegrees([], [(0, 15)], {0: []}, {0: prog}, 40)
        run.axioms[0].prefix = "0100"
        checks, _ = verify_twodegrees(run)
        by_name = {c.name: c for c in checks}
        assert not by_name["block-soundness"].passed
