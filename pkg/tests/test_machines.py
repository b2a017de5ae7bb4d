import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import randlab
from randlab import ConstructionError, PreconditionError, PrefixFreeMachine
from randlab import cells
from randlab.machines import semimeasure_superadditive


F = Fraction
TWO_CODE_MACHINE = {"0": "0", "10": "11"}


def test_complexity_table_scan():
    m = PrefixFreeMachine(TWO_CODE_MACHINE)
    assert m.complexity("11") == 2
    assert m.complexity("0") == 1
    assert m.complexity("01") == math.inf


def test_semimeasure_values():
    m = PrefixFreeMachine(TWO_CODE_MACHINE)
    assert m.semimeasure("") == F(3, 4)
    assert m.semimeasure("1") == F(1, 4)
    assert m.semimeasure("00") == 0


def test_prefix_free_domain_enforced():
    with pytest.raises(ConstructionError):
        PrefixFreeMachine({"0": "1", "01": "1"})
    relaxed = PrefixFreeMachine({"0": "1", "01": "1"}, relaxed=True)
    assert relaxed.semimeasure("1") == F(3, 4)
    with pytest.raises(ConstructionError):
        PrefixFreeMachine({"0": "", "1": "", "00": ""}, relaxed=True)  # weight > 1


def test_kc_build_worked_case():
    m = randlab.kc_build([(1, "0"), (2, "11")])
    assert m.kraft_weight() == F(3, 4)
    assert m.complexity("11") <= 2
    assert any(len(c) == 1 and out == "0" for c, out in m.table.items())
    assert any(len(c) == 2 and out == "11" for c, out in m.table.items())


def test_kc_build_empty():
    assert len(randlab.kc_build([])) == 0


def test_kc_build_kraft_violation():
    with pytest.raises(PreconditionError):
        randlab.kc_build([(1, "0"), (1, "1"), (2, "00")])


def test_kc_build_duplicate_requests():
    m = randlab.kc_build([(3, "1"), (3, "1"), (2, "1")])
    codes = [c for c, out in m.table.items() if out == "1"]
    assert sorted(len(c) for c in codes) == [2, 3, 3]


def test_kc_deterministic():
    reqs = [(2, "01"), (1, "1"), (3, "000")]
    assert randlab.kc_build(reqs).table == randlab.kc_build(reqs).table


def _random_requests(rng):
    total = F(0)
    out = []
    for _ in range(rng.randint(1, 16)):
        n = rng.randint(1, 10)
        if total + F(1, 2**n) > 1:
            continue
        total += F(1, 2**n)
        out.append((n, "".join(rng.choice("01") for _ in range(rng.randint(0, 6)))))
    return out


@given(st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_kc_build_postconditions(seed):
    rng = random.Random(seed)
    reqs = _random_requests(rng)
    m = randlab.kc_build(reqs)
    assert m.kraft_weight() == randlab.request_weight(reqs)
    assert semimeasure_superadditive(m)
    for n, sigma in reqs:
        assert any(len(c) == n and out == sigma for c, out in m.table.items())
        assert m.complexity(sigma) <= n


def test_classify_bounded(fair):
    m = PrefixFreeMachine(TWO_CODE_MACHINE)
    result = randlab.classify_machine(m, fair)
    assert result.computable_measure
    assert result.bounded_by


def test_classify_unbounded(fair):
    m = PrefixFreeMachine({"0": "0", "10": "01"})  # semimeasure(0) = 3/4 > 1/2
    assert m.semimeasure("0") == F(3, 4)
    assert randlab.classify_machine(m, fair).bounded_by is False
    assert randlab.classify_machine(m).bounded_by is None


def test_superadditivity_direct():
    m = PrefixFreeMachine({"00": "0", "01": "00", "1": "01"})
    assert semimeasure_superadditive(m)
    assert m.semimeasure("0") >= m.semimeasure("00") + m.semimeasure("01")


def test_deficiency_worked_case():
    machine = randlab.kc_build([(2, "11")])
    dec = cells.binary_digits()
    trace = randlab.deficiency_trace(machine, dec, F(7, 8), 2)
    assert not trace.not_random_by_nullity
    assert [(r.n, r.d_low, r.d_high) for r in trace.rows] == [(1, -math.inf, -math.inf), (2, 0, 0)]


def test_deficiency_empty_machine():
    trace = randlab.deficiency_trace(PrefixFreeMachine({}), cells.binary_digits(), F(1, 3), 4)
    assert all(r.d_low == -math.inf and r.d_high == -math.inf for r in trace.rows)
    assert len(trace.rows) == 4


def test_deficiency_null_cell_flag(null_at_one):
    machine = randlab.kc_build([(2, "11")])
    trace = randlab.deficiency_trace(machine, cells.natural(null_at_one), "111", 3)
    assert trace.not_random_by_nullity
    assert trace.nullity_at == 1
    assert trace.rows == []


def test_deficiency_non_dyadic_brackets():
    # ternary-grouped cells have non-dyadic masses, so the -log2 term brackets
    machine = randlab.kc_build([(1, "1")])
    trace = randlab.deficiency_trace(machine, cells.bary_grouped(3), F(1, 2), 3)
    first = trace.rows[0]  # cell mass 2/3: -log2 strictly between 0 and 1
    assert (first.neg_log_mass_low, first.neg_log_mass_high) == (0, 1)
    assert (first.d_low, first.d_high) == (-1, 0)


def test_deficiency_undetermined_point():
    machine = randlab.kc_build([(2, "11")])
    trace = randlab.deficiency_trace(machine, cells.binary_digits(), F(1, 2), 4)
    assert trace.undetermined_at == 1
    assert trace.rows == []


def test_bounded_machine_quotient_stays_below_one(fair):
    # domination read as a quotient: semimeasure/measure never exceeds 1
    m = PrefixFreeMachine(TWO_CODE_MACHINE)
    assert randlab.classify_machine(m, fair).bounded_by
    for n in range(m.max_output_length() + 1):
        for bits in __import__("itertools").product("01", repeat=n):
            sigma = "".join(bits)
            assert m.semimeasure(sigma) <= fair.mass(sigma)
