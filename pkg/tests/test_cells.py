import itertools
from fractions import Fraction

import pytest

import randlab
from randlab import ConstructionError, PreconditionError, Region
from randlab import cells


F = Fraction


def test_region_construction_and_length():
    r = Region.from_pairs([(F(1, 2), F(3, 4)), (0, F(1, 4))])
    assert r.intervals == ((F(0), F(1, 4)), (F(1, 2), F(3, 4)))
    assert r.length() == F(1, 2)
    assert Region.from_pairs([(F(1, 4), F(1, 2)), (F(1, 2), F(3, 4))]).intervals == ((F(1, 4), F(3, 4)),)
    with pytest.raises(ConstructionError):
        Region.from_pairs([(F(1, 2), F(1, 4))])
    with pytest.raises(ConstructionError):
        Region.from_pairs([(0, F(1, 2)), (F(1, 4), F(3, 4))])


def test_region_set_operations():
    a = Region.interval(0, F(1, 2))
    b = Region.interval(F(1, 3), F(2, 3))
    assert a.intersect(b).intervals == ((F(1, 3), F(1, 2)),)
    assert a.subtract(b).intervals == ((F(0), F(1, 3)),)
    assert a.contains_region(Region.interval(F(1, 8), F(1, 4)))
    assert not a.contains_region(b)
    assert a.contains_point(F(1, 3)) and not a.contains_point(F(1, 2))


def test_binary_cells():
    dec = cells.binary_digits()
    assert dec.cell("01").intervals == ((F(1, 4), F(1, 2)),)
    assert dec.cell("1").intervals == ((F(1, 2), F(1, 1)),)
    assert dec.cell("").intervals == ((F(0), F(1)),)


def test_bary_cells():
    dec = cells.bary_grouped(3)
    assert dec.cell("1").intervals == ((F(1, 3), F(1)),)
    assert dec.cell_mass("1") == F(2, 3)
    assert dec.cell("10").intervals == ((F(1, 3), F(2, 3)),)
    assert dec.cell("11").intervals == ((F(2, 3), F(1)),)
    assert dec.cell("00").intervals == ((F(0), F(1, 9)),)
    quad = cells.bary_grouped(4)
    assert quad.cell("0").intervals == ((F(0), F(1, 4)),)
    assert quad.cell("110").intervals == ((F(2, 4), F(3, 4)),)
    assert quad.cell("111").intervals == ((F(3, 4), F(1)),)


def test_cell_mass_matches_geometry():
    # the closed-form masses must equal the region/box measures
    for dec in (cells.binary_digits(), cells.bary_grouped(3), cells.bary_grouped(5)):
        for n in range(7):
            for bits in itertools.product("01", repeat=n):
                sigma = "".join(bits)
                assert dec.cell_mass(sigma) == dec.cell(sigma).length(), (dec.label, sigma)
    box = cells.interleave(2)
    for n in range(7):
        for bits in itertools.product("01", repeat=n):
            sigma = "".join(bits)
            assert box.cell_mass(sigma) == box._measure(box.cell(sigma))


def test_cell_children_partition_parent():
    for dec in (cells.binary_digits(), cells.bary_grouped(3)):
        for n in range(6):
            for bits in itertools.product("01", repeat=n):
                sigma = "".join(bits)
                parent, c0, c1 = dec.cell(sigma), dec.cell(sigma + "0"), dec.cell(sigma + "1")
                assert not c0.intersects(c1)
                assert parent.subtract(c0).subtract(c1).length() == 0
                assert c0.length() + c1.length() == parent.length()


def test_name_binary_worked_case():
    dec = cells.binary_digits()
    assert dec.name_point(F(7, 10), 8).bits == "10110011"


def test_name_undetermined_at_endpoints():
    dec = cells.binary_digits()
    out = dec.name_point(F(1, 2), 1)
    assert not out.determined and out.undetermined_at == 1
    # undetermined points at depth <= 4 are exactly the cell endpoints
    endpoints = {F(k, 16) for k in range(17)}
    for k in range(33):
        x = F(k, 32)
        out = dec.name_point(x, 4)
        assert out.determined == (x not in endpoints), x
    assert dec.name_point(F(1, 3), 12).determined


def test_name_bary():
    dec = cells.bary_grouped(3)
    assert dec.name_point(F(1, 2), 2).bits == "10"
    assert dec.name_point(F(1, 2), 8).determined
    out = dec.name_point(F(1, 3), 1)
    assert not out.determined and out.undetermined_at == 1


def test_resolved_name_halfopen():
    dec = cells.binary_digits()
    assert dec.resolved_name(F(1, 2), 3) == "100"
    assert dec.resolved_name(F(0), 3) == "000"


def test_interleave_naming():
    dec = cells.interleave(2)
    point = (F(1, 2), F(1, 4))
    assert dec.resolved_name(point, 4) == "1001"
    out = dec.name_point(point, 4)
    assert not out.determined and out.undetermined_at == 1
    irrational_ish = (F(1, 3), F(1, 5))
    assert dec.name_point(irrational_ish, 8).determined


def test_decompose_open_worked_case():
    dec = cells.binary_digits()
    out = cells.decompose_open(dec, Region.interval(F(1, 3), F(2, 3)), 3)
    assert out.generators == ("011", "100")
    assert out.covered == F(1, 4)
    assert out.residual == F(1, 3) - F(1, 4)


def test_decompose_open_whole_space_and_empty():
    dec = cells.binary_digits()
    out = cells.decompose_open(dec, Region.interval(0, 1), 1)
    assert out.generators == ("",) and out.residual == 0
    out = cells.decompose_open(dec, Region.empty(), 4)
    assert out.generators == () and out.residual == 0


def test_decompose_open_rejects_boxes():
    with pytest.raises(PreconditionError):
        cells.decompose_open(cells.interleave(2), Region.interval(0, 1), 2)


def test_pushforward_binary_is_fair():
    push = cells.binary_digits().pushforward()
    assert randlab.measures_agree(push, randlab.fair_coin(), 16)


def test_pushforward_bary_masses():
    push = cells.bary_grouped(3).pushforward()
    assert push.mass("0") == F(1, 3)
    assert push.mass("1") == F(2, 3)
    assert push.mass("10") == F(1, 3)
    assert randlab.check_additivity(push, 10).ok


def test_pushforward_interleave_is_fair():
    push = cells.interleave(2).pushforward()
    assert randlab.measures_agree(push, randlab.fair_coin(), 10)


def test_refine_worked_case():
    rel = cells.refine(cells.binary_digits(), cells.bary_grouped(3), 4, target_depth=2)
    row = rel.rows["0"]
    assert row.sigmas == ("00", "0100")
    assert row.covered == F(5, 16)
    assert row.residual == F(1, 3) - F(5, 16)


def test_refine_identity():
    dec = cells.bary_grouped(3)
    rel = cells.refine(dec, cells.bary_grouped(3), 5, target_depth=3)
    for tau, row in rel.rows.items():
        assert row.sigmas == (tau,)
        assert row.residual == 0


def test_refine_residual_monotone():
    source, target = cells.binary_digits(), cells.bary_grouped(3)
    previous = None
    for depth in (4, 5, 6, 7, 8):
        rel = cells.refine(source, target, depth, target_depth=2)
        worst = {tau: row.residual for tau, row in rel.rows.items()}
        if previous is not None:
            for tau in worst:
                assert worst[tau] <= previous[tau]
        previous = worst


def test_transfer_interval_brackets_target_mass(fair):
    rel = cells.refine(cells.binary_digits(), cells.bary_grouped(3), 4, target_depth=2)
    result = cells.transfer_measure(rel, fair)
    low, high = result.interval("0")
    assert low == F(5, 16)
    assert low <= F(1, 3) <= high
    # additive compatibility of the lower bounds
    for tau in ("", "0", "1"):
        assert result.rows[tau + "0"].low + result.rows[tau + "1"].low <= result.rows[tau].high


def test_transfer_identity_zero_width(fair):
    rel = cells.refine(cells.bary_grouped(3), cells.bary_grouped(3), 4, target_depth=2)
    nu = cells.bary_grouped(3).pushforward()
    result = cells.transfer_measure(rel, nu)
    for tau, row in result.rows.items():
        assert row.low == row.high == nu.mass(tau)


def test_transfer_concentrated_measure():
    rel = cells.refine(cells.binary_digits(), cells.bary_grouped(3), 4, target_depth=1)
    nu = randlab.split_table({"": 1})  # all mass on names starting 1
    result = cells.transfer_measure(rel, nu)
    assert result.rows["1"].low == 1  # [1/2,1) sits inside [1/3,1)
    assert result.rows["0"].low == 0


def test_transferred_bound_dominates_test(fair, battery_marts):
    # a test bounded on source names stays bounded against kappa_high
    sp = randlab.savings_transform(battery_marts["all_in_on_0"])
    test = randlab.integral_to_bounded_ml(randlab.martingale_to_integral(sp, 8))
    rel = cells.refine(cells.binary_digits(), cells.bary_grouped(3), 8, target_depth=3)
    result = cells.transfer_measure(rel, test.bound)
    for tau, rrow in rel.rows.items():
        covered = rrow.sigmas
        for n in range(1, test.n_levels + 1):
            hit = sum(
                (test.level(n).mass_within(fair, sigma) for sigma in covered),
                F(0),
            )
            assert hit * 2**n <= result.rows[tau].high, (tau, n)


def test_natural_decomposition(null_at_one):
    nd = cells.natural(null_at_one)
    assert nd.cell_mass("0") == 1 and nd.cell_mass("1") == 0
    out = nd.name_point("0110", 3)
    assert out.determined and out.bits == "011"
    assert not nd.name_point("01", 3).determined
    assert nd.pushforward() is null_at_one


def test_grouping_average_identity(battery_marts):
    # ternary-digit group nodes average their digit children exactly
    dec = cells.bary_grouped(3)
    mu_a = dec.pushforward()
    mart = randlab.from_measures(randlab.bernoulli(F(1, 3)), mu_a)

    def code(digits):
        return "".join({0: "0", 1: "10", 2: "11"}[d] for d in digits)

    for length in range(4):
        for digits in itertools.product((0, 1, 2), repeat=length):
            node = code(digits) + "1"
            if len(node) + 1 > 8:
                continue
            lhs = mart.capital(node) * dec.cell(node).length()
            rhs = mart.capital(node + "0") * dec.cell(node + "0").length() + mart.capital(
                node + "1"
            ) * dec.cell(node + "1").length()
            assert lhs == rhs, node
