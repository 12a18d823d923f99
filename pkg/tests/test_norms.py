from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from hodisc.genmat import build, identity_matrices
from hodisc.haar import build_table
from hodisc.norms import (
    NormReport,
    besov_quasinorm,
    bmo_dyadic,
    d0_projection_norm,
    default_orlicz_grid,
    l2_parseval,
    l2_warnock,
    lp_grid,
    orlicz_exp_estimate,
    star_discrepancy_exact,
    triebel_bracket,
)
from hodisc.points import DyadicPointSet, prefix


def single_origin(d=1):
    return DyadicPointSet(d, 1, np.zeros((1, d), dtype=np.int64))


def two_points_0_half():
    return DyadicPointSet(1, 1, np.array([[0], [1]], dtype=np.int64))


# ------------------------------------------------------------------- L2


def test_warnock_single_origin():
    rep = l2_warnock(single_origin())
    assert rep.value_sq == Fraction(1, 3)


def test_warnock_two_points_hand_expansion():
    # 1/3 - (2/2)((1-0)/2 + (1-1/4)/2) + (1/4)(1 + 3*(1/2)) = 1/12
    rep = l2_warnock(two_points_0_half())
    assert rep.value_sq == Fraction(1, 12)


def test_warnock_float_matches_exact():
    p = prefix(build("tezuka-interlaced", 2, 4), 11)
    exact = l2_warnock(p, exact=True)
    flt = l2_warnock(p, exact=False)
    assert abs(exact.value - flt.value) <= 1e-12


@pytest.mark.parametrize("d", [1, 2])
def test_parseval_equals_warnock_exact(d):
    g = build("tezuka-interlaced", d, 4)
    for n in (1, 2, 3, 5, 8, 13, 16):
        p = prefix(g, n).trimmed()
        t = build_table(p, exact=True)
        assert l2_parseval(t).value_sq == l2_warnock(p).value_sq


def test_parseval_float_route_agreement():
    g = build("tezuka-interlaced", 2, 6)
    for n in (7, 32, 64):
        p = prefix(g, n).trimmed()
        t = build_table(p, exact=False)
        assert abs(l2_parseval(t).value - l2_warnock(p, exact=False).value) <= 1e-9


def test_parseval_tail_bookkeeping():
    # enlarging the box moves mass from tail to stored sums, value unchanged
    p = prefix(build("tezuka-interlaced", 1, 3), 8)
    t1 = build_table(p, box_limit=p.precision_bits, exact=True)
    t2 = build_table(p, box_limit=p.precision_bits + 2, exact=True)
    r1, r2 = l2_parseval(t1), l2_parseval(t2)
    assert r1.value_sq == r2.value_sq
    assert r2.tail_value < r1.tail_value


def test_parseval_requires_covering_box():
    p = prefix(identity_matrices(1, 4), 8)
    t = build_table(p, box_limit=2, exact=True)
    with pytest.raises(ValueError, match="covered"):
        l2_parseval(t)


# ------------------------------------------------------------------- Lp


def test_lp_grid_p2_matches_warnock():
    p = single_origin()
    rep = lp_grid(p, 2.0, resolution=64)
    assert abs(rep.value - math.sqrt(1.0 / 3.0)) <= 1e-6


def test_lp_grid_p1_single_origin():
    rep = lp_grid(single_origin(), 1.0, resolution=1024)
    assert abs(rep.value - 0.5) <= 1e-6


def test_lp_monotone_in_p():
    p = prefix(build("tezuka-interlaced", 1, 4), 9)
    vals = [lp_grid(p, pe, resolution=64).value for pe in (1.0, 2.0, 4.0, 8.0)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_lp_rejects_bad_p():
    with pytest.raises(ValueError):
        lp_grid(single_origin(), 0.5)


# ------------------------------------------------------------------ star


def test_star_single_origin():
    assert star_discrepancy_exact(single_origin()).value == 1.0


def test_star_two_points():
    assert star_discrepancy_exact(two_points_0_half()).value == 0.5


def test_star_dominates_lp():
    p = prefix(build("tezuka-interlaced", 2, 4), 13)
    star = star_discrepancy_exact(p).value
    for pe in (1.0, 2.0, 6.0):
        rep = lp_grid(p, pe, resolution=32)
        assert star >= rep.value - rep.delta - 1e-9


def test_star_van_der_corput_log_growth():
    # at N = 2^n the prefix is the full grid {k/2^n}, so N * D_inf == 1;
    # the log N growth shows along the alternating-bit prefix lengths
    g = identity_matrices(1, 12)
    for n in (4, 6, 8):
        assert abs((1 << n) * star_discrepancy_exact(prefix(g, 1 << n)).value - 1.0) <= 1e-9
    normalized = []
    for n in (6, 8, 10, 12):
        worst = int("10" * (n // 2), 2)
        normalized.append(worst * star_discrepancy_exact(prefix(g, worst)).value / n)
    arr = np.array(normalized)
    assert arr.min() > 0.2 and arr.max() / arr.min() < 2.0


def test_star_rejects_high_dimension():
    p = DyadicPointSet(3, 1, np.zeros((1, 3), dtype=np.int64))
    with pytest.raises(ValueError, match="lp_grid"):
        star_discrepancy_exact(p)


# ------------------------------------------------------------------- BMO


def test_bmo_depth0_equals_d0_projection():
    p = prefix(build("tezuka-interlaced", 1, 4), 16).trimmed()
    t = build_table(p, exact=True)
    assert abs(bmo_dyadic(t, 0).value - d0_projection_norm(t).value) <= 1e-12


def test_bmo_single_origin_closed_form():
    t = build_table(single_origin(), exact=True)
    rep = bmo_dyadic(t, 0)
    assert abs(rep.value - math.sqrt(1.0 / 12.0)) <= 1e-12
    assert rep.bound_side == "lower"


def test_bmo_monotone_in_depth():
    p = prefix(build("tezuka-interlaced", 2, 4), 16).trimmed()
    t = build_table(p, exact=False)
    vals = [bmo_dyadic(t, depth).value for depth in range(0, 5)]
    assert all(a <= b + 1e-14 for a, b in zip(vals, vals[1:]))


def test_d0_at_most_l2_and_bmo():
    p = prefix(build("tezuka-interlaced", 2, 4), 12).trimmed()
    t = build_table(p, exact=True)
    d0 = d0_projection_norm(t).value
    assert d0 <= l2_parseval(t).value + 1e-14
    assert d0 <= bmo_dyadic(t, 3).value + 1e-14


# ----------------------------------------------------------------- Besov


def test_besov_220_shares_l2_code_path():
    p = prefix(build("tezuka-interlaced", 2, 5), 21).trimmed()
    t = build_table(p, exact=False)
    b = besov_quasinorm(t, 2.0, 2.0, 0.0)
    l2 = l2_parseval(t)
    assert b.value == l2.value  # identical float path


def test_besov_rejects_inadmissible_s():
    p = prefix(identity_matrices(1, 3), 4)
    t = build_table(p, exact=True)
    with pytest.raises(ValueError, match="invalid"):
        besov_quasinorm(t, 2.0, 2.0, 0.7)
    with pytest.raises(ValueError, match="invalid"):
        besov_quasinorm(t, 1.0, 2.0, -0.1)


def test_triebel_bracket_collapses_when_p_equals_q():
    p = prefix(build("tezuka-interlaced", 1, 4), 9)
    t = build_table(p, exact=True)
    lo, hi = triebel_bracket(t, 2.0, 2.0, 0.25)
    assert lo.value == hi.value


def test_triebel_bracket_ordering():
    p = prefix(build("tezuka-interlaced", 2, 4), 13).trimmed()
    t = build_table(p, exact=False)
    for pq in ((1.5, 3.0), (3.0, 1.5), (2.0, 4.0)):
        lo, hi = triebel_bracket(t, pq[0], pq[1], 0.2)
        assert lo.value <= hi.value + 1e-12
        assert lo.bound_side == "lower" and hi.bound_side == "upper"


def test_sobolev_case_reduces_to_single_besov():
    p = prefix(build("tezuka-interlaced", 1, 4), 9)
    t = build_table(p, exact=True)
    lo, hi = triebel_bracket(t, 2.0, 2.0, 0.0)
    assert lo.value == hi.value == besov_quasinorm(t, 2.0, 2.0, 0.0).value


# ---------------------------------------------------------------- Orlicz


def test_orlicz_default_grid():
    assert default_orlicz_grid(16) == (2.0, 4.0, 8.0, 16.0)
    assert default_orlicz_grid(1024) == (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def test_orlicz_bounded_by_sup_norm():
    p = single_origin()
    for beta in (0.5, 1.0, 2.0, 8.0):
        rep = orlicz_exp_estimate(p, beta, resolution=64)
        assert rep.value <= 1.0 + 1e-9
        assert rep.bound_side == "lower"


def test_orlicz_nondecreasing_in_beta():
    p = prefix(build("tezuka-interlaced", 1, 4), 9)
    vals = [orlicz_exp_estimate(p, beta, resolution=32).value
            for beta in (0.5, 1.0, 2.0, 4.0, 16.0)]
    assert all(a <= b + 1e-14 for a, b in zip(vals, vals[1:]))


def test_orlicz_rejects_bad_grid():
    p = single_origin()
    with pytest.raises(ValueError):
        orlicz_exp_estimate(p, 2.0, p_grid=())
    with pytest.raises(ValueError):
        orlicz_exp_estimate(p, 2.0, p_grid=(0.5, 2.0))


def test_norm_report_validates_sign():
    with pytest.raises(ValueError):
        NormReport("l2", -1.0, 1, 1, method="x")
