from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from hodisc.genmat import build, identity_matrices
from hodisc.haar import build_table
from hodisc.norms import d0_projection_norm, star_discrepancy_exact
from hodisc.points import DyadicPointSet, prefix
from hodisc.studies import (
    REGIME_LARGE,
    REGIME_SMALL_EMPTY,
    REGIME_SMALL_OCCUPIED,
    BoundCase,
    binary_decomposition,
    bound_ratio_audit,
    coeff_bound,
    format_study_csv,
    lift_sequence,
    rate_shape,
    scaling_study,
)


def test_binary_decomposition():
    assert binary_decomposition(8) == (3,)
    assert binary_decomposition(13) == (3, 2, 0)
    with pytest.raises(ValueError):
        binary_decomposition(0)


def test_coeff_bound_small_occupied_example():
    case = BoundCase.classify(3, 0, 1, 8, occupied=True)
    assert case.regime == REGIME_SMALL_OCCUPIED
    assert coeff_bound(3, case) == pytest.approx(1.0 / 64.0)


def test_coeff_bound_small_empty_example():
    case = BoundCase.classify(3, 0, 1, 8, occupied=False)
    assert case.regime == REGIME_SMALL_EMPTY
    assert coeff_bound(3, case) == pytest.approx(2.0 ** -6)


def test_coeff_bound_large_example():
    case = BoundCase.classify(1, 0, 1, 8, occupied=True)
    assert case.regime == REGIME_LARGE
    assert coeff_bound(1, case) == pytest.approx((1.0 / 8.0) * (0.5 + 0.125))


def test_coeff_bound_rejects_wrong_regime():
    small = BoundCase(REGIME_SMALL_OCCUPIED, 0, 1, 8, (3,))
    with pytest.raises(ValueError, match="below the split"):
        coeff_bound(0, small)
    large = BoundCase(REGIME_LARGE, 0, 1, 8, (3,))
    with pytest.raises(ValueError, match="above the split"):
        coeff_bound(5, large)


def test_coeff_bound_monotone_within_segments():
    n_points, t, d = 13, 1, 2  # exponents 3, 2, 0
    prev_small = math.inf
    for w in range(0, 12):
        if (1 << (2 * w + t)) >= n_points**2:
            case = BoundCase.classify(w, t, d, n_points, occupied=True)
            val = coeff_bound(w, case)
            assert val <= prev_small + 1e-15
            prev_small = val
    # large regime: nonincreasing within each mu segment
    cuts = [0, 2, 3, math.log2(13)]
    for lo, hi in zip(cuts, cuts[1:]):
        prev = math.inf
        for w in range(0, 12):
            x = w + t / 2.0
            if lo <= x < hi and (1 << (2 * w + t)) < n_points**2:
                case = BoundCase.classify(w, t, d, n_points, occupied=True)
                val = coeff_bound(w, case)
                assert val <= prev + 1e-15
                prev = val


def test_audit_rejects_order1_source():
    g = identity_matrices(1, 4)
    p = prefix(g, 8)
    t_table = build_table(p, exact=True)
    with pytest.raises(ValueError, match="interlaced"):
        bound_ratio_audit(t_table, 0, g)


def test_audit_ratios_finite_and_stable():
    g = build("tezuka-interlaced", 1, 6)
    per_n = {}
    for n in (8, 16, 32):
        p = prefix(g, n).trimmed()
        audit = bound_ratio_audit(build_table(p, exact=True), 1, g)
        assert audit.n_checked > 0
        for regime, ratio in audit.max_ratio.items():
            if ratio is not None:
                assert math.isfinite(ratio) and ratio > 0
                per_n.setdefault(regime, []).append(ratio)
    for regime, ratios in per_n.items():
        if len(ratios) >= 2:
            assert max(ratios) / min(ratios) < 4.0, regime


def test_lift_two_points():
    p = DyadicPointSet(1, 1, np.array([[0], [1]], dtype=np.int64))
    lifted = lift_sequence(p)
    assert lifted.dim == 2 and lifted.exact
    got = {lifted.coords_fraction(k) for k in range(2)}
    assert got == {(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(1, 2))}


def test_lift_van_der_corput_hammersley():
    p = prefix(identity_matrices(1, 2), 4)
    lifted = lift_sequence(p)
    got = [lifted.coords_fraction(k) for k in range(4)]
    assert got == [
        (Fraction(0), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 4)),
        (Fraction(1, 4), Fraction(1, 2)),
        (Fraction(3, 4), Fraction(3, 4)),
    ]


def test_lift_non_power_of_two_flagged_inexact():
    p = prefix(identity_matrices(1, 3), 3)
    lifted = lift_sequence(p)
    assert not lifted.exact
    assert lifted.precision_bits == 52
    assert abs(float(lifted.coords_fraction(2)[1]) - 2.0 / 3.0) < 1e-15


def test_lift_rejects_offset_prefix():
    p = prefix(identity_matrices(1, 3), 4, start_index=2)
    with pytest.raises(ValueError, match="index 0"):
        lift_sequence(p)


def test_lifted_net_star_bound_shape():
    g = identity_matrices(1, 10)
    normalized = []
    for n in (3, 5, 7, 9):
        lifted = lift_sequence(prefix(g, 1 << n))
        v = star_discrepancy_exact(lifted.trimmed()).value
        normalized.append((1 << n) * v / n)
    arr = np.array(normalized)
    assert arr.max() / arr.min() < 4.0


def test_lift_floor_inequality_smoke():
    # exact rational check of the lift inequality at small sizes
    g = build("tezuka-interlaced", 1, 3)
    for n in (0, 1, 2, 3):
        n_points = 1 << n
        best = Fraction(0)
        for k in range(1, n_points + 1):
            tb = build_table(prefix(g, k).trimmed(), exact=True)
            best = max(best, k * k * d0_projection_norm(tb).value_sq)
        lifted = lift_sequence(prefix(g, n_points)).trimmed()
        rhs = n_points**2 * d0_projection_norm(build_table(lifted, exact=True)).value_sq
        diff = rhs - best - 1
        assert best >= rhs or diff <= 0 or diff * diff <= 4 * best


def test_rate_shape_table():
    assert rate_shape("l2", 2) == (0.0, 1.0, "seq-l2-rate")
    assert rate_shape("bmo", 2) == (0.0, 1.0, "bmo-rate")
    assert rate_shape("besov", 2, q=2.0, s=0.0) == (0.0, 1.0, "besov-s0-rate")
    assert rate_shape("besov", 2, q=2.0, s=0.25) == (0.25, 0.5, "besov-smooth-rate")
    assert rate_shape("orlicz", 2, beta=2.0) == (0.0, 1.5, "orlicz-rate")
    with pytest.raises(ValueError):
        rate_shape("nope", 2)


def test_scaling_study_rows_and_csv():
    g = build("tezuka-interlaced", 1, 6)
    rows = scaling_study(g, "l2", [4, 8, 16, 32])
    assert [r.n_points for r in rows] == [4, 8, 16, 32]
    assert all(r.normalized > 0 and math.isfinite(r.normalized) for r in rows)
    csv = format_study_csv(rows)
    lines = csv.strip().splitlines()
    assert lines[0] == "N,value,normalized,exponent,theorem"
    assert len(lines) == 5 and lines[1].startswith("4,")


def test_scaling_study_rejects_unsorted():
    g = build("tezuka-interlaced", 1, 4)
    with pytest.raises(ValueError):
        scaling_study(g, "l2", [8, 4])
