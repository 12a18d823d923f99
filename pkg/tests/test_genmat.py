from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from hodisc.f2linalg import BitMatrix
from hodisc.genmat import (
    F2Poly,
    GeneratingMatrixSet,
    build,
    deinterlace,
    enumerate_irreducibles,
    format_set,
    identity_matrices,
    interlace,
    laurent_coeffs,
    parse_set,
    tezuka_matrices,
)

# Frozen oracle: the irreducible polynomials over GF(2) up to degree 4,
# as bitsets (bit i = coeff of x^i), from the standard tables.
KNOWN_IRREDUCIBLE_BITSETS = [
    0b10,      # x
    0b11,      # x + 1
    0b111,     # x^2 + x + 1
    0b1011,    # x^3 + x + 1
    0b1101,    # x^3 + x^2 + 1
    0b10011,   # x^4 + x + 1
    0b11001,   # x^4 + x^3 + 1
    0b11111,   # x^4 + x^3 + x^2 + x + 1
]


def test_enumerate_irreducibles_against_known_table():
    polys = enumerate_irreducibles(8)
    assert [p.coeffs for p in polys] == KNOWN_IRREDUCIBLE_BITSETS


def test_enumerate_irreducibles_spec_examples():
    assert [p.coeffs for p in enumerate_irreducibles(2)] == [0b10, 0b11]
    assert enumerate_irreducibles(3)[-1].coeffs == 0b111
    five = enumerate_irreducibles(5)
    assert [p.degree for p in five] == [1, 1, 2, 3, 3]
    assert {p.coeffs for p in five[-2:]} == {0b1011, 0b1101}


def remultiply_check(p: F2Poly, i: int, z: int, coeffs: list[int]) -> bool:
    """Oracle: p^i * sum a_l x^-l == x^(e-z-1) down to the truncation order."""
    q = p.pow(i)
    deg_q = q.degree
    length = len(coeffs)
    target = p.degree - z - 1
    for m in range(deg_q - 1, deg_q - length - 1, -1):
        acc = 0
        for t in range(deg_q + 1):
            l = t - m
            if 1 <= l <= length:
                acc ^= ((q.coeffs >> t) & 1) & coeffs[l - 1]
        if acc != (1 if m == target else 0):
            return False
    return True


def test_laurent_spec_examples():
    assert laurent_coeffs(F2Poly(0b10), 1, 0, 4) == [1, 0, 0, 0]
    assert laurent_coeffs(F2Poly(0b11), 1, 0, 4) == [1, 1, 1, 1]
    assert laurent_coeffs(F2Poly(0b111), 1, 1, 3) == [0, 1, 1]
    for p, i, z, L in [(F2Poly(0b10), 1, 0, 4), (F2Poly(0b11), 1, 0, 4), (F2Poly(0b111), 1, 1, 3)]:
        assert remultiply_check(p, i, z, laurent_coeffs(p, i, z, L))


@given(st.integers(0, 7), st.integers(1, 4), st.integers(0, 30), st.integers(1, 24))
@settings(max_examples=120, deadline=None)
def test_laurent_remultiplication_oracle(poly_idx, i, z_seed, length):
    p = enumerate_irreducibles(8)[poly_idx]
    z = z_seed % p.degree
    coeffs = laurent_coeffs(p, i, z, length)
    assert remultiply_check(p, i, z, coeffs)


def test_laurent_rejects_bad_shift():
    with pytest.raises(ValueError):
        laurent_coeffs(F2Poly(0b111), 1, 2, 4)
    with pytest.raises(ValueError):
        laurent_coeffs(F2Poly(0b10), 1, -1, 4)


def test_tezuka_first_matrix_is_identity():
    g = tezuka_matrices(1, 6, 6)
    assert g.matrices[0] == BitMatrix.identity(6)


def test_tezuka_second_matrix_pascal_pattern():
    # p = x+1: row k is the expansion of 1/(x+1)^k, upper triangular with
    # unit diagonal; row 1 all ones, row 2 alternating.
    g = tezuka_matrices(2, 4, 4)
    c2 = g.matrices[1]
    assert c2.row_list(1) == [1, 1, 1, 1]
    assert c2.row_list(2) == [0, 1, 0, 1]
    for k in range(1, 5):
        assert c2.entry(k, k) == 1
        assert all(c2.entry(k, l) == 0 for l in range(1, k))


def test_tezuka_row_bound_scan():
    g = tezuka_matrices(4, 10, 10)
    assert g.row_bound_factor == 1
    assert g.verify_row_bound()
    assert g.t_upper == 0 + 0 + 1 + 2


def test_tezuka_diagonal_starts_at_row_index():
    # c_{j,k,l} = 0 for k > l with c_{j,k,k} = 1 for every construction poly
    g = tezuka_matrices(5, 12, 12)
    for m in g.matrices:
        for k in range(1, 13):
            assert m.entry(k, k) == 1


def test_interlace_identity_example():
    src = identity_matrices(2, 2)
    out = interlace(src)
    assert out.dim == 1
    assert out.matrices[0] == BitMatrix.from_rows([[1, 0], [1, 0], [0, 1], [0, 1]])
    assert out.n_cols == src.n_cols
    assert out.row_bound_factor == 2
    assert out.q_rows == 2 * src.n_cols


def test_interlace_rejects_odd_dimension():
    with pytest.raises(ValueError, match="odd"):
        interlace(identity_matrices(3, 2))


def test_interlace_t_upper_propagation():
    base = tezuka_matrices(2, 4, 4)
    assert base.t_upper == 0
    out = interlace(base)
    assert out.t_upper == 2 * 0 + 1


def test_interlaced_row_bound_scan():
    out = build("tezuka-interlaced", 2, 6)
    assert out.row_bound_factor == 2
    assert out.verify_row_bound()
    assert out.q_rows == 12


def test_deinterlace_recovers_source_rows():
    base = tezuka_matrices(4, 5, 5)
    out = interlace(base)
    back = deinterlace(out)
    for j in range(4):
        rows = back.matrices[j].data
        assert rows == base.matrices[j].data[: len(rows)]


@pytest.mark.parametrize("kind,dim", [("identity", 1), ("tezuka", 3), ("tezuka-interlaced", 2)])
def test_set_text_round_trip(kind, dim):
    g = build(kind, dim, 5)
    assert parse_set(format_set(g)) == g


def test_parse_rejects_missing_header():
    with pytest.raises(ValueError, match="header"):
        parse_set("2 2\nc0\n40")
