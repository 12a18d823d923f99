"""Haar coefficients of the discrepancy function, exact and float tracks.

The discrepancy function of an N-point set splits into a counting part
(1/N times the number of points below x) and a volume part (x_1...x_d);
its coefficient against the non-normalized tensor Haar function h_{j,m}
is the counting coefficient minus the volume coefficient.  Per coordinate:

  volume:   <x, h_{-1,0}> = 1/2,      <x, h_{j,m}> = -2^(-2j-2)  (j >= 0)
  counting: <chi_[z,1), h_{-1,0}> = 1 - z; for j >= 0 the value is 0 unless
            z lies strictly inside I_{j,m}, then left-z on the closed left
            half and z-right on the open right half.

Both derived by direct integration and pinned against quadrature oracles in
the test suite.  Tables store only nonzero counting entries per level; the
volume part is position-independent and kept in closed form, including the
geometric-series tails beyond the stored box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .points import DyadicPointSet

EXACT_COUNT_LIMIT = 256         # rational track up to 2^8 points by default
DEFAULT_ENTRY_CAP = 1 << 26     # memory guard on stored table entries


@dataclass(frozen=True)
class DyadicRational:
    """Exact value numerator / (divisor * 2^scale); the coefficient carrier."""

    numerator: int
    scale: int
    divisor: int = 1

    def __post_init__(self):
        if self.scale < 0 or self.divisor < 1:
            raise ValueError("scale must be >= 0 and divisor >= 1")

    def normalized(self) -> "DyadicRational":
        num, s = self.numerator, self.scale
        while s > 0 and num % 2 == 0:
            num //= 2
            s -= 1
        g = math.gcd(abs(num), self.divisor)
        if g > 1:
            return DyadicRational(num // g, s, self.divisor // g).normalized()
        return DyadicRational(num, s, self.divisor)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.divisor * (1 << self.scale))

    @classmethod
    def from_fraction(cls, value: Fraction, divisor: int = 1) -> "DyadicRational":
        scaled = value * divisor
        den = scaled.denominator
        if den & (den - 1):
            raise ValueError(f"{value} * {divisor} is not dyadic")
        return cls(scaled.numerator, den.bit_length() - 1, divisor)

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        s = max(self.scale, other.scale)
        a = self.numerator * other.divisor << (s - self.scale)
        b = other.numerator * self.divisor << (s - other.scale)
        return DyadicRational(a + b, s, self.divisor * other.divisor).normalized()

    def __mul__(self, other: "DyadicRational") -> "DyadicRational":
        return DyadicRational(self.numerator * other.numerator,
                              self.scale + other.scale,
                              self.divisor * other.divisor).normalized()

    def __float__(self) -> float:
        return self.numerator / (self.divisor * (1 << self.scale))


@dataclass(frozen=True)
class HaarIndex:
    """Level vector j (entries >= -1) and position vector m, m_i in D_{j_i}."""

    level: tuple[int, ...]
    position: tuple[int, ...]

    def __post_init__(self):
        if len(self.level) != len(self.position):
            raise ValueError("level/position length mismatch")
        for j, m in zip(self.level, self.position):
            if j < -1:
                raise ValueError(f"level entry {j} < -1")
            cap = 1 << max(j, 0)
            if not 0 <= m < (cap if j >= 0 else 1):
                raise ValueError(f"position {m} outside D_{j}")

    @property
    def dim(self) -> int:
        return len(self.level)

    @property
    def weight(self) -> int:
        return sum(max(j, 0) for j in self.level)


def _volume_1d(j: int) -> Fraction:
    return Fraction(1, 2) if j == -1 else Fraction(-1, 1 << (2 * j + 2))


def volume_value(level: tuple[int, ...]) -> Fraction:
    out = Fraction(1)
    for j in level:
        out *= _volume_1d(j)
    return out


def volume_coeff(idx: HaarIndex) -> DyadicRational:
    """Coefficient of the monomial x_1...x_d; independent of the position."""
    return DyadicRational.from_fraction(volume_value(idx.level))


def _counting_1d(z_num: int, b: int, j: int, m: int) -> Fraction:
    if j == -1:
        if m != 0:
            raise ValueError("position must be 0 at level -1")
        return 1 - Fraction(z_num, 1 << b)
    if not 0 <= m < (1 << j):
        raise ValueError(f"position {m} outside D_{j}")
    z = Fraction(z_num, 1 << b)
    left = Fraction(m, 1 << j)
    right = Fraction(m + 1, 1 << j)
    if not left < z < right:
        return Fraction(0)
    mid = Fraction(2 * m + 1, 1 << (j + 1))
    return left - z if z <= mid else z - right


def counting_coeff_1d(z_num: int, b: int, j: int, m: int) -> DyadicRational:
    """Coefficient of the indicator chi_[z,1) against h_{j,m}, exact."""
    if not 0 <= z_num < (1 << b):
        raise ValueError(f"numerator {z_num} outside [0, 2^{b})")
    return DyadicRational.from_fraction(_counting_1d(z_num, b, j, m))


def haar_coefficient(p: DyadicPointSet, idx: HaarIndex) -> tuple[DyadicRational, DyadicRational]:
    """(counting part, volume part); full coefficient = counting - volume."""
    if idx.dim != p.dim:
        raise ValueError("index dimension mismatch")
    b = p.precision_bits
    total = Fraction(0)
    for k in range(p.count):
        term = Fraction(1)
        for i in range(p.dim):
            term *= _counting_1d(int(p.numerators[k, i]), b, idx.level[i], idx.position[i])
            if term == 0:
                break
        total += term
    counting = DyadicRational.from_fraction(total / p.count, divisor=p.count)
    return counting, volume_coeff(idx)


def _level_range(box_limit: int, dim: int) -> Iterator[tuple[int, ...]]:
    return product(range(-1, box_limit), repeat=dim)


@dataclass
class HaarTable:
    """Sparse per-level counting coefficients of a point set's discrepancy.

    ``levels`` maps a level vector to its nonzero counting entries:
    exact track  - dict position-tuple -> Fraction,
    float track  - (positions int64 array (k, d), values float64 array (k,)).
    Volume parts are never stored; they are position-independent closed forms.
    """

    dim: int
    count: int
    precision_bits: int
    box_limit: int
    exact: bool
    levels: dict

    def counting_at(self, idx: HaarIndex):
        data = self.levels.get(idx.level)
        if data is None:
            return Fraction(0) if self.exact else 0.0
        if self.exact:
            return data.get(idx.position, Fraction(0))
        pos, vals = data
        hit = np.all(pos == np.asarray(idx.position, dtype=np.int64), axis=1)
        found = np.flatnonzero(hit)
        return float(vals[found[0]]) if found.size else 0.0

    def coefficient_at(self, idx: HaarIndex):
        """Full coefficient counting - volume (Fraction or float by track)."""
        v = volume_value(idx.level)
        c = self.counting_at(idx)
        return c - v if self.exact else c - float(v)

    def stored_entries(self) -> int:
        if self.exact:
            return sum(len(d) for d in self.levels.values())
        return sum(len(v) for _, v in self.levels.values())


def _build_exact(p: DyadicPointSet, box_limit: int) -> dict:
    b = p.precision_bits
    n, d = p.count, p.dim
    # per coordinate and level: (position, value) for each point
    per_coord: list[list[list[tuple[int, Fraction]]]] = []
    for i in range(d):
        col = []
        for j in range(-1, box_limit):
            entries = []
            for k in range(n):
                z = int(p.numerators[k, i])
                if j == -1:
                    entries.append((0, 1 - Fraction(z, 1 << b)))
                elif j >= b:
                    entries.append((0, Fraction(0)))
                else:
                    m = z >> (b - j)
                    entries.append((m, _counting_1d(z, b, j, m)))
            col.append(entries)
        per_coord.append(col)
    levels: dict = {}
    for level in _level_range(box_limit, d):
        acc: dict[tuple[int, ...], Fraction] = {}
        cols = [per_coord[i][level[i] + 1] for i in range(d)]
        for k in range(n):
            val = Fraction(1)
            pos = []
            for i in range(d):
                m, v = cols[i][k]
                if v == 0:
                    val = Fraction(0)
                    break
                val *= v
                pos.append(m)
            if val:
                key = tuple(pos)
                acc[key] = acc.get(key, Fraction(0)) + val
        acc = {key: v / n for key, v in acc.items() if v != 0}
        if acc:
            levels[level] = acc
    return levels


def _build_float(p: DyadicPointSet, box_limit: int) -> dict:
    b = p.precision_bits
    n, d = p.count, p.dim
    z = p.numerators
    scale = float(1 << b)
    pos_col: list[dict[int, np.ndarray]] = [dict() for _ in range(d)]
    val_col: list[dict[int, np.ndarray]] = [dict() for _ in range(d)]
    for i in range(d):
        zi = z[:, i]
        pos_col[i][-1] = np.zeros(n, dtype=np.int64)
        val_col[i][-1] = 1.0 - zi / scale
        for j in range(0, min(box_limit, b)):
            shift = b - j
            m = zi >> shift
            low = zi & ((1 << shift) - 1)
            interior = low != 0
            left = m << shift
            right = left + (1 << shift)
            upper_half = (zi >> (shift - 1)) & 1
            val = np.where(upper_half == 1, zi - right, left - zi) / scale
            val[~interior] = 0.0
            pos_col[i][j] = m
            val_col[i][j] = val
    levels: dict = {}
    for level in _level_range(box_limit, d):
        if any(j >= b for j in level):
            continue  # counting part vanishes on grid levels
        vals = val_col[0][level[0]].copy()
        for i in range(1, d):
            vals *= val_col[i][level[i]]
        nz = np.flatnonzero(vals)
        if nz.size == 0:
            continue
        pos = np.column_stack([pos_col[i][level[i]][nz] for i in range(d)])
        key = pos[:, 0].copy()
        for i in range(1, d):
            key = (key << max(level[i], 0)) | pos[:, i]
        uniq, inverse = np.unique(key, return_inverse=True)
        sums = np.bincount(inverse, weights=vals[nz], minlength=uniq.size)
        keep = sums != 0.0
        if not keep.any():
            continue
        # unpack the grouped keys back into position columns
        upos = np.empty((int(keep.sum()), d), dtype=np.int64)
        kept_keys = uniq[keep]
        rem = kept_keys.copy()
        for i in range(d - 1, 0, -1):
            width = max(level[i], 0)
            upos[:, i] = rem & ((1 << width) - 1)
            rem >>= width
        upos[:, 0] = rem
        levels[level] = (upos, sums[keep] / n)
    return levels


def build_table(p: DyadicPointSet, box_limit: int | None = None,
                exact: bool | None = None, entry_cap: int = DEFAULT_ENTRY_CAP) -> HaarTable:
    """Counting coefficients for every level vector inside the box.

    Default box_limit is the point precision, which makes the stored region
    exactly the support of the counting part.  Exact (Fraction) track is the
    default up to 256 points, float beyond; both walk the same level/position
    structure.
    """
    if p.count < 1:
        raise ValueError("empty point set")
    box_limit = p.precision_bits if box_limit is None else box_limit
    if box_limit < 0:
        raise ValueError("box_limit must be >= 0")
    exact = p.count <= EXACT_COUNT_LIMIT if exact is None else exact
    est = 0
    for level in _level_range(box_limit, p.dim):
        est += min(1 << sum(max(j, 0) for j in level), p.count)
        if est > entry_cap:
            raise ValueError(f"table would exceed entry cap {entry_cap}")
    if not exact and any(1 << max(j, 0) > (1 << 62) for j in range(box_limit)):
        raise ValueError("box_limit too large for packed float keys")
    if not exact and p.dim * box_limit > 62:
        raise ValueError("dim * box_limit too large for packed float keys")
    levels = _build_exact(p, box_limit) if exact else _build_float(p, box_limit)
    return HaarTable(p.dim, p.count, p.precision_bits, box_limit, exact, levels)


def volume_tail_sums(dim: int, box_limit: int, weights,
                     nonneg_levels: bool = False,
                     precision_bits: int | None = None):
    """Weighted aggregate of volume-only coefficients outside the stored box.

    ``weights`` is "l2" (exact Fraction result) or a (p, q, s) tuple (float).
    The per-level aggregate is 2^(|j|(s-1/p+1)q) * (sum_m |coeff|^p)^(q/p);
    position-independence turns each coordinate into a geometric series, and
    the box complement is assembled by inclusion-exclusion:
    full^d - inbox^d.  With ``nonneg_levels`` only j in N_0^d contribute
    (the projection norm's index set).
    """
    if box_limit < 0:
        raise ValueError("box_limit must be >= 0")
    if precision_bits is not None and box_limit < precision_bits:
        raise ValueError(
            f"box_limit {box_limit} < precision {precision_bits}: tail would not be volume-only")
    if weights == "l2":
        # per-coordinate factor 4^j * v(j)^2: 1/4 at level -1, 2^(-2j-4) else
        inner_full = Fraction(1, 12)
        inner_inbox = Fraction(1 - Fraction(1, 1 << (2 * box_limit)), 12)
        if nonneg_levels:
            full, inbox = inner_full, inner_inbox
        else:
            full, inbox = Fraction(1, 4) + inner_full, Fraction(1, 4) + inner_inbox
        return full ** dim - inbox ** dim
    p, q, s = weights
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    if s >= 1:
        raise ValueError("volume tails diverge for s >= 1")
    ratio = 2.0 ** (q * (s - 1.0))
    lead = 2.0 ** (-2.0 * q)
    inner_full = lead / (1.0 - ratio)
    inner_inbox = lead * (1.0 - ratio ** box_limit) / (1.0 - ratio)
    if nonneg_levels:
        full, inbox = inner_full, inner_inbox
    else:
        neg = 2.0 ** (-q)
        full, inbox = neg + inner_full, neg + inner_inbox
    return full ** dim - inbox ** dim


# CSV schema: j_1..j_d,m_1..m_d,counting_num,counting_scale,volume_num,
# volume_scale,divisor - exact tables only (floats have no faithful row form).

def format_table_csv(t: HaarTable) -> str:
    if not t.exact:
        raise ValueError("only exact tables serialize to CSV")
    d = t.dim
    header = ("# hodisc-haar v1 "
              f"d={d} N={t.count} b={t.precision_bits} J={t.box_limit}")
    cols = ([f"j_{i+1}" for i in range(d)] + [f"m_{i+1}" for i in range(d)]
            + ["counting_num", "counting_scale", "volume_num", "volume_scale", "divisor"])
    lines = [header, ",".join(cols)]
    for level in sorted(t.levels.keys()):
        vol = DyadicRational.from_fraction(volume_value(level))
        for pos in sorted(t.levels[level].keys()):
            cnt = DyadicRational.from_fraction(t.levels[level][pos], divisor=t.count)
            row = (list(level) + list(pos)
                   + [cnt.numerator, cnt.scale, vol.numerator, vol.scale, cnt.divisor])
            lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_table_csv(text: str) -> HaarTable:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# hodisc-haar v1"):
        raise ValueError("missing hodisc-haar header")
    meta = dict(tok.split("=", 1) for tok in lines[0].split()[3:])
    d, n = int(meta["d"]), int(meta["N"])
    levels: dict = {}
    for ln in lines[2:]:
        parts = ln.split(",")
        if len(parts) != 2 * d + 5:
            raise ValueError(f"bad haar CSV row {ln!r}")
        level = tuple(int(v) for v in parts[:d])
        pos = tuple(int(v) for v in parts[d:2 * d])
        num, scale = int(parts[2 * d]), int(parts[2 * d + 1])
        divisor = int(parts[2 * d + 4])
        levels.setdefault(level, {})[pos] = DyadicRational(num, scale, divisor).as_fraction()
    return HaarTable(d, n, int(meta["b"]), int(meta["J"]), True, levels)
