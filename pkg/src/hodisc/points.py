"""Digital sequence/net points as exact dyadic rationals.

Coordinate j of point k is the matrix-vector product of generating matrix
C_j with the LSB-first digit vector of k, read as binary digits after the
point: numerator = sum of result-bit r times 2^(q-r) at shared precision q.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .genmat import GeneratingMatrixSet

MAX_PRECISION_BITS = 62  # int64 numerator storage


@dataclass(frozen=True)
class DyadicPointSet:
    """N points in [0,1)^d; coordinate = numerators[k, i] / 2^precision_bits."""

    dim: int
    precision_bits: int
    numerators: np.ndarray  # (N, dim) int64
    start_index: int = 0
    exact: bool = True  # False only for rounded lift coordinates

    def __post_init__(self):
        arr = np.asarray(self.numerators, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise ValueError(f"numerators shape {arr.shape} does not match dim {self.dim}")
        if self.precision_bits < 0 or self.precision_bits > MAX_PRECISION_BITS:
            raise ValueError(f"precision_bits {self.precision_bits} outside [0, {MAX_PRECISION_BITS}]")
        if arr.size and (arr.min() < 0 or int(arr.max()) >> self.precision_bits):
            raise ValueError("numerator outside [0, 2^precision_bits)")
        object.__setattr__(self, "numerators", arr)

    @property
    def count(self) -> int:
        return self.numerators.shape[0]

    def coords_float(self) -> np.ndarray:
        if self.precision_bits > 52:
            raise ValueError("precision too high for exact float coordinates")
        return self.numerators / float(1 << self.precision_bits)

    def coords_fraction(self, k: int) -> tuple[Fraction, ...]:
        den = 1 << self.precision_bits
        return tuple(Fraction(int(v), den) for v in self.numerators[k])

    def trimmed(self) -> "DyadicPointSet":
        """Drop shared trailing zero bits (bit-identical coordinate values)."""
        if self.count == 0 or self.precision_bits == 0:
            return self
        arr = self.numerators
        common = self.precision_bits
        nz = arr[arr != 0]
        if nz.size:
            # number of shared trailing zeros across all nonzero numerators
            low = np.bitwise_and(nz, -nz)
            common = int(np.log2(low.min()))
        shift = min(common, self.precision_bits)
        if shift == 0:
            return self
        return replace(self, precision_bits=self.precision_bits - shift,
                       numerators=arr >> shift)


def point_at(g: GeneratingMatrixSet, k: int) -> list[int]:
    """Numerators of sequence point k at precision q_rows (pure function)."""
    if k < 0 or k >> g.n_cols:
        raise ValueError(f"index {k} needs more than {g.n_cols} digit columns")
    q = g.q_rows
    out = []
    for m in g.matrices:
        num = 0
        for r, row in enumerate(m.data, start=1):
            if (row & k).bit_count() & 1:
                num |= 1 << (q - r)
        out.append(num)
    return out


def prefix(g: GeneratingMatrixSet, count: int, start_index: int = 0) -> DyadicPointSet:
    """Points for k = start_index .. start_index+count-1 in index order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if (start_index + count - 1) >> g.n_cols:
        raise ValueError(
            f"indices up to {start_index + count - 1} exceed 2^{g.n_cols} supported by n_cols")
    if g.q_rows > MAX_PRECISION_BITS:
        raise ValueError(f"q_rows {g.q_rows} exceeds numerator capacity {MAX_PRECISION_BITS}")
    arr = np.empty((count, g.dim), dtype=np.int64)
    for i in range(count):
        arr[i] = point_at(g, start_index + i)
    return DyadicPointSet(g.dim, g.q_rows, arr, start_index=start_index)


# CSV: columns k,num_1..num_d,precision_bits.  Binary: little-endian u64
# header (d, b, N) then N*d little-endian u64 numerators.

def format_points_csv(p: DyadicPointSet) -> str:
    header = "k," + ",".join(f"num_{i+1}" for i in range(p.dim)) + ",precision_bits"
    lines = [header]
    for row_i in range(p.count):
        nums = ",".join(str(int(v)) for v in p.numerators[row_i])
        lines.append(f"{p.start_index + row_i},{nums},{p.precision_bits}")
    return "\n".join(lines) + "\n"


def parse_points_csv(text: str) -> DyadicPointSet:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty points CSV")
    cols = lines[0].split(",")
    if cols[0] != "k" or cols[-1] != "precision_bits":
        raise ValueError(f"unexpected points CSV header {lines[0]!r}")
    dim = len(cols) - 2
    ks, rows, bits = [], [], set()
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != dim + 2:
            raise ValueError(f"bad points row {ln!r}")
        ks.append(int(parts[0]))
        rows.append([int(v) for v in parts[1:-1]])
        bits.add(int(parts[-1]))
    if len(bits) != 1:
        raise ValueError("mixed precision_bits in points CSV")
    return DyadicPointSet(dim, bits.pop(), np.array(rows, dtype=np.int64),
                          start_index=ks[0] if ks else 0)


def write_points_binary(p: DyadicPointSet) -> bytes:
    head = struct.pack("<QQQ", p.dim, p.precision_bits, p.count)
    body = p.numerators.astype("<u8").tobytes(order="C")
    return head + body


def read_points_binary(blob: bytes) -> DyadicPointSet:
    if len(blob) < 24:
        raise ValueError("binary points blob too short")
    d, b, n = struct.unpack("<QQQ", blob[:24])
    expect = 24 + 8 * d * n
    if len(blob) != expect:
        raise ValueError(f"binary points blob has {len(blob)} bytes, expected {expect}")
    arr = np.frombuffer(blob, dtype="<u8", offset=24).reshape(int(n), int(d))
    return DyadicPointSet(int(d), int(b), arr.astype(np.int64))
