"""Linear algebra over GF(2) on int-bitset rows.

A row is a Python int whose bit ``L-1`` holds the entry in column ``L``
(LSB-first), so a matrix-vector product is a word-AND plus popcount parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BitMatrix:
    """Dense matrix over GF(2); immutable, rows stored as int bitsets."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"negative shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.data)}")
        mask = (1 << self.cols) - 1
        for r, word in enumerate(self.data):
            if word < 0 or word & ~mask:
                raise ValueError(f"row {r} has bits outside {self.cols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "BitMatrix":
        """Build from explicit 0/1 row lists (column 1 first)."""
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        words = []
        for r in rows:
            if len(r) != n_cols:
                raise ValueError("ragged rows")
            words.append(sum((bit & 1) << i for i, bit in enumerate(r)))
        return cls(len(rows), n_cols, tuple(words))

    @classmethod
    def identity(cls, n: int, rows: int | None = None, cols: int | None = None) -> "BitMatrix":
        rows = n if rows is None else rows
        cols = n if cols is None else cols
        return cls(rows, cols, tuple((1 << r) if r < cols else 0 for r in range(rows)))

    def entry(self, row: int, col: int) -> int:
        """Entry at 1-based (row, col)."""
        if not (1 <= row <= self.rows and 1 <= col <= self.cols):
            raise IndexError(f"({row},{col}) outside {self.rows}x{self.cols}")
        return (self.data[row - 1] >> (col - 1)) & 1

    def row_list(self, row: int) -> list[int]:
        """1-based row as a 0/1 list (column 1 first)."""
        word = self.data[row - 1]
        return [(word >> i) & 1 for i in range(self.cols)]


def matvec(m: BitMatrix, v: Sequence[int] | int, length: int | None = None) -> list[int]:
    """Matrix-vector product over GF(2).

    ``v`` is either a 0/1 sequence of length ``m.cols`` or an int bitset
    (bit ``L-1`` = component ``L``) with explicit ``length``.
    """
    if isinstance(v, int):
        if length is None:
            raise ValueError("int vector needs an explicit length")
        word, n = v, length
    else:
        word = sum((bit & 1) << i for i, bit in enumerate(v))
        n = len(v)
    if n != m.cols:
        raise ValueError(f"vector length {n} != matrix cols {m.cols}")
    return [(row & word).bit_count() & 1 for row in m.data]


def matvec_bits(m: BitMatrix, v_bits: int) -> int:
    """matvec with int bitset in and out (bit k-1 = component k)."""
    if v_bits < 0 or v_bits >> m.cols:
        raise ValueError(f"vector bits exceed {m.cols} columns")
    out = 0
    for r, row in enumerate(m.data):
        out |= ((row & v_bits).bit_count() & 1) << r
    return out


def rank(rows: Iterable[int] | Sequence[Sequence[int]], n_cols: int | None = None) -> int:
    """GF(2) rank of a set of row vectors via Gaussian elimination on a copy.

    Accepts int bitsets (with ``n_cols``) or 0/1 sequences (all same length).
    """
    rows = list(rows)
    if rows and not isinstance(rows[0], int):
        lengths = {len(r) for r in rows}
        if len(lengths) > 1:
            raise ValueError(f"mixed row lengths {sorted(lengths)}")
        n_cols = lengths.pop()
        rows = [sum((bit & 1) << i for i, bit in enumerate(r)) for r in rows]
    if n_cols is None:
        n_cols = max((w.bit_length() for w in rows), default=0)
    work = rows[:]
    rk = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rk, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rk], work[pivot] = work[pivot], work[rk]
        for r in range(len(work)):
            if r != rk and (work[r] >> col) & 1:
                work[r] ^= work[rk]
        rk += 1
        if rk == len(work):
            break
    return rk


def submatrix_upper_left(m: BitMatrix, r: int, c: int) -> BitMatrix:
    """Left upper r x c submatrix."""
    if not (0 <= r <= m.rows and 0 <= c <= m.cols):
        raise ValueError(f"submatrix {r}x{c} out of range for {m.rows}x{m.cols}")
    mask = (1 << c) - 1
    return BitMatrix(r, c, tuple(word & mask for word in m.data[:r]))


# Matrix text format (shared with genmat): first line "rows cols", then one
# row per line as a hex string of ceil(cols/4) digits, MSB = column 1.

def _row_to_hex(word: int, cols: int) -> str:
    n_digits = max(1, (cols + 3) // 4)
    msb_first = 0
    for col in range(1, cols + 1):
        msb_first |= ((word >> (col - 1)) & 1) << (4 * n_digits - col)
    return format(msb_first, f"0{n_digits}x")


def _row_from_hex(text: str, cols: int) -> int:
    n_digits = max(1, (cols + 3) // 4)
    if len(text) != n_digits:
        raise ValueError(f"expected {n_digits} hex digits, got {text!r}")
    msb_first = int(text, 16)
    word = 0
    for col in range(1, cols + 1):
        word |= ((msb_first >> (4 * n_digits - col)) & 1) << (col - 1)
    if msb_first & ((1 << (4 * n_digits - cols)) - 1):
        raise ValueError(f"pad bits set in row {text!r}")
    return word


def format_matrix(m: BitMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(_row_to_hex(word, m.cols) for word in m.data)
    return "\n".join(lines)


def parse_matrix(text: str) -> BitMatrix:
    lines = [ln for ln in text.strip().splitlines()]
    if not lines:
        raise ValueError("empty matrix text")
    try:
        r, c = (int(tok) for tok in lines[0].split())
    except Exception as exc:
        raise ValueError(f"bad matrix header {lines[0]!r}") from exc
    if len(lines) - 1 != r:
        raise ValueError(f"expected {r} rows, found {len(lines) - 1}")
    return BitMatrix(r, c, tuple(_row_from_hex(ln.strip(), c) for ln in lines[1:]))
