"""Generating matrices for digital sequences over GF(2).

Three constructions: identity (radical-inverse / van der Corput per
coordinate), generalized Niederreiter matrices from Laurent expansions of
x^(e-z-1)/p(x)^i for irreducible p (Tezuka's variant), and the order-2
matrices obtained by interlacing two order-1 matrices row by row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .f2linalg import BitMatrix, format_matrix, parse_matrix


class F2Poly:
    """Polynomial over GF(2) as an int bitset (bit i = coefficient of x^i)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: int):
        if coeffs < 0:
            raise ValueError("negative bitset")
        self.coeffs = coeffs

    @property
    def degree(self) -> int:
        if self.coeffs == 0:
            raise ValueError("degree of the zero polynomial is undefined")
        return self.coeffs.bit_length() - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, F2Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(("F2Poly", self.coeffs))

    def __mul__(self, other: "F2Poly") -> "F2Poly":
        a, b, out = self.coeffs, other.coeffs, 0
        while b:
            if b & 1:
                out ^= a
            a <<= 1
            b >>= 1
        return F2Poly(out)

    def __mod__(self, other: "F2Poly") -> "F2Poly":
        if other.coeffs == 0:
            raise ZeroDivisionError("mod by zero polynomial")
        a, d = self.coeffs, other.degree
        while a.bit_length() - 1 >= d and a:
            a ^= other.coeffs << (a.bit_length() - 1 - d)
        return F2Poly(a)

    def pow(self, k: int) -> "F2Poly":
        out = F2Poly(1)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self) -> str:
        if self.coeffs == 0:
            return "F2Poly(0)"
        terms = [
            ("1" if i == 0 else "x" if i == 1 else f"x^{i}")
            for i in range(self.coeffs.bit_length() - 1, -1, -1)
            if (self.coeffs >> i) & 1
        ]
        return f"F2Poly({'+'.join(terms)})"


def is_irreducible(p: F2Poly) -> bool:
    """Trial division by every lower-degree polynomial of degree >= 1."""
    if p.coeffs == 0 or p.degree == 0:
        return False
    for q in range(2, 1 << ((p.degree // 2) + 1)):
        if q.bit_length() - 1 >= 1 and (p % F2Poly(q)).coeffs == 0 and q != p.coeffs:
            return False
    return True


def enumerate_irreducibles(count: int) -> list[F2Poly]:
    """First ``count`` irreducible polynomials over GF(2).

    Ordered by degree, ties broken by the coefficient bitset read as an
    integer, so the list is reproducible: x, x+1, x^2+x+1, x^3+x+1, ...
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out: list[F2Poly] = []
    code = 2  # x; scanning integers visits (degree, bitset) in order
    while len(out) < count:
        p = F2Poly(code)
        if is_irreducible(p):
            out.append(p)
        code += 1
    return out


def laurent_coeffs(p: F2Poly, i: int, z: int, length: int) -> list[int]:
    """Coefficients a_1..a_length of x^(-1), x^(-2), ... in x^(e-z-1)/p(x)^i.

    e = deg(p), 0 <= z < e, i >= 1. Computed by formal power-series division
    in y = 1/x: the reversed denominator has constant term 1 (p is monic), so
    1/q~(y) expands by the standard recurrence over GF(2).
    """
    if i < 1:
        raise ValueError("power i must be >= 1")
    if length < 1:
        raise ValueError("length must be >= 1")
    e = p.degree
    if not 0 <= z < e:
        raise ValueError(f"shift z={z} outside [0, {e})")
    q = p.pow(i)
    deg_q = q.degree
    # reversed coefficients: q~_t = coefficient of x^(deg_q - t) in q
    qt = [(q.coeffs >> (deg_q - t)) & 1 for t in range(deg_q + 1)]
    # series c of 1/q~(y): c_0 = 1, c_k = XOR_{t=1..min(k,deg_q)} q~_t c_{k-t}
    shift = deg_q - (e - z - 1)  # a_l = c_{l - shift}; a_l = 0 for l < shift
    c = [0] * max(0, length - shift + 1)
    if c:
        c[0] = 1
        for k in range(1, len(c)):
            acc = 0
            for t in range(1, min(k, deg_q) + 1):
                acc ^= qt[t] & c[k - t]
            c[k] = acc
    return [c[l - shift] if l >= shift else 0 for l in range(1, length + 1)]


@dataclass(frozen=True)
class GeneratingMatrixSet:
    """d generating matrices (q_rows x n_cols each) plus their sparsity tag.

    ``row_bound_factor`` r certifies entry (k, l) = 0 whenever k > r*l;
    r = 1 for the Niederreiter-type matrices, 2 after interlacing.
    ``t_upper`` is the construction's guaranteed quality-parameter bound
    (sum of (e_j - 1) for the polynomial construction, 2t'+d after
    interlacing), used to prune t-value searches.
    """

    dim: int
    q_rows: int
    n_cols: int
    matrices: tuple[BitMatrix, ...]
    row_bound_factor: int
    provenance: str  # identity | tezuka | interlaced
    t_upper: int | None = None

    def __post_init__(self):
        if self.dim < 1 or len(self.matrices) != self.dim:
            raise ValueError("dimension / matrix count mismatch")
        for m in self.matrices:
            if (m.rows, m.cols) != (self.q_rows, self.n_cols):
                raise ValueError("matrix shape mismatch")

    def verify_row_bound(self) -> bool:
        """Full scan of the declared row_bound_factor sparsity."""
        r = self.row_bound_factor
        for m in self.matrices:
            for k in range(1, m.rows + 1):
                word = m.data[k - 1]
                # all columns l with r*l < k must be zero
                cutoff = (k - 1) // r  # largest l with r*l < k
                if word & ((1 << cutoff) - 1):
                    return False
        return True


def identity_matrices(dim: int, n_cols: int, q_rows: int | None = None) -> GeneratingMatrixSet:
    """Identity generating matrices; dim = 1 is the van der Corput sequence."""
    if dim < 1 or n_cols < 1:
        raise ValueError("dim and n_cols must be >= 1")
    q = n_cols if q_rows is None else q_rows
    mat = BitMatrix.identity(n_cols, rows=q, cols=n_cols)
    # repeating the same matrix is degenerate for dim >= 2; no t bound there
    return GeneratingMatrixSet(dim, q, n_cols, (mat,) * dim, 1, "identity",
                               t_upper=0 if dim == 1 else None)


def tezuka_matrices(d_prime: int, q_rows: int | None = None, n_cols: int = 32) -> GeneratingMatrixSet:
    """Generalized Niederreiter matrices for the first d_prime irreducibles.

    Row k of matrix j holds a_l(i, j, z) for l = 1..n_cols where
    k - 1 = (i - 1) e_j + z with 0 <= z < e_j.  Entries vanish for k > l,
    so the order-1 quality bound is sum_j (e_j - 1).
    """
    if d_prime < 1:
        raise ValueError("d_prime must be >= 1")
    q = n_cols if q_rows is None else q_rows
    polys = enumerate_irreducibles(d_prime)
    mats = []
    for p in polys:
        e = p.degree
        words = []
        for k in range(1, q + 1):
            i = (k - 1) // e + 1
            z = (k - 1) % e
            coeffs = laurent_coeffs(p, i, z, n_cols)
            words.append(sum(bit << idx for idx, bit in enumerate(coeffs)))
        mats.append(BitMatrix(q, n_cols, tuple(words)))
    t_upper = sum(p.degree - 1 for p in polys)
    return GeneratingMatrixSet(d_prime, q, n_cols, tuple(mats), 1, "tezuka", t_upper=t_upper)


def interlace(source: GeneratingMatrixSet, q_rows: int | None = None) -> GeneratingMatrixSet:
    """Interlace a 2d-dimensional set into d order-2 matrices (factor 2).

    Row 2u+v of output matrix j is row u+1 of source matrix 2(j-1)+v for
    v in {1, 2}; the output keeps the column count and doubles the row
    bound factor.  Default output q_rows = 2*n_cols, so points carry
    exactly 2n binary digits for n-bit indices.
    """
    if source.dim % 2 != 0:
        raise ValueError(f"source dimension {source.dim} is odd; interlacing pairs matrices")
    d = source.dim // 2
    q_out = 2 * source.n_cols if q_rows is None else q_rows
    need = (q_out + 1) // 2
    if source.q_rows < need:
        raise ValueError(f"source has {source.q_rows} rows, interlacing {q_out} rows needs {need}")
    mats = []
    for j in range(1, d + 1):
        words = []
        for r in range(1, q_out + 1):
            v = 1 if r % 2 == 1 else 2
            u = (r - v) // 2
            src = source.matrices[2 * (j - 1) + v - 1]
            words.append(src.data[u])
        mats.append(BitMatrix(q_out, source.n_cols, tuple(words)))
    t_upper = None if source.t_upper is None else 2 * source.t_upper + d
    return GeneratingMatrixSet(
        d, q_out, source.n_cols, tuple(mats),
        2 * source.row_bound_factor, "interlaced", t_upper=t_upper,
    )


def deinterlace(g: GeneratingMatrixSet) -> GeneratingMatrixSet:
    """Recover the consumed source rows of an interlaced set (test helper)."""
    rows_per_source = (g.q_rows + 1) // 2
    mats = []
    for j in range(g.dim):
        for v in (1, 2):
            words = []
            for u in range(rows_per_source):
                r = 2 * u + v
                if r <= g.q_rows:
                    words.append(g.matrices[j].data[r - 1])
            mats.append(BitMatrix(len(words), g.n_cols, tuple(words)))
    rows = min(m.rows for m in mats)
    mats = [BitMatrix(rows, g.n_cols, m.data[:rows]) for m in mats]
    return GeneratingMatrixSet(
        2 * g.dim, rows, g.n_cols, tuple(mats),
        g.row_bound_factor // 2, "tezuka", t_upper=None,
    )


def build(kind: str, dim: int, n_cols: int, q_rows: int | None = None) -> GeneratingMatrixSet:
    """Construct a set by CLI kind: identity | tezuka | tezuka-interlaced."""
    if kind == "identity":
        return identity_matrices(dim, n_cols, q_rows)
    if kind == "tezuka":
        return tezuka_matrices(dim, q_rows, n_cols)
    if kind == "tezuka-interlaced":
        base = tezuka_matrices(2 * dim, n_cols, n_cols)
        return interlace(base, q_rows)
    raise ValueError(f"unknown generating-matrix kind {kind!r}")


_KIND_BY_PROVENANCE = {"identity": "identity", "tezuka": "tezuka",
                       "interlaced": "tezuka-interlaced"}


def _t_upper_for(kind: str, dim: int) -> int | None:
    if kind == "identity":
        return 0 if dim == 1 else None
    if kind == "tezuka":
        return sum(p.degree - 1 for p in enumerate_irreducibles(dim))
    base = sum(p.degree - 1 for p in enumerate_irreducibles(2 * dim))
    return 2 * base + dim


def format_set(g: GeneratingMatrixSet) -> str:
    header = (
        f"# hodisc-genmat v1 kind={_KIND_BY_PROVENANCE[g.provenance]} d={g.dim} "
        f"n={g.n_cols} q={g.q_rows} rbf={g.row_bound_factor}"
    )
    blocks = [format_matrix(m) for m in g.matrices]
    return header + "\n" + "\n\n".join(blocks) + "\n"


def parse_set(text: str) -> GeneratingMatrixSet:
    lines = text.strip().splitlines()
    if not lines or not lines[0].startswith("# hodisc-genmat v1"):
        raise ValueError("missing hodisc-genmat header")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[3:])
    body = "\n".join(lines[1:])
    blocks = [b for b in body.split("\n\n") if b.strip()]
    mats = tuple(parse_matrix(b) for b in blocks)
    kind = fields["kind"]
    provenance = {v: k for k, v in _KIND_BY_PROVENANCE.items()}.get(kind)
    if provenance is None:
        raise ValueError(f"unknown generating-matrix kind {kind!r}")
    dim = int(fields["d"])
    # the search hint is recomputable from the construction kind; minimal_t
    # remains correct for any starting value
    return GeneratingMatrixSet(
        dim, int(fields["q"]), int(fields["n"]), mats,
        int(fields["rbf"]), provenance, t_upper=_t_upper_for(kind, dim),
    )
