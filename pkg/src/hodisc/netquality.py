"""Order-alpha quality parameters (t-values) of digital nets and sequences.

The independence condition ranges over per-coordinate selections of row
indices i_1 > i_2 > ... where only the largest min(nu, alpha) indices are
charged to the weight budget alpha*n - t, but *all* selected rows must be
linearly independent.  Enumerating unbounded selections is infeasible; we
enumerate counted tuples with nu <= alpha and, whenever a coordinate uses
exactly alpha counted indices, adjoin every row below the smallest counted
index for free ("downward closure").  This is exactly equivalent to the
unbounded enumeration:

  * closure sets only add rows permitted at zero extra weight, and each
    closed set is itself an admissible selection (its counted top-alpha
    indices are the original ones), so a dependent closed set is a genuine
    violation;
  * conversely any dependent admissible selection S contains a zero-XOR
    subset S'; sorting S' per coordinate, its top-alpha indices are bounded
    by those of S, hence weight(S') <= weight(S), and S' is contained in the
    closed set of its own counted prefix, which is therefore dependent too.

Without the closure the reduction would be wrong: three rows can be pairwise
independent yet jointly dependent.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from .f2linalg import rank, submatrix_upper_left
from .genmat import GeneratingMatrixSet
from .points import DyadicPointSet


@dataclass(frozen=True)
class Witness:
    """A violating selection: 1-based row indices per coordinate (closure included)."""

    rows_per_coordinate: tuple[tuple[int, ...], ...]
    n_rows: int
    rank: int

    @property
    def deficit(self) -> int:
        return self.n_rows - self.rank


@dataclass(frozen=True)
class TValueReport:
    alpha: int
    n: int
    dim: int
    t: int
    witness: Witness | None  # violation at t-1 (None when t == 0)


def _selection_options(budget: int, alpha: int) -> list[tuple[int, tuple[int, ...]]]:
    """Per-coordinate (weight, closed row set) options, excluding the empty one."""
    if alpha == 1:
        return [(i1, tuple(range(1, i1 + 1))) for i1 in range(1, budget + 1)]
    if alpha == 2:
        opts: list[tuple[int, tuple[int, ...]]] = []
        for i1 in range(1, budget + 1):
            opts.append((i1, (i1,)))
            for i2 in range(1, min(i1, budget - i1 + 1)):
                opts.append((i1 + i2, (i1,) + tuple(range(1, i2 + 1))))
        return opts
    raise ValueError(f"alpha={alpha} unsupported (only 1 and 2)")


def _restricted_rows(g: GeneratingMatrixSet, n: int, alpha: int) -> list[list[int]]:
    """Row bitsets of the left upper (alpha*n x n) submatrices."""
    if g.q_rows < alpha * n:
        raise ValueError(f"need {alpha * n} rows, generating set has {g.q_rows}")
    if g.n_cols < n:
        raise ValueError(f"need {n} columns, generating set has {g.n_cols}")
    subs = [submatrix_upper_left(m, alpha * n, n) for m in g.matrices]
    return [list(s.data) for s in subs]


def _find_violation(g: GeneratingMatrixSet, n: int, alpha: int, t: int) -> Witness | None:
    if not 0 <= t <= alpha * n:
        raise ValueError(f"t={t} outside [0, {alpha * n}]")
    budget = alpha * n - t
    if budget <= 0:
        return None
    rows_by_coord = _restricted_rows(g, n, alpha)
    options = _selection_options(budget, alpha)
    options.sort()
    d = g.dim
    chosen: list[tuple[int, ...]] = [()] * d

    def dfs(coord: int, remaining: int, vectors: list[int], n_vectors: int) -> Witness | None:
        if coord == d:
            if n_vectors == 0:
                return None
            rk = rank(vectors, n)
            if rk < n_vectors:
                return Witness(tuple(chosen), n_vectors, rk)
            return None
        # empty selection for this coordinate
        res = dfs(coord + 1, remaining, vectors, n_vectors)
        if res is not None:
            return res
        mat = rows_by_coord[coord]
        for weight, row_idx in options:
            if weight > remaining:
                break
            chosen[coord] = row_idx
            ext = vectors + [mat[i - 1] for i in row_idx]
            res = dfs(coord + 1, remaining - weight, ext, n_vectors + len(row_idx))
            if res is not None:
                return res
        chosen[coord] = ()
        return None

    return dfs(0, budget, [], 0)


def is_order_alpha_net(g: GeneratingMatrixSet, n: int, alpha: int, t: int) -> bool:
    """True iff the left upper alpha*n x n submatrices generate an order-alpha
    digital (t,n,d)-net."""
    return _find_violation(g, n, alpha, t) is None


def minimal_t(g: GeneratingMatrixSet, n: int, alpha: int) -> TValueReport:
    """Smallest valid t, by linear descent from the construction's bound.

    Monotonicity (a (t,n,d)-net is a (t',n,d)-net for t' >= t) makes the
    descent sound; the returned witness is the violation at t-1.
    """
    cap = alpha * n
    start = cap if g.t_upper is None else min(g.t_upper, cap)
    t = start
    while t <= cap and not is_order_alpha_net(g, n, alpha, t):
        t += 1  # construction bound can be beaten by truncation artifacts only upward
    if t > cap:
        raise ValueError(f"no valid t <= {cap}; matrices are degenerate")
    witness = None
    while t > 0:
        w = _find_violation(g, n, alpha, t - 1)
        if w is None:
            t -= 1
        else:
            witness = w
            break
    return TValueReport(alpha=alpha, n=n, dim=g.dim, t=t, witness=witness)


def is_order_alpha_sequence_prefix(g: GeneratingMatrixSet, n_max: int, alpha: int, t: int,
                                   ) -> tuple[bool, int | None]:
    """Check the net condition on every left-upper alpha*n x n truncation for
    t/alpha < n <= n_max.  Returns (ok, first failing n or None)."""
    n_start = t // alpha + 1
    for n in range(n_start, n_max + 1):
        if not is_order_alpha_net(g, n, alpha, t):
            return False, n
    return True, None


@dataclass(frozen=True)
class FairIntervalReport:
    order: int  # common level weight |j| of the audited boxes
    bound: int  # per-box occupancy cap 2^ceil(t/alpha)
    max_occupancy: int
    worst_level: tuple[int, ...] | None
    worst_box: tuple[int, ...] | None
    passes: bool
    vacuous: bool = False


def fair_interval_audit(p: DyadicPointSet, alpha: int, t: int) -> FairIntervalReport:
    """Max occupancy over all dyadic boxes of order n - ceil(t/alpha) for a
    2^n-point set; exact integer box arithmetic on numerators."""
    n = p.count.bit_length() - 1
    if p.count != 1 << n:
        raise ValueError(f"point count {p.count} is not a power of two")
    excess = ceil(t / alpha)
    bound = 1 << excess
    order = n - excess
    if order < 0:
        return FairIntervalReport(order, bound, p.count, None, None, True, vacuous=True)
    b = p.precision_bits
    best = (0, None, None)
    for level in _compositions(order, p.dim):
        counts: dict[tuple[int, ...], int] = {}
        for k in range(p.count):
            key = tuple(int(p.numerators[k, i]) >> (b - level[i]) for i in range(p.dim))
            counts[key] = counts.get(key, 0) + 1
        worst_key, occ = max(counts.items(), key=lambda kv: kv[1])
        if occ > best[0]:
            best = (occ, level, worst_key)
    max_occ, worst_level, worst_box = best
    return FairIntervalReport(order, bound, max_occ, worst_level, worst_box,
                              passes=max_occ <= bound)


def _compositions(total: int, parts: int):
    """All j in N_0^parts with sum(j) == total."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest
