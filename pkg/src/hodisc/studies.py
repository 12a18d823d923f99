"""Coefficient-envelope audits, the lifting construction, and rate studies.

The Haar coefficients of an order-2 sequence prefix obey two envelope
regimes split at |j| + t/2 = ld N: above the split, boxes holding points
are bounded by 2^(t/2) / (N 2^|j|) and point-free boxes by 2^(-2|j|);
below it, with N = 2^(n_r) + ... + 2^(n_1) and n_mu <= |j| + t/2 <
n_(mu+1) (n_0 = 0, n_(r+1) = ld N as a real number), every coefficient is
bounded by 2^t/N * (2^(-|j|) + (2 n_(mu+1) - t - 2|j|)^(d-1) 2^(-n_(mu+1))).
The audit measures the implied constants empirically; the study harness
normalizes norms by the theorem rate shapes and leaves judgment to the
acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .genmat import GeneratingMatrixSet
from .haar import HaarTable, build_table, volume_value
from .norms import (
    NormReport,
    besov_quasinorm,
    bmo_dyadic,
    d0_projection_norm,
    l2_warnock,
    lp_grid,
    orlicz_exp_estimate,
    star_discrepancy_exact,
)
from .points import DyadicPointSet, prefix

REGIME_SMALL_OCCUPIED = "small_boxes"
REGIME_SMALL_EMPTY = "small_boxes_empty"
REGIME_LARGE = "large_boxes"


def binary_decomposition(n_points: int) -> tuple[int, ...]:
    """Exponents n_r > ... > n_1 with N = sum 2^(n_i)."""
    if n_points < 1:
        raise ValueError("need at least one point")
    return tuple(i for i in range(n_points.bit_length() - 1, -1, -1)
                 if (n_points >> i) & 1)


def _is_small_regime(level_weight: int, t: int, n_points: int) -> bool:
    # |j| + t/2 >= ld N as an exact integer comparison
    return (1 << (2 * level_weight + t)) >= n_points * n_points


@dataclass(frozen=True)
class BoundCase:
    regime: str
    t: int
    dim: int
    n_points: int
    decomposition: tuple[int, ...]

    def __post_init__(self):
        if sum(1 << e for e in self.decomposition) != self.n_points:
            raise ValueError("decomposition does not sum to the point count")
        if list(self.decomposition) != sorted(self.decomposition, reverse=True):
            raise ValueError("decomposition exponents must strictly decrease")
        if self.regime not in (REGIME_SMALL_OCCUPIED, REGIME_SMALL_EMPTY, REGIME_LARGE):
            raise ValueError(f"unknown regime {self.regime!r}")

    @classmethod
    def classify(cls, level_weight: int, t: int, dim: int, n_points: int,
                 occupied: bool) -> "BoundCase":
        if _is_small_regime(level_weight, t, n_points):
            regime = REGIME_SMALL_OCCUPIED if occupied else REGIME_SMALL_EMPTY
        else:
            regime = REGIME_LARGE
        return cls(regime, t, dim, n_points, binary_decomposition(n_points))


def coeff_bound(level_weight: int, case: BoundCase) -> float:
    """Evaluate the envelope right-hand side (without its hidden constant)."""
    small = _is_small_regime(level_weight, case.t, case.n_points)
    if case.regime in (REGIME_SMALL_OCCUPIED, REGIME_SMALL_EMPTY):
        if not small:
            raise ValueError(f"level weight {level_weight} is below the split")
        if case.regime == REGIME_SMALL_OCCUPIED:
            return 2.0 ** (case.t / 2.0 - level_weight) / case.n_points
        return 2.0 ** (-2 * level_weight)
    if small:
        raise ValueError(f"level weight {level_weight} is above the split")
    # thresholds n_0 = 0 < n_1 < ... < n_r < n_(r+1) = ld N (real)
    ascending = list(reversed(case.decomposition))
    ld_n = math.log2(case.n_points)
    x = level_weight + case.t / 2.0
    upper = ld_n
    for cut in ascending:
        if x < cut:
            upper = float(cut)
            break
    span = 2.0 * upper - case.t - 2.0 * level_weight
    return (2.0 ** case.t / case.n_points) * (
        2.0 ** (-level_weight) + span ** (case.dim - 1) * 2.0 ** (-upper))


@dataclass(frozen=True)
class RegimeRatios:
    n_points: int
    t: int
    max_ratio: dict  # regime -> max |coeff|/bound, None when unpopulated
    n_checked: int


def bound_ratio_audit(t_table: HaarTable, t: int,
                      source: GeneratingMatrixSet) -> RegimeRatios:
    """Per-regime max of |coefficient| / envelope over the stored box.

    Requires an interlaced order-2 source with row-bound factor 2 (the
    envelope's sparsity hypothesis); order-1 inputs are rejected.  Levels
    with zero counting part are covered by their shared volume coefficient.
    """
    if source.provenance != "interlaced" or source.row_bound_factor != 2:
        raise ValueError("audit requires an interlaced order-2 generating set")
    n = t_table.count
    ratios: dict[str, float | None] = {
        REGIME_SMALL_OCCUPIED: None, REGIME_SMALL_EMPTY: None, REGIME_LARGE: None}
    checked = 0

    def bump(regime: str, ratio: float):
        cur = ratios[regime]
        ratios[regime] = ratio if cur is None else max(cur, ratio)

    from itertools import product as _product
    for level in _product(range(-1, t_table.box_limit), repeat=t_table.dim):
        w = sum(max(j, 0) for j in level)
        v = float(volume_value(level))
        small = _is_small_regime(w, t, n)
        data = t_table.levels.get(level)
        if data is None:
            vals = np.empty(0)
            n_nz = 0
        elif t_table.exact:
            vals = np.array([float(c) for c in data.values()])
            n_nz = len(vals)
        else:
            vals = data[1]
            n_nz = len(vals)
        has_empty = (1 << w) > n_nz
        if small:
            if n_nz:
                case = BoundCase.classify(w, t, t_table.dim, n, occupied=True)
                bound = coeff_bound(w, case)
                bump(REGIME_SMALL_OCCUPIED, float(np.abs(vals - v).max()) / bound)
                checked += n_nz
            if has_empty:
                case = BoundCase.classify(w, t, t_table.dim, n, occupied=False)
                bump(REGIME_SMALL_EMPTY, abs(v) / coeff_bound(w, case))
                checked += 1
        else:
            case = BoundCase.classify(w, t, t_table.dim, n, occupied=True)
            bound = coeff_bound(w, case)
            worst = abs(v) if has_empty else 0.0
            if n_nz:
                worst = max(worst, float(np.abs(vals - v).max()))
            bump(REGIME_LARGE, worst / bound)
            checked += n_nz + (1 if has_empty else 0)
    return RegimeRatios(n_points=n, t=t, max_ratio=ratios, n_checked=checked)


# ------------------------------------------------------------------ lift


def lift_sequence(p: DyadicPointSet, n_points: int | None = None) -> DyadicPointSet:
    """Append the coordinate k/N to the first N points of a d-dim sequence.

    For N = 2^n the result is exact; otherwise the last coordinate is
    rounded to 52 fractional bits and the set is flagged inexact.
    """
    n_points = p.count if n_points is None else n_points
    if n_points != p.count:
        raise ValueError("lift consumes exactly the provided prefix")
    if p.start_index != 0:
        raise ValueError("lift applies to a sequence prefix starting at index 0")
    n = n_points.bit_length() - 1
    if n_points == 1 << n:
        b_out = max(p.precision_bits, n)
        last = np.arange(n_points, dtype=np.int64) << (b_out - n)
        exact = p.exact
    else:
        b_out = max(p.precision_bits, 52)
        last = np.array([round(k * (1 << 52) / n_points) for k in range(n_points)],
                        dtype=np.int64) << (b_out - 52)
        exact = False
    firsts = p.numerators.astype(np.int64) << (b_out - p.precision_bits)
    arr = np.column_stack([firsts, last])
    return DyadicPointSet(p.dim + 1, b_out, arr, exact=exact)


# ------------------------------------------------------------- rate study


@dataclass(frozen=True)
class ScalingRow:
    n_points: int
    value: float
    normalized: float
    exponent: float
    s: float
    theorem: str

    def __post_init__(self):
        if not (math.isfinite(self.normalized) and self.normalized > 0):
            raise ValueError("normalized value must be finite and positive")


def rate_shape(kind: str, dim: int, p: float | None = None, q: float | None = None,
               s: float | None = None, beta: float | None = None) -> tuple[float, float, str]:
    """(s, log2 exponent, rate id) such that N^(1-s) value / (ld N)^e is flat."""
    if kind == "l2" or kind == "lp":
        return 0.0, dim / 2.0, "seq-l2-rate"
    if kind == "bmo":
        return 0.0, dim / 2.0, "bmo-rate"
    if kind == "d0":
        return 0.0, dim / 2.0, "d0-lower-rate"
    if kind == "besov":
        if s is None or q is None:
            raise ValueError("besov rate needs q and s")
        if s == 0.0:
            return 0.0, dim / q, "besov-s0-rate"
        return s, (dim - 1) / q, "besov-smooth-rate"
    if kind == "orlicz":
        if beta is None:
            raise ValueError("orlicz rate needs beta")
        return 0.0, dim - 1.0 / beta, "orlicz-rate"
    if kind == "star":
        return 0.0, float(dim), "star-order1-rate"
    raise ValueError(f"no rate shape for norm kind {kind!r}")


def evaluate_norm(p: DyadicPointSet, kind: str, *, pp: float | None = None,
                  q: float | None = None, s: float | None = None,
                  beta: float | None = None, depth: int = 4,
                  resolution: int = 64, table: HaarTable | None = None) -> NormReport:
    """Dispatch a norm evaluation for study/CLI use."""
    if kind == "l2":
        return l2_warnock(p)
    if kind == "lp":
        return lp_grid(p, pp if pp is not None else 2.0, resolution)
    if kind == "star":
        return star_discrepancy_exact(p)
    if kind == "orlicz":
        return orlicz_exp_estimate(p, beta if beta is not None else 2.0,
                                   resolution=resolution)
    table = build_table(p, exact=False) if table is None else table
    if kind == "bmo":
        return bmo_dyadic(table, min(depth, table.box_limit))
    if kind == "d0":
        return d0_projection_norm(table)
    if kind == "besov":
        if pp is None or q is None or s is None:
            raise ValueError("besov needs p, q, s")
        return besov_quasinorm(table, pp, q, s)
    raise ValueError(f"unknown norm kind {kind!r}")


def scaling_study(g: GeneratingMatrixSet, kind: str, n_list: list[int], *,
                  pp: float | None = None, q: float | None = None,
                  s: float | None = None, beta: float | None = None,
                  depth: int = 4, resolution: int = 64) -> list[ScalingRow]:
    """Norm values over prefixes with theorem-normalized columns.

    No pass/fail judgment here; the acceptance suite owns the ratio checks.
    """
    if sorted(n_list) != list(n_list) or any(n < 2 for n in n_list):
        raise ValueError("N list must be ascending with every N >= 2")
    s_exp, log_exp, rate_id = rate_shape(kind, g.dim, pp, q, s, beta)
    rows = []
    for n in n_list:
        pts = prefix(g, n).trimmed()
        rep = evaluate_norm(pts, kind, pp=pp, q=q, s=s, beta=beta,
                            depth=depth, resolution=resolution)
        normalized = n ** (1.0 - s_exp) * rep.value / math.log2(n) ** log_exp
        rows.append(ScalingRow(n, rep.value, normalized, log_exp, s_exp, rate_id))
    return rows


def format_study_csv(rows: list[ScalingRow]) -> str:
    lines = ["N,value,normalized,exponent,theorem"]
    for r in rows:
        lines.append(f"{r.n_points},{r.value:.17g},{r.normalized:.17g},"
                     f"{r.exponent:.17g},{r.theorem}")
    return "\n".join(lines) + "\n"
