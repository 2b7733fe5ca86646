"""Effective dimension of an integrand on the unit cube.

All quantities come from pick-freeze sampling: two independent point
blocks a, b drive hybrid evaluations that isolate how much variance the
leading coordinates (truncation sense) or single coordinates
(superposition sense) explain.

    R_l   = Cov(h(a), h(a_1..l, b_l+1..d)) / Var(h)     truncation ratios
    S_j   = Cov(h(a), h(b with coord j from a)) / Var(h) first-order indices
    tau_j = (1/2n) sum (h(a) - h(a with coord j from b))^2  total indices

    d_t  = smallest l with R_l >= p  (truncation dimension)
    d_ms = sum_j tau_j / Var(h)      (mean dimension)

The blocks are disjoint coordinate slabs of one scrambled Sobol' set in
2d dimensions, so the ratios converge at QMC rather than MC rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError
from .points import ScrambleSeed, scrambled_sobol

__all__ = [
    "DimensionReport",
    "truncation_ratio",
    "first_order_ratio",
    "mean_dimension",
    "truncation_dimension",
    "dimension_report",
]

Integrand = Callable[[np.ndarray], np.ndarray]


def _base_blocks(d: int, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    pts = scrambled_sobol(n, 2 * d, ScrambleSeed(seed))
    return pts.values[:, :d], pts.values[:, d:]


def _variance(values: np.ndarray) -> float:
    var = float(np.var(values, ddof=1))
    # constant integrands leave only summation residue, orders below
    # eps^2 relative to the magnitude; treat that as zero variance
    floor = 1e-24 * max(float(np.mean(values ** 2)), 1e-300)
    if not np.isfinite(var) or var <= floor:
        raise NumericalError("effective-dimension analysis needs an integrand "
                             "with positive finite variance")
    return var


def _cov(x: np.ndarray, y: np.ndarray) -> float:
    return float((x - x.mean()) @ (y - y.mean()) / (x.size - 1))


def truncation_ratio(integrand: Integrand, d: int, ell: int, n: int, seed: int) -> float:
    """Fraction of variance explained by coordinates 1..ell."""
    if not 1 <= ell <= d:
        raise ValueError(f"ell must be in 1..{d}, got {ell}")
    a, b = _base_blocks(d, n, seed)
    ha = np.asarray(integrand(a), dtype=float)
    hybrid = np.concatenate([a[:, :ell], b[:, ell:]], axis=1)
    return _cov(ha, np.asarray(integrand(hybrid), dtype=float)) / _variance(ha)


def first_order_ratio(integrand: Integrand, d: int, n: int, seed: int) -> float:
    """Sum of first-order Sobol' indices: variance fraction of the
    additive part of the integrand."""
    a, b = _base_blocks(d, n, seed)
    ha = np.asarray(integrand(a), dtype=float)
    var = _variance(ha)
    total = 0.0
    for j in range(d):
        hybrid = b.copy()
        hybrid[:, j] = a[:, j]
        total += _cov(ha, np.asarray(integrand(hybrid), dtype=float)) / var
    return total


def mean_dimension(integrand: Integrand, d: int, n: int, seed: int) -> float:
    """Mean dimension in the superposition sense: sum of total indices
    over the variance; 1 for additive integrands."""
    a, b = _base_blocks(d, n, seed)
    ha = np.asarray(integrand(a), dtype=float)
    var = _variance(ha)
    total = 0.0
    for j in range(d):
        hybrid = a.copy()
        hybrid[:, j] = b[:, j]
        diff = ha - np.asarray(integrand(hybrid), dtype=float)
        total += float(diff @ diff) / (2.0 * ha.size)
    return total / var


def truncation_dimension(integrand: Integrand, d: int, n: int, seed: int,
                         p: float = 0.99) -> int:
    """Smallest ell whose truncation ratio reaches p; d if none does."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    for ell in range(1, d + 1):
        if truncation_ratio(integrand, d, ell, n, seed) >= p:
            return ell
    return d


@dataclass(frozen=True)
class DimensionReport:
    """All effective-dimension statistics from one shared sample."""

    d: int
    truncation: tuple[float, ...]  # R_1 .. R_d, raw (may stray outside [0,1])
    r_order1: float
    d_ms: float
    d_t: int
    total_variance: float

    @property
    def r_first(self) -> float:
        return self.truncation[0]

    @property
    def r_first_two(self) -> float:
        return self.truncation[1] if self.d >= 2 else self.truncation[0]


def dimension_report(integrand: Integrand, d: int, n: int, seed: int,
                     p: float = 0.99) -> DimensionReport:
    """One-pass report sharing a single (a, b) block pair across the
    truncation scan, first-order indices, and Jansen total indices."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    a, b = _base_blocks(d, n, seed)
    ha = np.asarray(integrand(a), dtype=float)
    var = _variance(ha)

    trunc = []
    for ell in range(1, d + 1):
        hybrid = np.concatenate([a[:, :ell], b[:, ell:]], axis=1)
        trunc.append(_cov(ha, np.asarray(integrand(hybrid), dtype=float)) / var)
    trunc_dim = next((ell for ell, r in enumerate(trunc, start=1) if r >= p), d)

    first_order = 0.0
    jansen = 0.0
    for j in range(d):
        hybrid = b.copy()
        hybrid[:, j] = a[:, j]
        first_order += _cov(ha, np.asarray(integrand(hybrid), dtype=float)) / var
        hybrid = a.copy()
        hybrid[:, j] = b[:, j]
        diff = ha - np.asarray(integrand(hybrid), dtype=float)
        jansen += float(diff @ diff) / (2.0 * ha.size)

    return DimensionReport(d=d, truncation=tuple(trunc), r_order1=first_order,
                           d_ms=jansen / var, d_t=trunc_dim, total_variance=var)
