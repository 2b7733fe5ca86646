"""Replicated estimators: plain MC, scrambled-Sobol QMC, and their
smoothed/rotated variants.

Five named methods cover the cross of point set, orthogonal transform,
and smoothing:

    MC       pseudo-random points, raw payoff
    QMC-I    scrambled Sobol, raw payoff, identity transform
    QMC-II   scrambled Sobol, raw payoff, full-QR rotation
    sQMC-I   scrambled Sobol, push-out smoothing, identity transform
    sQMC-II  scrambled Sobol, push-out smoothing, pinned-QR rotation

Each replicate refreshes the scramble (or the pseudo-random stream) from
a counter-derived seed, so results are independent of thread count and
byte-stable under a fixed master seed.
"""

from __future__ import annotations

import dataclasses
import functools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .models import (
    HestonSpec,
    ModelSpec,
    increment_law_for,
    nominal_dim,
    paths_exp_levy,
    paths_heston,
)
from .payoffs import PayoffSpec, build_separable, payoff_value
from .points import ScrambleSeed, SobolSource, pseudo_uniform, scramble
from .smoothing import evaluate_smoothed
from .transforms import (
    OrthogonalTransform,
    identity_transform,
    mqr_transform,
    qr_transform,
    taylor_weight,
)

__all__ = [
    "METHODS",
    "RAW_METHODS",
    "SMOOTHED_METHODS",
    "EstimatorReport",
    "weight_matrix",
    "method_transform",
    "method_integrand",
    "analysis_integrand",
    "run",
    "vrf_table",
]

RAW_METHODS = ("MC", "QMC-I", "QMC-II")
SMOOTHED_METHODS = ("sQMC-I", "sQMC-II")
METHODS = ("MC", "QMC-I", "QMC-II", "sQMC-I", "sQMC-II")


@dataclass(frozen=True)
class EstimatorReport:
    method: str
    estimate: float
    replicate_variance: float
    vrf: float | None
    wall_time: float
    n: int
    reps: int


def _identity_path_map(model: ModelSpec) -> Callable[[np.ndarray], np.ndarray]:
    d = nominal_dim(model)
    ident = identity_transform(d)
    if isinstance(model, HestonSpec):
        return lambda z: paths_heston(model, z, ident)
    law = increment_law_for(model)
    return lambda z: paths_exp_levy(law, model.s0, z, ident)


@functools.lru_cache(maxsize=64)
def _weight_matrix_cached(weight_kind: str, model: ModelSpec) -> np.ndarray:
    W = taylor_weight(_identity_path_map(model), weight_kind, nominal_dim(model))
    W.setflags(write=False)
    return W


def weight_matrix(payoff: PayoffSpec, model: ModelSpec) -> np.ndarray:
    """First-order Taylor weights of the payoff's smooth part at z = 0."""
    return _weight_matrix_cached(payoff.weight_kind, model)


def method_transform(method: str, payoff: PayoffSpec, model: ModelSpec) -> OrthogonalTransform:
    """The orthogonal rotation a method applies to the normal coordinates."""
    d = nominal_dim(model)
    if method in ("MC", "QMC-I", "sQMC-I"):
        return identity_transform(d)
    W = weight_matrix(payoff, model)
    if method == "QMC-II":
        return qr_transform(W)
    if method == "sQMC-II":
        return mqr_transform(W)
    raise ValueError(f"unknown method {method!r}")


def _raw_integrand(payoff: PayoffSpec, model: ModelSpec,
                   transform: OrthogonalTransform) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(model, HestonSpec):
        def h(u):
            return payoff_value(payoff, paths_heston(model, special.ndtri(u), transform))
    else:
        law = increment_law_for(model)

        def h(u):
            return payoff_value(payoff, paths_exp_levy(law, model.s0, special.ndtri(u), transform))
    return h


def method_integrand(method: str, payoff: PayoffSpec,
                     model: ModelSpec) -> Callable[[np.ndarray], np.ndarray]:
    """The (0,1)^d integrand a method averages over its point set."""
    transform = method_transform(method, payoff, model)
    if method in RAW_METHODS:
        return _raw_integrand(payoff, model, transform)
    problem = build_separable(payoff, model, transform)
    return lambda u: evaluate_smoothed(problem, u)


def analysis_integrand(method: str, payoff: PayoffSpec,
                       model: ModelSpec) -> tuple[Callable[[np.ndarray], np.ndarray], int]:
    """Integrand and dimension for effective-dimension analysis.

    Matches method_integrand except when the smoothed integrand does not
    depend on the pushed coordinate at all (constant smooth factor, as
    for the binary payoff): that coordinate is dropped and the analysis
    runs on the remaining d - 1 inputs.
    """
    d = nominal_dim(model)
    if method in RAW_METHODS:
        return method_integrand(method, payoff, model), d
    transform = method_transform(method, payoff, model)
    problem = build_separable(payoff, model, transform)
    if payoff.kind == "binary-asian":
        disc = payoff.discount

        def reduced(v):
            return disc * (1.0 - problem.lower_bound(np.atleast_2d(np.asarray(v, dtype=float))))

        return reduced, d - 1
    return (lambda u: evaluate_smoothed(problem, u)), d


def run(method: str, payoff: PayoffSpec, model: ModelSpec, n: int, reps: int,
        seed: int, threads: int = 1) -> EstimatorReport:
    """Average the method's integrand over reps independent replicates.

    Replicate k draws its points from the (seed, k) stream, so the result
    is reproducible for fixed inputs and unchanged by threads.  Timing
    excludes one-time setup (weights, rotations, NIG inversion build).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if reps < 2:
        raise ValueError(f"reps must be >= 2 for a replicate variance, got {reps}")
    integrand = method_integrand(method, payoff, model)
    d = nominal_dim(model)

    def one(k: int) -> float:
        s = ScrambleSeed(seed, k)
        if method == "MC":
            pts = pseudo_uniform(n, d, s)
        else:
            pts = scramble(SobolSource(n, d), s)
        return float(integrand(pts.values).mean())

    t0 = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = np.fromiter(pool.map(one, range(reps)), dtype=float, count=reps)
    else:
        means = np.fromiter(map(one, range(reps)), dtype=float, count=reps)
    wall = time.perf_counter() - t0
    return EstimatorReport(method=method, estimate=float(means.mean()),
                           replicate_variance=float(means.var(ddof=1)),
                           vrf=None, wall_time=wall, n=n, reps=reps)


def _vrf(base_variance: float, variance: float) -> float:
    if variance > 0.0:
        return base_variance / variance
    return 1.0 if base_variance == 0.0 else float("inf")


def vrf_table(payoffs: Sequence[PayoffSpec], model: ModelSpec, methods: Sequence[str],
              n: int, reps: int, seed: int,
              threads: int = 1) -> list[tuple[PayoffSpec, EstimatorReport]]:
    """Run every (payoff, method) cell and attach variance-reduction
    factors relative to the MC baseline of the same payoff."""
    if "MC" not in methods:
        raise ValueError("vrf_table needs the MC baseline method")
    rows: list[tuple[PayoffSpec, EstimatorReport]] = []
    for payoff in payoffs:
        reports = {meth: run(meth, payoff, model, n, reps, seed, threads) for meth in methods}
        base = reports["MC"].replicate_variance
        for meth in methods:
            rep = reports[meth]
            rows.append((payoff, dataclasses.replace(rep, vrf=_vrf(base, rep.replicate_variance))))
    return rows
