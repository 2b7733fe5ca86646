"""Payoffs and their variable-separation bounds.

Three payoffs are built in: the binary Asian option, the pathwise
Asian-delta estimator, and the down-and-out barrier call.  Each one is
a smooth factor times an indicator whose payout region, conditional on
the coordinates u_{2:d}, is an interval (Gamma_1, Gamma_2) in the first
coordinate.  The gamma_* functions compute those bounds; build_separable
wires payoff, model, and transform into a SeparableProblem the smoothing
layer can consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .models import (
    HestonSpec,
    IncrementLaw,
    ModelSpec,
    increment_law_for,
    nominal_dim,
    paths_exp_levy,
    paths_heston,
)
from .transforms import OrthogonalTransform, apply_transform

__all__ = [
    "PayoffSpec",
    "SeparableProblem",
    "payoff_value",
    "gamma_component",
    "gamma_average",
    "gamma_extreme",
    "heston_gamma_average",
    "heston_gamma_extreme",
    "build_separable",
]

PAYOFF_KINDS = ("binary-asian", "asian-delta", "barrier-down-out")


@dataclass(frozen=True)
class PayoffSpec:
    """Payoff descriptor: kind, strike K, knockout barrier kappa, discount."""

    kind: str
    strike: float
    barrier: float | None = None
    discount: float = 1.0
    s0: float | None = None  # reference price for the delta estimator

    def __post_init__(self):
        if self.kind not in PAYOFF_KINDS:
            raise ValueError(f"unknown payoff kind {self.kind!r}")
        if self.strike <= 0:
            raise ValueError("strike must be positive")
        if self.kind == "barrier-down-out" and (self.barrier is None or self.barrier <= 0):
            raise ValueError("barrier-down-out needs a positive barrier level")

    @classmethod
    def for_model(cls, kind: str, model: ModelSpec, strike: float,
                  barrier: float | None = None) -> "PayoffSpec":
        return cls(kind=kind, strike=strike, barrier=barrier,
                   discount=float(np.exp(-model.r * model.T)), s0=model.s0)

    def barrier_levels(self, m: int) -> np.ndarray:
        """Per-step knockout levels: kappa except at maturity, where the
        strike is folded in (kappa_m = max(K, kappa)), which turns the
        call payoff times the survival product into a plain product of
        level indicators with a sign-definite smooth factor."""
        levels = np.full(m, float(self.barrier))
        levels[-1] = max(self.strike, self.barrier)
        return levels

    @property
    def weight_kind(self) -> str:
        """Which Taylor weight family matches this payoff."""
        return "barrier" if self.kind == "barrier-down-out" else "average"


def payoff_value(spec: PayoffSpec, paths: np.ndarray):
    """Discounted payoff of each path; accepts one path or an (N, m) batch."""
    S = np.asarray(paths, dtype=float)
    single = S.ndim == 1
    S = np.atleast_2d(S)
    avg = S.mean(axis=1)
    if spec.kind == "binary-asian":
        out = spec.discount * (avg > spec.strike).astype(float)
    elif spec.kind == "asian-delta":
        out = spec.discount * (avg / spec.s0) * (avg > spec.strike)
    else:
        levels = spec.barrier_levels(S.shape[1])
        alive = np.all(S > levels[None, :], axis=1)
        out = spec.discount * (S[:, -1] - spec.strike) * alive
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# separation bounds for exponential-Levy paths.  All take the conditioning
# increments x_{2:m} as an (..., m-1) array; the leading axes broadcast.


def gamma_component(j: int, kappa: float, x_rest: np.ndarray,
                    law: IncrementLaw, s0: float) -> np.ndarray:
    """Bound for the single-date condition S_j > kappa:
    gamma_j = phi(log(kappa/s0) - sum_{i=2..j} x_i)."""
    x_rest = np.asarray(x_rest, dtype=float)
    tail = x_rest[..., : j - 1].sum(axis=-1) if j > 1 else np.zeros(x_rest.shape[:-1])
    return law.cdf(np.log(kappa / s0) - tail)


def gamma_average(kappa: float, x_rest: np.ndarray, law: IncrementLaw,
                  s0: float, m: int) -> np.ndarray:
    """Bound for the average condition S_A > kappa:
    gamma = phi(log(kappa m) - log sum_i s0 exp(x_2 + ... + x_i))."""
    x_rest = np.asarray(x_rest, dtype=float)
    partial = np.cumsum(x_rest, axis=-1)
    conditional_sum = s0 * (1.0 + np.exp(partial).sum(axis=-1))
    return law.cdf(np.log(kappa * m) - np.log(conditional_sum))


def gamma_extreme(kappas: np.ndarray, x_rest: np.ndarray, law: IncrementLaw,
                  s0: float, direction: str = "min-above") -> np.ndarray:
    """Bound for extreme conditions over per-step levels kappa_j.

    min-above: {S_j > kappa_j for all j} <=> u_1 > max_j gamma_j, returns
    that max.  max-below: {S_j < kappa_j for all j} <=> u_1 < min_j
    gamma_j, returns the min.
    """
    if direction not in ("min-above", "max-below"):
        raise ValueError(f"unknown direction {direction!r}")
    kappas = np.asarray(kappas, dtype=float)
    x_rest = np.asarray(x_rest, dtype=float)
    offsets = np.zeros(x_rest.shape[:-1] + (kappas.size,))
    offsets[..., 1:] = np.cumsum(x_rest, axis=-1)
    g = law.cdf(np.log(kappas / s0) - offsets)
    return g.max(axis=-1) if direction == "min-above" else g.min(axis=-1)


# ---------------------------------------------------------------------------
# Heston bounds via the first-shock factorization S_i = exp(c z_1) zeta_i


def _heston_zeta(u_rest: np.ndarray, spec: HestonSpec,
                 transform: OrthogonalTransform) -> np.ndarray:
    _require_pinned(transform)
    u_rest = np.atleast_2d(np.asarray(u_rest, dtype=float))
    z = np.zeros((u_rest.shape[0], spec.d))
    z[:, 1:] = special.ndtri(u_rest)
    return paths_heston(spec, z, transform)


def _heston_c(spec: HestonSpec) -> float:
    return float(np.sqrt((1.0 - spec.rho ** 2) * spec.v0 * spec.dt))


def heston_gamma_average(kappa: float, u_rest: np.ndarray, spec: HestonSpec,
                         transform: OrthogonalTransform) -> np.ndarray:
    """Heston bound for S_A > kappa on the conditioning coordinates u_{2:d}."""
    zeta = _heston_zeta(u_rest, spec, transform)
    c = _heston_c(spec)
    return special.ndtr((np.log(kappa * spec.m) - np.log(zeta.sum(axis=-1))) / c)


def heston_gamma_extreme(kappas: np.ndarray, u_rest: np.ndarray, spec: HestonSpec,
                         transform: OrthogonalTransform,
                         direction: str = "min-above") -> np.ndarray:
    """Heston analogue of gamma_extreme: all S_j share one z_1 factor
    exp(c z_1), so the joint condition is again an interval in u_1."""
    if direction not in ("min-above", "max-below"):
        raise ValueError(f"unknown direction {direction!r}")
    zeta = _heston_zeta(u_rest, spec, transform)
    g = special.ndtr(np.log(np.asarray(kappas, dtype=float)[None, :] / zeta) / _heston_c(spec))
    return g.max(axis=-1) if direction == "min-above" else g.min(axis=-1)


# ---------------------------------------------------------------------------
# wiring


@dataclass(frozen=True, eq=False)
class SeparableProblem:
    """A payoff in variable-separated form.

    smooth_factor maps the full (N, d) uniform batch to discounted payoff
    factors; lower_bound/upper_bound map the conditioning block u_{2:d}
    to the payout interval endpoints.  interval orientation means the
    payout region is {Gamma_1 < u_1 < Gamma_2}; complement means its
    complement.
    """

    smooth_factor: Callable[[np.ndarray], np.ndarray]
    lower_bound: Callable[[np.ndarray], np.ndarray]
    upper_bound: Callable[[np.ndarray], np.ndarray]
    orientation: str
    d: int
    payoff: PayoffSpec | None = None

    def __post_init__(self):
        if self.orientation not in ("interval", "complement"):
            raise ValueError(f"unknown orientation {self.orientation!r}")


def _require_pinned(transform: OrthogonalTransform) -> None:
    # conditioning on u_{2:d} is only meaningful when (Uz)_1 = z_1
    if transform.kind == "qr":
        raise ValueError("separable form needs an identity or mqr transform; "
                         "the full-qr transform does not pin the first coordinate")


def build_separable(payoff: PayoffSpec, model: ModelSpec,
                    transform: OrthogonalTransform) -> SeparableProblem:
    """Assemble (f, Gamma_1, Gamma_2) for a payoff/model/transform triple."""
    _require_pinned(transform)
    d = nominal_dim(model)
    if transform.d != d:
        raise ValueError(f"transform dimension {transform.d} does not match model dimension {d}")
    heston = isinstance(model, HestonSpec)
    law = increment_law_for(model)
    m = model.m

    if heston:
        def paths_of(u):
            return paths_heston(model, special.ndtri(u), transform)
    else:
        def paths_of(u):
            return paths_exp_levy(law, model.s0, special.ndtri(u), transform)

        sub = transform.U[1:, 1:] if transform.kind == "mqr" else None

        def x_rest_of(v):
            z = special.ndtri(v)
            y = z if sub is None else z @ sub.T
            if law.gaussian:
                return law.mean + law.scale * y
            return law.inv(special.ndtr(y))

    if payoff.kind == "barrier-down-out":
        levels = payoff.barrier_levels(m)
        if heston:
            def lower(v):
                return heston_gamma_extreme(levels, v, model, transform)
        else:
            def lower(v):
                return gamma_extreme(levels, x_rest_of(v), law, model.s0)

        def factor(u):
            return payoff.discount * (paths_of(u)[:, -1] - payoff.strike)
    else:
        if heston:
            def lower(v):
                return heston_gamma_average(payoff.strike, v, model, transform)
        else:
            def lower(v):
                return gamma_average(payoff.strike, x_rest_of(v), law, model.s0, m)

        if payoff.kind == "binary-asian":
            def factor(u):
                return np.full(np.atleast_2d(u).shape[0], payoff.discount)
        else:
            def factor(u):
                return payoff.discount * paths_of(u).mean(axis=1) / payoff.s0

    def upper(v):
        v = np.atleast_2d(v)
        return np.ones(v.shape[0])

    return SeparableProblem(smooth_factor=factor, lower_bound=lower,
                            upper_bound=upper, orientation="interval",
                            d=d, payoff=payoff)
