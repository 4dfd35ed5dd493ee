"""Gadget instances: parameter schedules and the cloud-replacement Ising construction.

Each base vertex becomes a "cloud" of t spins coupled ferromagnetically at
strength beta; each base edge becomes a complete bipartite antiferromagnetic
coupling -gamma between the two clouds. beta is tied to a target cloud bias
bhat so that bhat maximizes the one-cloud profile Q, and gamma is tied to a
bias cap uhat > bhat so that orthant maximizers of the aggregate potential
stay below uhat in every coordinate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict, replace

import numpy as np

from .graphs import Graph
from .landscape import g_mono

# cloud sizes beyond float64's exact-integer range are rejected by the schedule
MAX_CLOUD_SIZE = 2**53
DENSE_CAP_DEFAULT = 10_000


@dataclass(frozen=True)
class GadgetParams:
    """Full coupling schedule for a gadget instance.

    Lab-mode parameters carry only (t, bhat, uhat, beta, gamma, max_degree)
    plus whatever schedule exponents are derivable; paper-mode parameters in
    addition fix (epsilon, tau, C, c) and tie t = n^C, bhat = t^(3/4+delta),
    uhat = bhat + t^(3/4+delta'), delta = epsilon/6, delta' = epsilon/12.
    """

    t: int
    bhat: float
    uhat: float
    beta: float
    gamma: float
    max_degree: int = 3
    epsilon: float | None = None
    tau: float | None = None
    C: int | None = None
    delta: float | None = None
    delta_prime: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.t < 2 or self.t % 2 != 0:
            raise ValueError(f"cloud size t must be even and >= 2, got {self.t}")
        if not (0 < self.bhat <= self.uhat < self.t / 2):
            raise ValueError(
                f"need 0 < bhat <= uhat < t/2, got bhat={self.bhat}, uhat={self.uhat}, t={self.t}")
        if self.bhat == self.uhat and self.gamma != 0.0:
            raise ValueError("uhat == bhat is only consistent with gamma = 0")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "GadgetParams":
        return GadgetParams(**json.loads(text))


def beta_from_bhat(t: int, bhat: float) -> float:
    """Ferromagnetic coupling making bhat the one-cloud profile maximizer.

    beta = (1/(4*bhat)) * ln((t+2*bhat)/(t-2*bhat)), evaluated through the
    monotone ratio g so the bhat -> 0 limit (beta -> 1/t) is handled by series.
    """
    if not (0 < bhat < t / 2):
        raise ValueError(f"need 0 < bhat < t/2, got bhat={bhat}, t={t}")
    return g_mono(2.0 * bhat / t) / (2.0 * t)


def gamma_from_uhat(t: int, bhat: float, uhat: float, max_degree: int = 3) -> float:
    """Antiferromagnetic coupling from the bias cap uhat.

    Solves beta + max_degree*gamma = (1/(4*uhat)) ln((t+2*uhat)/(t-2*uhat));
    gamma > 0 whenever uhat > bhat because g is strictly increasing.
    """
    if not (0 < bhat < uhat < t / 2):
        raise ValueError(f"need 0 < bhat < uhat < t/2, got bhat={bhat}, uhat={uhat}, t={t}")
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    beta = beta_from_bhat(t, bhat)
    return (g_mono(2.0 * uhat / t) / (2.0 * t) - beta) / max_degree


def schedule_params(n: int, epsilon: float, tau: float, max_degree: int = 3) -> GadgetParams:
    """Paper-mode schedule: C = ceil(3/eps), t = n^C, bhat/uhat as powers of t.

    Rejects cloud sizes beyond float64's exact-integer range, which is expected
    for any realistically small epsilon; toy epsilon near 1/2 stays representable
    for small n. n must be even so the cloud size n^C is even.
    """
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if tau <= 1.0:
        raise ValueError(f"tau must exceed 1, got {tau}")
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if n % 2 != 0:
        raise ValueError(f"paper-mode schedule needs even n so t = n^C is even, got n={n}")
    C = math.ceil(3.0 / epsilon)
    t = n**C
    if t > MAX_CLOUD_SIZE:
        raise OverflowError(
            f"cloud size t = {n}^{C} exceeds the representable range 2^53")
    delta = epsilon / 6.0
    delta_prime = epsilon / 12.0
    bhat = float(t) ** (0.75 + delta)
    uhat = bhat + float(t) ** (0.75 + delta_prime)
    if bhat >= t / 2:
        raise ValueError(f"schedule gives bhat = {bhat} >= t/2 = {t / 2}")
    if uhat >= t / 2:
        raise ValueError(f"schedule gives uhat = {uhat} >= t/2 = {t / 2}")
    beta = beta_from_bhat(t, bhat)
    gamma = gamma_from_uhat(t, bhat, uhat, max_degree)
    return GadgetParams(t=t, bhat=bhat, uhat=uhat, beta=beta, gamma=gamma,
                        max_degree=max_degree, epsilon=epsilon, tau=tau, C=C,
                        delta=delta, delta_prime=delta_prime, c=1.0 / (C + 1))


def lab_params(t: int, bhat: float, uhat: float, max_degree: int = 3,
               tau: float | None = None) -> GadgetParams:
    """Desk-scale parameters: couplings from (t, bhat, uhat), exponents derived.

    uhat == bhat yields gamma = 0 (decoupled clouds). The derived delta and
    delta_prime invert bhat = t^(3/4+delta) and uhat - bhat = t^(3/4+delta').
    """
    beta = beta_from_bhat(t, bhat)
    gamma = 0.0 if uhat == bhat else gamma_from_uhat(t, bhat, uhat, max_degree)
    delta = math.log(bhat) / math.log(t) - 0.75 if bhat > 0 else None
    dp = None
    if uhat > bhat:
        dp = math.log(uhat - bhat) / math.log(t) - 0.75
    return GadgetParams(t=t, bhat=bhat, uhat=uhat, beta=beta, gamma=gamma,
                        max_degree=max_degree, tau=tau, delta=delta, delta_prime=dp)


def snap_bhat_integer(p: GadgetParams) -> GadgetParams:
    """Round bhat to the nearest integer and retie beta and gamma to it.

    Configurations can only realize integer biases; recomputing beta keeps the
    rounded bias the exact one-cloud maximizer, and recomputing gamma keeps the
    uhat cap relation exact.
    """
    bhat_int = float(round(p.bhat))
    if not (0 < bhat_int < p.t / 2):
        raise ValueError(f"rounded bhat = {bhat_int} leaves (0, t/2)")
    if bhat_int >= p.uhat:
        raise ValueError(f"rounded bhat = {bhat_int} is not below uhat = {p.uhat}")
    beta = beta_from_bhat(p.t, bhat_int)
    gamma = gamma_from_uhat(p.t, bhat_int, p.uhat, p.max_degree)
    return replace(p, bhat=bhat_int, beta=beta, gamma=gamma)


@dataclass(frozen=True)
class IsingInstance:
    """Structured gadget instance: base graph, cloud size, couplings.

    The dense interaction matrix exists only on demand (materialize_dense);
    all large-scale paths work from this structured form.
    """

    base: Graph
    t: int
    beta: float
    gamma: float

    def __post_init__(self):
        if self.t < 2 or self.t % 2 != 0:
            raise ValueError(f"cloud size t must be even and >= 2, got {self.t}")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def num_sites(self) -> int:
        return self.base.n * self.t

    @property
    def ln_k(self) -> float:
        """ln of the configuration-independent factor exp(-beta*n*t/2)."""
        return -0.5 * self.beta * self.base.n * self.t


def build_instance(g: Graph, p: GadgetParams) -> IsingInstance:
    if g.max_degree > p.max_degree:
        raise ValueError(
            f"graph max degree {g.max_degree} exceeds schedule max_degree {p.max_degree}")
    return IsingInstance(base=g, t=p.t, beta=p.beta, gamma=p.gamma)


def materialize_dense(inst: IsingInstance, cap: int = DENSE_CAP_DEFAULT) -> np.ndarray:
    """Dense symmetric interaction matrix with zero diagonal.

    Site (v, i) maps to row v*t + i. Refuses N = n*t above cap (N^2 memory).
    """
    n, t = inst.base.n, inst.t
    N = n * t
    if N > cap:
        raise ValueError(f"dense materialization cap exceeded: N={N} > {cap}")
    J = np.zeros((N, N))
    for v in range(n):
        J[v * t:(v + 1) * t, v * t:(v + 1) * t] = inst.beta
    for (u, v) in inst.base.edges:
        J[u * t:(u + 1) * t, v * t:(v + 1) * t] = -inst.gamma
        J[v * t:(v + 1) * t, u * t:(u + 1) * t] = -inst.gamma
    np.fill_diagonal(J, 0.0)
    return J
