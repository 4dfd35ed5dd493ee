"""Single-site heat-bath (Glauber) dynamics and critical-scaling probes.

Chains run on three kinds of models: the mean-field complete graph with
couplings beta/N, structured gadget instances, and small dense matrices.
Each update resamples one uniformly chosen spin from its conditional law,
P(spin = +1 | rest) = 1 / (1 + exp(-2 h_i)) with local field h_i = (J sigma)_i.
Local fields are maintained incrementally (from the total magnetization, the
per-cloud magnetizations, or a cached field vector) and audited against direct
recomputation every DRIFT_CADENCE steps.

Randomness comes from numpy's counter-based Philox generator; replicas use
SeedSequence-spawned child streams, so every trajectory is reproducible from
(model, seed, steps, stride, burn_in) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .gadget import IsingInstance
from .graphs import cut_size, signs_from_string
from .partition import ENUM_BUDGET_DEFAULT

DRIFT_CADENCE = 100_000
_RNG_CHUNK = 1 << 20


@dataclass(frozen=True)
class CurieWeiss:
    """Complete graph on num_sites spins with couplings beta/num_sites (zero diagonal)."""

    num_sites: int
    beta: float

    def __post_init__(self):
        if self.num_sites < 1:
            raise ValueError("need at least one spin")


@njit(cache=True)
def _kernel_cw(spins, m, beta_over_n, sites, coins, burn_in, stride,
               step, k, m_samples, record_states, mask, state_samples, drift):
    for j in range(sites.size):
        i = sites[j]
        h = beta_over_n * (m - spins[i])
        p = 1.0 / (1.0 + math.exp(-2.0 * h))
        new = 1 if coins[j] < p else -1
        if new != spins[i]:
            spins[i] = new
            m += 2 * new
            if record_states:
                mask ^= np.int64(1) << np.int64(i)
        step += 1
        if step > burn_in and (step - burn_in) % stride == 0 and k < m_samples.size:
            m_samples[k] = m
            if record_states:
                state_samples[k] = mask
            k += 1
        if step % DRIFT_CADENCE == 0:
            mm = 0
            for q in range(spins.size):
                mm += spins[q]
            d = abs(mm - m)
            if d > drift:
                drift = float(d)
    return m, step, k, mask, drift


@njit(cache=True)
def _kernel_gadget(spins, cloud_m, nbr_sum, m, t, beta, gamma, indptr, indices,
                   sites, coins, burn_in, stride, step, k, m_samples,
                   cloud_samples, drift):
    for j in range(sites.size):
        i = sites[j]
        v = i // t
        h = beta * (cloud_m[v] - spins[i]) - gamma * nbr_sum[v]
        p = 1.0 / (1.0 + math.exp(-2.0 * h))
        new = 1 if coins[j] < p else -1
        if new != spins[i]:
            spins[i] = new
            d = 2 * new
            cloud_m[v] += d
            m += d
            for q in range(indptr[v], indptr[v + 1]):
                nbr_sum[indices[q]] += d
        step += 1
        if step > burn_in and (step - burn_in) % stride == 0 and k < m_samples.size:
            m_samples[k] = m
            for v2 in range(cloud_m.size):
                cloud_samples[k, v2] = cloud_m[v2]
            k += 1
        if step % DRIFT_CADENCE == 0:
            worst = 0
            for v2 in range(cloud_m.size):
                cm = 0
                for q in range(v2 * t, (v2 + 1) * t):
                    cm += spins[q]
                d2 = abs(cm - cloud_m[v2])
                if d2 > worst:
                    worst = d2
            if float(worst) > drift:
                drift = float(worst)
    return m, step, k, drift


@njit(cache=True)
def _kernel_dense(spins, field, J, m, sites, coins, burn_in, stride,
                  step, k, m_samples, record_states, mask, state_samples, drift):
    for j in range(sites.size):
        i = sites[j]
        p = 1.0 / (1.0 + math.exp(-2.0 * field[i]))
        new = 1 if coins[j] < p else -1
        if new != spins[i]:
            delta = float(new - spins[i])
            spins[i] = new
            m += 2 * new
            for q in range(field.size):
                field[q] += J[q, i] * delta
            if record_states:
                mask ^= np.int64(1) << np.int64(i)
        step += 1
        if step > burn_in and (step - burn_in) % stride == 0 and k < m_samples.size:
            m_samples[k] = m
            if record_states:
                state_samples[k] = mask
            k += 1
        if step % DRIFT_CADENCE == 0:
            for q in range(field.size):
                exact = 0.0
                for r in range(field.size):
                    exact += J[q, r] * spins[r]
                d2 = abs(exact - field[q])
                if d2 > drift:
                    drift = d2
    return m, step, k, mask, drift


@dataclass(frozen=True)
class Trajectory:
    """Sampled magnetizations of one chain at a fixed stride, after burn-in."""

    kind: str
    num_sites: int
    steps: int
    stride: int
    burn_in: int
    seed_key: tuple
    m: np.ndarray
    cloud_m: np.ndarray | None
    states: np.ndarray | None
    drift: float
    final_spins: np.ndarray


def default_burn_in(num_sites: int) -> int:
    """10 * N * log N updates; the subcritical mixing scale, used as a heuristic."""
    return int(10 * num_sites * max(math.log(num_sites), 1.0))


def glauber_run(model, steps: int, seed=0, stride: int | None = None,
                burn_in: int | None = None, record_states: bool = False) -> Trajectory:
    """Run one heat-bath chain and sample the magnetization every stride steps.

    model is a CurieWeiss, an IsingInstance, or a dense symmetric matrix.
    seed may be an int or a SeedSequence (replica drivers pass spawned children).
    record_states additionally samples the full configuration as a bitmask
    (dense and complete-graph models, at most 62 spins).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if isinstance(model, CurieWeiss):
        kind, num_sites = "complete", model.num_sites
    elif isinstance(model, IsingInstance):
        kind, num_sites = "gadget", model.num_sites
    else:
        J = np.ascontiguousarray(np.asarray(model, dtype=float))
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ValueError("dense model must be a square matrix")
        kind, num_sites = "dense", J.shape[0]
    if stride is None:
        stride = max(1, num_sites)
    if burn_in is None:
        burn_in = default_burn_in(num_sites)
    if record_states:
        if kind == "gadget":
            raise ValueError("state recording is supported for dense and complete models")
        if num_sites > 62:
            raise ValueError("state recording needs at most 62 spins")

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.Philox(ss))
    spins = (rng.integers(0, 2, num_sites, dtype=np.int64) * 2 - 1).astype(np.int8)

    n_samples = steps // stride
    m_samples = np.zeros(n_samples, dtype=np.int64)
    state_samples = np.zeros(n_samples if record_states else 0, dtype=np.int64)
    mask = np.int64(0)
    if record_states:
        for i in range(num_sites):
            if spins[i] > 0:
                mask |= np.int64(1) << np.int64(i)

    m = int(spins.sum(dtype=np.int64))
    total = burn_in + steps
    step = 0
    k = 0
    drift = 0.0

    if kind == "gadget":
        t = model.t
        n = model.base.n
        cloud_m = spins.reshape(n, t).sum(axis=1).astype(np.int64)
        indptr, indices = model.base.adjacency_csr()
        nbr_sum = np.zeros(n, dtype=np.int64)
        for v in range(n):
            nbr_sum[indices[indptr[v]:indptr[v + 1]]] += cloud_m[v]
        cloud_samples = np.zeros((n_samples, n), dtype=np.int64)
        while step < total:
            c = min(_RNG_CHUNK, total - step)
            sites = rng.integers(0, num_sites, c, dtype=np.int64)
            coins = rng.random(c)
            m, step, k, drift = _kernel_gadget(
                spins, cloud_m, nbr_sum, m, t, model.beta, model.gamma,
                indptr, indices, sites, coins, burn_in, stride, step, k,
                m_samples, cloud_samples, drift)
        return Trajectory(kind=kind, num_sites=num_sites, steps=steps, stride=stride,
                          burn_in=burn_in, seed_key=tuple(ss.entropy if isinstance(ss.entropy, tuple) else (ss.entropy,)),
                          m=m_samples, cloud_m=cloud_samples, states=None,
                          drift=drift, final_spins=spins)

    if kind == "complete":
        beta_over_n = model.beta / num_sites
        while step < total:
            c = min(_RNG_CHUNK, total - step)
            sites = rng.integers(0, num_sites, c, dtype=np.int64)
            coins = rng.random(c)
            m, step, k, mask, drift = _kernel_cw(
                spins, m, beta_over_n, sites, coins, burn_in, stride, step, k,
                m_samples, record_states, mask, state_samples, drift)
    else:
        field = J @ spins.astype(float)
        while step < total:
            c = min(_RNG_CHUNK, total - step)
            sites = rng.integers(0, num_sites, c, dtype=np.int64)
            coins = rng.random(c)
            m, step, k, mask, drift = _kernel_dense(
                spins, field, J, m, sites, coins, burn_in, stride, step, k,
                m_samples, record_states, mask, state_samples, drift)

    return Trajectory(kind=kind, num_sites=num_sites, steps=steps, stride=stride,
                      burn_in=burn_in, seed_key=tuple(ss.entropy if isinstance(ss.entropy, tuple) else (ss.entropy,)),
                      m=m_samples, cloud_m=None,
                      states=state_samples if record_states else None,
                      drift=drift, final_spins=spins)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of ln E|m| against ln N."""

    alpha: float
    stderr: float
    beta: float
    sizes: tuple
    mean_abs_m: tuple
    replicas: int


def _auto_steps(num_sites: int, beta: float) -> tuple[int, int]:
    """(burn_in, measured steps) sized to the known mixing scales."""
    if abs(beta - 1.0) <= 0.05:
        tau = num_sites**1.5
    else:
        tau = num_sites * max(math.log(num_sites), 1.0)
    return int(10 * tau), int(50 * tau)


def magnetization_exponent(beta: float, sizes, steps: int | None = None,
                           replicas: int = 32, seed=0) -> ExponentFit:
    """Fit E|m| ~ N^alpha on complete graphs across the given sizes.

    The critical inverse temperature is 1; alpha is 1/2 subcritically, 3/4 at
    criticality, and 1 in the ordered phase. Per-replica chains use spawned
    Philox streams; steps=None picks a budget from the relevant mixing scale.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 4:
        raise ValueError("need at least 4 sizes for a meaningful fit")
    if replicas < 1:
        raise ValueError("need at least one replica")
    root = np.random.SeedSequence(seed)
    means = []
    for num_sites in sizes:
        burn, measure = _auto_steps(num_sites, beta)
        if steps is not None:
            measure = steps
        children = root.spawn(replicas)
        acc = 0.0
        for child in children:
            traj = glauber_run(CurieWeiss(num_sites, beta), steps=measure,
                               seed=child, stride=num_sites, burn_in=burn)
            acc += float(np.abs(traj.m).mean())
        means.append(acc / replicas)
    x = np.log(np.array(sizes, dtype=float))
    y = np.log(np.array(means))
    coeffs, cov = np.polyfit(x, y, 1, cov=True)
    return ExponentFit(alpha=float(coeffs[0]), stderr=float(math.sqrt(cov[0, 0])),
                       beta=beta, sizes=tuple(sizes), mean_abs_m=tuple(means),
                       replicas=replicas)


@dataclass(frozen=True)
class PhaseOccupancy:
    """How often each per-cloud sign pattern was occupied along a trajectory."""

    fractions: dict
    top: tuple          # (pattern, fraction, cut size), most occupied first
    n_samples: int


def phase_occupancy(inst: IsingInstance, steps: int, seed=0,
                    stride: int | None = None, burn_in: int | None = None,
                    top_k: int = 8) -> PhaseOccupancy:
    """Fraction of sampled time each cloud sign pattern is occupied.

    A cloud counts as '+' when its magnetization is positive and '-' otherwise
    (zero goes to '-', matching the cut-side convention for balanced clouds).
    """
    traj = glauber_run(inst, steps=steps, seed=seed, stride=stride, burn_in=burn_in)
    signs = np.where(traj.cloud_m > 0, "+", "-")
    patterns = ["".join(row) for row in signs]
    counts: dict[str, int] = {}
    for pat in patterns:
        counts[pat] = counts.get(pat, 0) + 1
    total = len(patterns)
    fractions = {pat: cnt / total for pat, cnt in counts.items()}
    ranked = sorted(fractions.items(), key=lambda kv: (-kv[1], kv[0]))
    top = tuple((pat, frac, cut_size(inst.base, signs_from_string(pat)))
                for pat, frac in ranked[:top_k])
    return PhaseOccupancy(fractions=fractions, top=top, n_samples=total)


def autocorrelation_time(series: np.ndarray, max_lag: int | None = None) -> float:
    """Integrated autocorrelation time by the initial-positive-sequence estimator.

    Informational only; reported alongside critical-window probes because no
    acceptance threshold is defined for it.
    """
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    if n < 4 or np.allclose(x, 0.0):
        return 1.0
    if max_lag is None:
        max_lag = n // 4
    var = float(np.dot(x, x)) / n
    tau = 1.0
    for lag in range(1, max_lag):
        c = float(np.dot(x[:-lag], x[lag:])) / n
        rho = c / var
        if rho <= 0.0:
            break
        tau += 2.0 * rho
    return tau
