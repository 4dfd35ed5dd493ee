"""Spectrum of gadget interaction matrices via their block structure.

The interaction matrix splits as a block-diagonal ferromagnetic part plus a
cross-cloud part; both are polynomials in the per-cloud averaging projector,
so they commute and the full N-point spectrum reduces to the n-point adjacency
spectrum of the base graph:

    beta*(t-1) - gamma*t*lambda_i   for each adjacency eigenvalue lambda_i,
    -beta                           with multiplicity n*(t-1).

The adjacency eigensolve uses a self-contained cyclic Jacobi iteration; the
dense route (LAPACK via numpy) exists as an independent oracle for small N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gadget import GadgetParams, IsingInstance, materialize_dense

DENSE_EIG_LIMIT = 4000
JACOBI_TOL = 1e-12


def jacobi_eigenvalues(A: np.ndarray, tol: float = JACOBI_TOL,
                       max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps until every off-diagonal entry is below tol times the largest
    diagonal magnitude. Adequate for the n x n adjacency matrices used here
    (n up to a few hundred); raises ArithmeticError on non-convergence.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    n = A.shape[0]
    if n <= 1:
        return np.diag(A).copy() if n else np.zeros(0)
    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A))).max()
        scale = max(np.abs(np.diag(A)).max(), 1.0)
        if off <= tol * scale:
            return np.sort(np.diag(A))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol * scale * 1e-2:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                sign = 1.0 if theta >= 0 else -1.0
                tau = sign / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, tau)
                s = tau * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
    raise ArithmeticError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True)
class SpectrumReport:
    """Spectrum of a gadget matrix as (value, multiplicity) groups.

    values holds the n cloud-mode eigenvalues followed by the shared
    orthogonal-mode eigenvalue -beta; multiplicities sums to N = n*t
    (kept as a Python int, N can exceed any array size in paper mode).
    """

    values: np.ndarray
    multiplicities: np.ndarray
    num_sites: int
    lambda_min: float
    lambda_max: float
    diameter: float
    paper_bound: float | None = None

    def eigenvalues(self, cap: int = 1_000_000) -> np.ndarray:
        """Materialize the full sorted eigenvalue multiset (small N only)."""
        if self.num_sites > cap:
            raise ValueError(f"refusing to materialize {self.num_sites} eigenvalues")
        return np.sort(np.repeat(self.values, self.multiplicities))


def structured_spectrum(inst: IsingInstance, params: GadgetParams | None = None) -> SpectrumReport:
    """Full spectrum from the n x n adjacency eigenvalues of the base graph."""
    n, t = inst.base.n, inst.t
    adj_eigs = jacobi_eigenvalues(inst.base.adjacency_matrix())
    cloud_modes = inst.beta * (t - 1) - inst.gamma * t * adj_eigs
    values = np.concatenate([cloud_modes, [-inst.beta]])
    mults = np.concatenate([np.ones(n, dtype=np.int64), [n * (t - 1)]])
    lam_min = float(min(values.min(), -inst.beta))
    lam_max = float(values.max())
    paper_bound = None
    if params is not None and params.delta is not None:
        paper_bound = 1.0 + 8.0 * float(t) ** (-0.5 + 2.0 * params.delta)
    return SpectrumReport(values=values, multiplicities=mults, num_sites=n * t,
                          lambda_min=lam_min, lambda_max=lam_max,
                          diameter=lam_max - lam_min, paper_bound=paper_bound)


def dense_spectral_diameter(J: np.ndarray) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a dense symmetric matrix; oracle route."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("J must be a square matrix")
    if J.shape[0] > DENSE_EIG_LIMIT:
        raise ValueError(f"dense eigensolve cap exceeded: N={J.shape[0]} > {DENSE_EIG_LIMIT}")
    if not np.allclose(J, J.T, atol=1e-10):
        raise ValueError("J must be symmetric")
    if J.shape[0] == 0:
        return 0.0, 0.0
    w = np.linalg.eigvalsh(J)
    return float(w[0]), float(w[-1])


@dataclass(frozen=True)
class DiameterCheck:
    actual: float
    bound: float                 # t*beta + 2*max_degree*t*gamma
    window_bound: float | None   # 1 + N^(-1/2+eps), paper mode only
    ok: bool
    window_ok: bool | None


def diameter_bound_check(inst: IsingInstance, params: GadgetParams | None = None) -> DiameterCheck:
    """Structured diameter against the norm-split bound, and the window bound in paper mode."""
    report = structured_spectrum(inst, params)
    deg = inst.base.max_degree
    bound = inst.t * inst.beta + 2.0 * deg * inst.t * inst.gamma
    ok = report.diameter <= bound * (1.0 + 1e-12)
    window_bound = None
    window_ok = None
    if params is not None and params.epsilon is not None:
        window_bound = 1.0 + float(report.num_sites) ** (-0.5 + params.epsilon)
        window_ok = report.diameter <= window_bound
    if not ok:
        raise ArithmeticError(
            f"spectral diameter {report.diameter} exceeds the norm bound {bound}")
    return DiameterCheck(actual=report.diameter, bound=bound,
                         window_bound=window_bound, ok=ok, window_ok=window_ok)


def psd_shift(inst_or_matrix) -> tuple[float, float]:
    """Smallest eigenvalue and the log scaling constant of the psd shift.

    Shifting J to J - lambda_min*I makes it psd with norm equal to the spectral
    diameter, and rescales the partition function:
    log Z_shifted = ln_k_shift + log Z with ln_k_shift = -lambda_min*N/2.
    Accepts a structured instance or a dense symmetric matrix.
    """
    if isinstance(inst_or_matrix, IsingInstance):
        report = structured_spectrum(inst_or_matrix)
        lam_min = report.lambda_min
        num = report.num_sites
    else:
        J = np.asarray(inst_or_matrix, dtype=float)
        lam_min, _ = dense_spectral_diameter(J)
        num = J.shape[0]
    return float(lam_min), -0.5 * lam_min * num
