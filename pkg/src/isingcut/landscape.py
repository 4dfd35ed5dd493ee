"""Single-cloud free-energy profile and the aggregate potential over cloud biases.

Everything here is continuous analysis on real bias vectors b with |b_v| <= t/2:
the binary entropy H, the one-cloud profile Q(b) = 2*beta*b^2 + t*H(1/2 + b/t),
the aggregate potential Phi(b) = sum_v Q(b_v) - 4*gamma*sum_{uv in E} b_u b_v,
their derivatives, and box-constrained maximization of Phi over a fixed sign
pattern (one orthant per cut of the base graph).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .graphs import Graph

# below this argument the log-ratio in g_mono is evaluated by series to avoid
# cancellation; 2(1 + y^2/3 + y^4/5) has relative error < 1e-28 at y = 1e-4
G_SERIES_CUTOFF = 1e-4


def entropy(x):
    """Binary entropy -(x ln x + (1-x) ln(1-x)) in nats, with 0 ln 0 = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("entropy argument must lie in [0, 1]")
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -(xi * np.log(xi) + (1.0 - xi) * np.log1p(-xi))
    return out if out.ndim else float(out)


def g_mono(y):
    """(1/y) ln((1+y)/(1-y)), strictly increasing on (0, 1), limit 2 at 0+.

    Evaluated by series for y below G_SERIES_CUTOFF.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise ValueError("g_mono argument must lie in (0, 1)")
    small = y < G_SERIES_CUTOFF
    out = np.empty_like(y)
    ys = y[small]
    out[small] = 2.0 * (1.0 + ys * ys / 3.0 + ys**4 / 5.0)
    yl = y[~small]
    out[~small] = (np.log1p(yl) - np.log1p(-yl)) / yl
    return out if out.ndim else float(out)


def q_profile(b, t: int, beta: float):
    """Q(b) = 2*beta*b^2 + t*H(1/2 + b/t) for |b| <= t/2."""
    b = np.asarray(b, dtype=float)
    if np.any(np.abs(b) > t / 2):
        raise ValueError("bias must satisfy |b| <= t/2")
    out = 2.0 * beta * b * b + t * entropy(0.5 + b / t)
    return out if np.ndim(out) else float(out)


def q_derivative(b, t: int, beta: float):
    """dQ/db = 4*beta*b - ln((t+2b)/(t-2b)), for |b| < t/2 strictly."""
    b = np.asarray(b, dtype=float)
    if np.any(np.abs(b) >= t / 2):
        raise ValueError("derivative needs |b| < t/2 strictly")
    out = 4.0 * beta * b - (np.log1p(2.0 * b / t) - np.log1p(-2.0 * b / t))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class QScan:
    bmax: float          # argmax of Q over [0, t/2]
    interior: bool       # False when the maximum sits at the boundary b = 0
    sign_changes: int    # descending sign changes of dQ/db found on the grid


def q_maximizer_scan(t: int, beta: float, grid: float | None = None) -> QScan:
    """Locate the maximizer of Q over [0, t/2] by grid scan plus bisection.

    dQ/db vanishes at 0 and, in the supercritical case beta > 1/t, has exactly
    one descending zero in (0, t/2); bisection refines each grid sign change.
    Subcritical profiles report the boundary maximum at b = 0.
    """
    if grid is None:
        grid = t / 8192.0
    if grid <= 0:
        raise ValueError("grid step must be positive")
    eta = 1e-12 * t
    lo, hi = eta, t / 2.0 - eta
    xs = np.arange(lo, hi, grid)
    if xs.size < 2 or xs[-1] < hi:
        xs = np.append(xs, hi)
    ds = q_derivative(xs, t, beta)
    crossings = []
    for i in range(len(xs) - 1):
        if ds[i] > 0.0 >= ds[i + 1]:
            a, b = xs[i], xs[i + 1]
            for _ in range(200):
                mid = 0.5 * (a + b)
                if q_derivative(mid, t, beta) > 0.0:
                    a = mid
                else:
                    b = mid
                if b - a <= 1e-9 * t * 1e-2:
                    break
            crossings.append(0.5 * (a + b))
    candidates = [0.0] + crossings
    vals = [q_profile(c, t, beta) for c in candidates]
    k = int(np.argmax(vals))
    return QScan(bmax=candidates[k], interior=k > 0, sign_changes=len(crossings))


def phi(b, g: Graph, t: int, beta: float, gamma: float) -> float:
    """Phi(b) = sum_v Q(b_v) - 4*gamma*sum_{{u,v} in E} b_u b_v."""
    b = np.asarray(b, dtype=float)
    if b.shape != (g.n,):
        raise ValueError(f"bias vector length {b.shape} does not match n={g.n}")
    eu, ev = g.edge_arrays()
    return float(np.sum(q_profile(b, t, beta)) - 4.0 * gamma * np.sum(b[eu] * b[ev]))


def neighbor_sums(b, g: Graph) -> np.ndarray:
    """S_v = sum of b_u over neighbors u of v."""
    b = np.asarray(b, dtype=float)
    s = np.zeros(g.n)
    eu, ev = g.edge_arrays()
    np.add.at(s, eu, b[ev])
    np.add.at(s, ev, b[eu])
    return s


def phi_gradient(b, g: Graph, t: int, beta: float, gamma: float) -> np.ndarray:
    """Gradient of Phi: component v is 4*beta*b_v - 4*gamma*S_v - ln((t+2b_v)/(t-2b_v)).

    Requires every |b_v| < t/2 strictly (the log term diverges at the boundary).
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (g.n,):
        raise ValueError(f"bias vector length {b.shape} does not match n={g.n}")
    if np.any(np.abs(b) >= t / 2):
        raise ValueError("gradient needs |b_v| < t/2 strictly")
    return q_derivative(b, t, beta) - 4.0 * gamma * neighbor_sums(b, g)


@dataclass(frozen=True)
class OrthantMax:
    b: np.ndarray          # reached stationary point
    value: float           # Phi at b
    residual: float        # sup norm of the projected gradient
    converged: bool
    rounds: int
    max_abs_b: float


def _coordinate_argmax(s_v: float, a_v: int, t: int, beta: float, gamma: float,
                       eta: float, grid_points: int = 64) -> float:
    """Maximize Q(x) - 4*gamma*s_v*x over the closed signed box a_v*x in [0, t/2-eta].

    The derivative has at most two sign changes on the box; every descending
    grid crossing is refined by bisection and compared against the corner x=0.
    """
    hi = t / 2.0 - eta
    # work on the positive axis via x = a_v * u, u in [0, hi]
    drift = -4.0 * gamma * s_v * a_v

    def deriv(u):
        return q_derivative(u, t, beta) + drift

    xs = np.linspace(eta, hi, grid_points)
    ds = deriv(xs)
    crossings = []
    # sign of the derivative at the inner edge of the box decides whether 0 is a candidate
    if ds[0] > 0.0:
        prev_pos = True
    else:
        prev_pos = False
    for i in range(len(xs) - 1):
        if ds[i] > 0.0 >= ds[i + 1]:
            a, b = xs[i], xs[i + 1]
            for _ in range(120):
                mid = 0.5 * (a + b)
                if deriv(mid) > 0.0:
                    a = mid
                else:
                    b = mid
            crossings.append(0.5 * (a + b))
    candidates = [0.0] + crossings
    best_u, best_val = 0.0, q_profile(0.0, t, beta)
    for u in candidates:
        val = q_profile(u, t, beta) + drift * u
        if val > best_val + 0.0:
            best_u, best_val = u, val
    return a_v * best_u


def maximize_phi_orthant(g: Graph, t: int, beta: float, gamma: float, uhat: float,
                         signs: np.ndarray, tol_scale: float = 1e-10,
                         max_rounds: int = 500, start: np.ndarray | None = None) -> OrthantMax:
    """Coordinate ascent for Phi over the orthant {a_v b_v >= 0}, boxed away from t/2.

    Round-robin coordinate maximization until the projected gradient residual
    drops below tol_scale*t (or max_rounds is hit, reported via converged=False).
    The returned point is checked against the bias cap: max_v |b_v| <= uhat + 1e-6*t.
    """
    signs = np.asarray(signs, dtype=np.int64)
    if signs.shape != (g.n,) or np.any(np.abs(signs) != 1):
        raise ValueError("signs must be a +/-1 vector of length n")
    cap = g_mono(min(2.0 * uhat / t, 1.0 - 1e-15)) / (2.0 * t)
    if beta + g.max_degree * gamma > cap * (1.0 + 1e-9):
        raise ValueError("inconsistent parameters: beta + max_degree*gamma exceeds the "
                         "bias-cap condition g((2*uhat)/t)/(2t)")
    eta = 1e-12 * t
    if start is None:
        b = signs * min(uhat, t / 2.0 - eta) * 0.5
    else:
        b = np.asarray(start, dtype=float).copy()
        if np.any(b * signs < 0):
            raise ValueError("start point must lie in the requested orthant")
    b = b.astype(float)
    nbr = g.neighbor_lists()
    tol = tol_scale * t
    rounds = 0
    residual = math.inf
    for rounds in range(1, max_rounds + 1):
        for v in range(g.n):
            s_v = float(np.sum(b[nbr[v]])) if nbr[v].size else 0.0
            b[v] = _coordinate_argmax(s_v, int(signs[v]), t, beta, gamma, eta)
        residual = _projected_residual(b, g, t, beta, gamma, signs, eta)
        if residual < tol:
            break
    value = phi(b, g, t, beta, gamma)
    max_abs = float(np.max(np.abs(b))) if g.n else 0.0
    result = OrthantMax(b=b, value=value, residual=residual,
                        converged=residual < tol, rounds=rounds, max_abs_b=max_abs)
    if result.converged and max_abs > uhat + 1e-6 * t:
        raise ArithmeticError(
            f"converged orthant maximizer violates the bias cap: max|b|={max_abs} > "
            f"uhat + 1e-6*t = {uhat + 1e-6 * t}")
    return result


def _projected_residual(b, g, t, beta, gamma, signs, eta) -> float:
    grad = phi_gradient(np.clip(b, -t / 2 + eta, t / 2 - eta), g, t, beta, gamma)
    res = 0.0
    for v in range(g.n):
        gv = grad[v]
        if b[v] * signs[v] <= 0.0 + 1e-300 and abs(b[v]) < eta * 2:
            # at the orthant corner only ascent directions into the box count
            gv = max(gv * signs[v], 0.0)
        res = max(res, abs(gv))
    return res


def binomial_entropy_gap(t: int, b: int) -> tuple[float, float, float]:
    """Sandwich of ln C(t, t/2+b): returns (tH - ln(t+1), exact, tH).

    The exact middle value uses log-gamma; the bounds are the entropy
    approximation with and without the polynomial correction term.
    """
    if abs(b) > t // 2:
        raise ValueError("bias must satisfy |b| <= t/2")
    k = t // 2 + b
    exact = float(gammaln(t + 1) - gammaln(k + 1) - gammaln(t - k + 1))
    upper = float(t * entropy(0.5 + b / t))
    lower = upper - math.log(t + 1)
    return lower, exact, upper


def qb_expansion_check(t: int, bhat: float) -> tuple[float, float, float]:
    """Gap Q(bhat) - Q(0) versus its quartic leading term (4/3)*bhat^4/t^3.

    beta is tied to bhat via the one-cloud critical-point relation, so the gap
    is exactly the height of the free-energy bump over the balanced profile.
    Returns (exact gap, leading term, exact - leading). Requires bhat <= t/4
    (the expansion is meaningless closer to the boundary).
    """
    if bhat < 0 or bhat > t / 4:
        raise ValueError("expansion check needs 0 <= bhat <= t/4")
    if bhat == 0.0:
        return 0.0, 0.0, 0.0
    beta = g_mono(2.0 * bhat / t) / (2.0 * t)
    exact = q_profile(bhat, t, beta) - t * math.log(2.0)
    leading = (4.0 / 3.0) * bhat**4 / t**3
    return exact, leading, exact - leading
