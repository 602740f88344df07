"""Quadrature moments, variances, and squeezing optimization.

Variances follow the vacuum-1/2 convention.  Because displacement is a
Gaussian operation it never changes the variances, so the parameter-space
scans evaluate the bare superposition coefficients only; the moment
routine itself keeps the displacement so that first moments come out
right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import dq
from .errors import IndexOutOfRange

__all__ = [
    "QuadratureReport",
    "OptimumRecord",
    "Table2Row",
    "moment",
    "quadratures",
    "variance_of_coeffs",
    "variance_x_map",
    "optimize_cm_squeezing",
    "optimize_fock_superposition",
    "table1",
    "table2",
    "n1_optimal_alpha_sq",
    "m0_locus_variance",
]

MAX_MOMENT_ORDER = 4


@dataclass(frozen=True)
class QuadratureReport:
    var_x: float
    var_p: float
    mean_x: float
    mean_p: float
    min_var: float


@dataclass(frozen=True)
class OptimumRecord:
    """Best squeezing found for one (n, m) heralding cell."""

    n: int
    m: int
    min_var: float
    alpha_sq: float
    R: float
    boundary_hit: bool = False


@dataclass(frozen=True)
class Table2Row:
    n: int
    dq_min_var: float
    fock_min_var: float
    difference: float


def moment(state: dq.DQState, l: int, s: int) -> complex:
    """Normally ordered moment <a^dag^l a^s> of a displaced qudit.

    Evaluated by binomially splitting the displacement off the bare
    superposition; coefficient indices that fall outside 0..n contribute
    nothing.  Orders above l + s = 4 are not supported.
    """
    if l < 0 or s < 0:
        raise ValueError("moment orders must be non-negative")
    if l + s > MAX_MOMENT_ORDER:
        raise IndexOutOfRange(f"moment order l+s={l + s} exceeds {MAX_MOMENT_ORDER}")
    A = state.coeffs
    n = A.size - 1
    beta = complex(state.displacement)
    beta_c = np.conj(beta)
    total = 0j
    for q in range(n + 1):
        for u in range(l + 1):
            for v in range(s + 1):
                if q - v < 0:
                    continue
                j = q - v + u
                if j < 0 or j > n:
                    continue
                total += (
                    A[q]
                    * np.conj(A[j])
                    * math.comb(l, u)
                    * math.comb(s, v)
                    * beta_c ** (l - u)
                    * beta ** (s - v)
                    * math.sqrt(math.factorial(q) * math.factorial(j))
                    / math.factorial(q - v)
                )
    return complex(total)


def quadratures(state: dq.DQState) -> QuadratureReport:
    """Means and variances of X and P."""
    a1 = moment(state, 0, 1)
    a2 = moment(state, 0, 2)
    n1 = moment(state, 1, 1).real
    central = (a2 - a1 * a1).real
    spread = n1 - abs(a1) ** 2
    var_x = central + spread + 0.5
    var_p = -central + spread + 0.5
    mean_x = math.sqrt(2.0) * a1.real
    mean_p = math.sqrt(2.0) * a1.imag
    return QuadratureReport(var_x, var_p, mean_x, mean_p, min(var_x, var_p))


def variance_of_coeffs(coeffs: np.ndarray) -> float:
    """X-quadrature variance of a real, unit-norm superposition sum c_q |q>."""
    c = np.asarray(coeffs, dtype=float)
    q = np.arange(c.size)
    m1 = float(np.sum(c[:-1] * c[1:] * np.sqrt(q[1:]))) if c.size > 1 else 0.0
    m2 = (
        float(np.sum(c[:-2] * c[2:] * np.sqrt((q[1:-1]) * (q[1:-1] + 1.0))))
        if c.size > 2
        else 0.0
    )
    nbar = float(np.sum(q * c * c))
    return 0.5 + m2 + nbar - 2.0 * m1 * m1


def variance_x_map(n: int, m: int, alpha_sq, R) -> np.ndarray:
    """X-quadrature variance of the heralded qudit over broadcast real grids.

    Cells where every coefficient vanishes (only alpha = 0 with m > n)
    come back as NaN.
    """
    alpha_sq_b, R_b = np.broadcast_arrays(np.asarray(alpha_sq, float), np.asarray(R, float))
    c = dq.coefficients_grid(n, m, np.sqrt(alpha_sq_b), R_b)
    s = np.sum(c * c, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(s > 0, c / np.sqrt(s), np.nan)
    m1 = np.zeros(s.shape)
    m2 = np.zeros(s.shape)
    nbar = np.zeros(s.shape)
    for qi in range(n + 1):
        nbar = nbar + qi * c[qi] * c[qi]
        if qi + 1 <= n:
            m1 = m1 + c[qi] * c[qi + 1] * math.sqrt(qi + 1)
        if qi + 2 <= n:
            m2 = m2 + c[qi] * c[qi + 2] * math.sqrt((qi + 1) * (qi + 2))
    return 0.5 + m2 + nbar - 2.0 * m1 * m1


def optimize_cm_squeezing(
    n: int,
    m: int,
    alpha_sq_range: tuple[float, float] = (0.05, 30.0),
    R_range: tuple[float, float] = (0.01, 0.99),
    alpha_sq_step: float = 0.05,
    R_step: float = 0.0025,
) -> OptimumRecord:
    """Global minimum of the X variance over the (|alpha|^2, R) box.

    Coarse grid scan at the stated steps, then a Nelder-Mead refinement
    started from the best cell.  Box-boundary hits are flagged, not
    rejected.
    """
    a_lo, a_hi = alpha_sq_range
    r_lo, r_hi = R_range
    a_vals = np.arange(a_lo, a_hi + alpha_sq_step / 2, alpha_sq_step)
    r_vals = np.arange(r_lo, r_hi + R_step / 2, R_step)
    V = variance_x_map(n, m, a_vals[:, None], r_vals[None, :])
    flat = np.nanargmin(V)
    ia, ir = np.unravel_index(flat, V.shape)
    coarse_min = float(V[ia, ir])

    def objective(p):
        a, r = p
        if not (a_lo <= a <= a_hi and r_lo <= r <= r_hi):
            return 1e6
        return float(variance_x_map(n, m, a, r))

    res = minimize(
        objective,
        x0=np.array([a_vals[ia], r_vals[ir]]),
        method="Nelder-Mead",
        options={"xatol": 1e-6, "fatol": 1e-9, "maxiter": 4000},
    )
    best_a, best_r = (float(res.x[0]), float(res.x[1]))
    best_v = float(res.fun)
    if best_v > coarse_min:
        best_a, best_r, best_v = float(a_vals[ia]), float(r_vals[ir]), coarse_min
    boundary = (
        best_a - a_lo < alpha_sq_step
        or a_hi - best_a < alpha_sq_step
        or best_r - r_lo < R_step
        or r_hi - best_r < R_step
    )
    return OptimumRecord(n, m, best_v, best_a, best_r, boundary)


def _shifted_quadrature_start(n: int) -> np.ndarray:
    """Deterministic seed vector for the superposition optimizer.

    For unit vectors c on span{|0>..|n>},  min_c var_x(c) equals
    min_t lambda_min(P (X - t)^2 P), so the minimizing eigenvector is the
    exact optimum; it is recovered here by a scan-and-refine over t.
    """
    pad = n + 3
    diag = np.sqrt(np.arange(1.0, pad))
    x = (np.diag(diag, 1) + np.diag(diag, -1)) / math.sqrt(2.0)
    x2 = (x @ x)[: n + 1, : n + 1]
    x1 = x[: n + 1, : n + 1]
    eye = np.eye(n + 1)

    def lam(t: float) -> float:
        return float(np.linalg.eigvalsh(x2 - 2.0 * t * x1 + t * t * eye)[0])

    ts = np.linspace(-4.0, 4.0, 1601)
    t_best = ts[int(np.argmin([lam(t) for t in ts]))]
    for step in (5e-3, 5e-4, 5e-5, 5e-6):
        cand = t_best + np.linspace(-10 * step, 10 * step, 21)
        t_best = cand[int(np.argmin([lam(t) for t in cand]))]
    _, vecs = np.linalg.eigh(x2 - 2.0 * t_best * x1 + t_best * t_best * eye)
    return vecs[:, 0]


def optimize_fock_superposition(
    n: int, starts: int = 60, seed: int = 20240809
) -> tuple[float, np.ndarray]:
    """Minimal X variance over real unit-norm superpositions of |0>..|n>.

    Multi-start Nelder-Mead on the coefficient vector (normalized inside
    the objective), with one deterministic start from the shifted
    quadrature-square eigenproblem.  Returns the best variance and the
    coefficients with a canonical overall sign.
    """
    if n < 1:
        raise ValueError("need at least two superposed levels")
    rng = np.random.default_rng(seed)

    def objective(c):
        norm = np.linalg.norm(c)
        if norm < 1e-12:
            return 1e6
        return variance_of_coeffs(c / norm)

    best_val = np.inf
    best_c = None
    start_vectors = [_shifted_quadrature_start(n)]
    start_vectors += [rng.standard_normal(n + 1) for _ in range(starts)]
    for x0 in start_vectors:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 20000, "maxfev": 20000},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_c = res.x / np.linalg.norm(res.x)
    lead = np.argmax(np.abs(best_c))
    if best_c[lead] < 0:
        best_c = -best_c
    return best_val, best_c


def table1(n_max: int = 4, m_max: int = 4, **kwargs) -> list[OptimumRecord]:
    """Optimal squeezing for every heralding cell n = 1..n_max, m = 0..m_max."""
    records = []
    for n in range(1, n_max + 1):
        for m in range(0, m_max + 1):
            records.append(optimize_cm_squeezing(n, m, **kwargs))
    return records


def table2(n_max: int = 6) -> list[Table2Row]:
    """Single-photon-herald optima against the unconstrained superposition optima."""
    rows = []
    for n in range(1, n_max + 1):
        rec = optimize_cm_squeezing(n, 1)
        fock_val, _ = optimize_fock_superposition(n)
        rows.append(Table2Row(n, rec.min_var, fock_val, rec.min_var - fock_val))
    return rows


# Analytic loci of maximal squeezing for single-photon input (n = 1).  For
# detection m >= 1 the optimum lies where |alpha|^2 equals
# (1/4R) [sqrt(3) +/- sqrt((3 + c_m R)/(1 - R))]^2 with the slopes below;
# for vacuum detection (m = 0) it lies on |alpha|^2 R = 3.
_N1_SLOPES = {1: 1.0, 2: 5.0, 3: 9.0, 4: 11.0}


def n1_optimal_alpha_sq(m: int, R: float) -> tuple[float, float]:
    """Both branches of the n = 1 optimal-squeezing locus at fixed R."""
    if m == 0:
        val = 3.0 / R
        return val, val
    if m not in _N1_SLOPES:
        raise ValueError(f"no tabulated locus for m={m}")
    if not 0.0 < R < 1.0:
        raise ValueError("R must lie strictly inside (0, 1)")
    d = math.sqrt((3.0 + _N1_SLOPES[m] * R) / (1.0 - R))
    s3 = math.sqrt(3.0)
    return (s3 + d) ** 2 / (4.0 * R), (s3 - d) ** 2 / (4.0 * R)


def m0_locus_variance(n: int, R: float = 0.5) -> float:
    """Variance on the vacuum-detection locus |alpha|^2 R = 3.

    The m = 0 coefficients depend on (alpha, R) only through alpha sqrt(R),
    so the value is independent of the R chosen here.
    """
    return float(variance_x_map(n, 0, 3.0 / R, R))
