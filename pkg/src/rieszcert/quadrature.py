"""Shared quadrature rules and 1-D search utilities.

Everything here is deterministic: rules are fixed by their node counts and
the low-discrepancy sampler is fixed by its seed.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_genlaguerre
from scipy.stats import qmc

__all__ = [
    "gauss_panel",
    "log_panel_rule",
    "tensor_rule",
    "sobol_box",
    "golden_max",
    "subordination_rule",
]


def gauss_panel(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def log_panel_rule(
    t_min: float, t_max: float, panels: int, nodes_per_panel: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on log-uniform panels covering [t_min, t_max].

    Suited to smooth integrands with exponential tail decay and power-law
    behaviour near 0.
    """
    if not (0.0 < t_min < t_max):
        raise ValueError("need 0 < t_min < t_max")
    edges = np.geomspace(t_min, t_max, panels + 1)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        t, w = gauss_panel(a, b, nodes_per_panel)
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)


def tensor_rule(dim: int, nodes_per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule on [-1, 1]^dim.

    Returns points of shape (m, dim) and weights of shape (m,).
    """
    x, w = leggauss(nodes_per_axis)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    wt = np.ones(pts.shape[0])
    for g in wgrids:
        wt = wt * g.ravel()
    return pts, wt


def sobol_box(
    m: int, lo: np.ndarray, hi: np.ndarray, seed: int
) -> np.ndarray:
    """m scrambled-Sobol points in the box [lo, hi] (deterministic per seed)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    eng = qmc.Sobol(d=lo.size, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # sample counts are fixed by the caller, not always powers of 2
        warnings.simplefilter("ignore", UserWarning)
        u = eng.random(m)
    return lo + (hi - lo) * u


def golden_max(
    f,
    lo: np.ndarray,
    hi: np.ndarray,
    rel_width: float = 1e-6,
    max_iter: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized golden-section maximization of a unimodal function.

    ``f`` maps an array of abscissae to an array of values; ``lo``/``hi``
    bracket each coordinate independently.  Returns (argmax, max).
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    # return the best point ever evaluated: near a sharp crest the midpoint
    # of the final bracket can sit far below values already seen
    x_best = np.where(f1 >= f2, x1, x2)
    f_best = np.maximum(f1, f2)
    span0 = np.maximum(np.abs(hi - lo), 1.0)
    for _ in range(max_iter):
        if np.all(np.abs(hi - lo) <= rel_width * span0):
            break
        keep_left = f1 >= f2
        hi = np.where(keep_left, x2, hi)
        lo = np.where(keep_left, lo, x1)
        x1n = hi - invphi * (hi - lo)
        x2n = lo + invphi * (hi - lo)
        # re-evaluate both interior points; simple and branch-free
        x1, x2 = x1n, x2n
        f1, f2 = f(x1), f(x2)
        fi = np.maximum(f1, f2)
        xi = np.where(f1 >= f2, x1, x2)
        upd = fi > f_best
        f_best = np.where(upd, fi, f_best)
        x_best = np.where(upd, xi, x_best)
    return x_best, f_best


def subordination_rule(
    t: float, mu: np.ndarray, n_nodes: int = 32
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights discretizing the heat-to-Poisson averaging measure
    (pi*s)^(-1/2) e^(-s) ds for the exponent c = t^2 mu / 4.

    The rule is a generalized Gauss-Laguerre rule (weight s^(-1/2) e^(-s))
    applied after the saddle-symmetrizing substitution v = sqrt(s) -
    sqrt(c/s); without it the flat singularity of e^(-c/s) at s = 0 keeps a
    32-node rule stuck near 1e-2 relative error.  Weights contain only the
    measure density and the Jacobian; the e^(-c/s) heat factor is left to
    the caller.

    Returns (s, omega) of shape (len(mu), 2*n_nodes); the subordinated
    scalar is sum_j omega_j * exp(-c / s_j) per row.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    u, w = roots_genlaguerre(n_nodes, -0.5)
    c = (t * t / 4.0) * mu  # shape (k,)
    rc = np.sqrt(np.maximum(c, 0.0))[:, None]  # (k,1)
    v = np.concatenate([np.sqrt(u), -np.sqrt(u)])[None, :]  # (1,2n)
    uu = np.concatenate([u, u])[None, :]
    ww = np.concatenate([w, w])[None, :]
    # r solves v = r - rc/r, r > 0; rc = 0 rows produce 0/0 here and are
    # overwritten below, so the invalid-divide warning is suppressed
    with np.errstate(invalid="ignore", divide="ignore"):
        r = 0.5 * (v + np.sqrt(v * v + 4.0 * rc))
        s = r * r
        # dm density * ds/dv * Gauss-Laguerre reweighting e^{u - s}
        jac = r * r / (r * r + rc)
        omega = (ww / math.sqrt(math.pi)) * jac * np.exp(uu - s)
    # c == 0 rows: substitution degenerates; plain rule is exact there
    zero = c <= 0.0
    if np.any(zero):
        s = s.copy()
        omega = omega.copy()
        s[zero] = uu
        omega[zero] = 0.5 * ww / math.sqrt(math.pi)
    return s, omega
