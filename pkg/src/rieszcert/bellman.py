"""Explicit two-regime Bellman function and its pointwise certificates.

The function ``beta(u, v)`` is piecewise: on the lower region (u^p <= v^q)

    beta = u^p + v^q + delta * u^2 * v^(2-q),

on the upper region (u^p >= v^q)

    beta = u^p + v^q + delta * ((2/p) u^p + (2/q - 1) v^q),

with delta = q(q-1)/8.  The two branches and their gradients agree on the
matching curve u^p = v^q, so beta is C^1; it fails to be C^2 on the singular
set {v = 0} union {u^p = v^q}.  Q(zeta, eta) = beta(|zeta|, |eta|) / 2 is the
biradial lift to R x R^n.

This module certifies, by deterministic low-discrepancy sampling:
  * the size bound 0 <= beta <= (1+delta)(u^p + v^q),
  * the Hessian lower bound H_Q(xi; w) >= delta (tau w_1^2 + w_2^2 / tau)
    for a per-point tau > 0 found by golden-section search in log tau,
  * nonnegativity and growth of the partial derivatives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .quadrature import golden_max, sobol_box
from .report import CertificationReport, CheckResult

DEFAULT_BOUNDARY_TOL = 1e-8
DEFAULT_AXIS_TOL = 1e-8


class SingularSetError(ValueError):
    """Raised when a C^2-only operation is requested on the fattened singular set."""


class DomainError(ValueError):
    """Raised on negative u or v."""


class RegionTag(Enum):
    LOWER = "lower"      # u^p < v^q strictly
    UPPER = "upper"      # u^p > v^q strictly
    BOUNDARY = "boundary"  # |u^p - v^q| within tolerance
    AXIS = "axis"        # v within tolerance of 0


@dataclass(frozen=True)
class BellmanParams:
    """Exponent pair (p, q) with the convexity gain delta = q(q-1)/8."""

    p: float
    q: float
    delta: float
    pstar: float

    @classmethod
    def from_p(cls, p: float) -> "BellmanParams":
        if not p >= 2.0:
            raise ValueError(f"p must be >= 2, got {p}")
        q = p / (p - 1.0)
        delta = q * (q - 1.0) / 8.0
        return cls(p=p, q=q, delta=delta, pstar=max(p, q))

    def __post_init__(self):
        if not (self.p >= 2.0 and 1.0 < self.q <= 2.0):
            raise ValueError("invalid exponent pair")
        if not (0.0 < self.delta <= 0.25 + 1e-15):
            raise ValueError("delta out of range")


@dataclass(frozen=True)
class BellmanPoint:
    """Argument (zeta, eta) of Q; eta is an n-vector, n >= 1."""

    zeta: float
    eta: np.ndarray

    def __post_init__(self):
        eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if eta.ndim != 1 or eta.size < 1:
            raise ValueError("eta must be a vector of length >= 1")
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.eta.size


def region_tag(
    u,
    v,
    params: BellmanParams,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
):
    """Classify points relative to the singular set (vectorized).

    Tolerances are relative: the boundary band is |u^p - v^q| <=
    boundary_tol * (u^p + v^q) and the axis band is v <= axis_tol * (1 + u).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    up = u ** params.p
    vq = v ** params.q
    scale = up + vq
    tags = np.where(up < vq, RegionTag.LOWER, RegionTag.UPPER)
    on_boundary = np.abs(up - vq) <= boundary_tol * np.maximum(scale, 1e-300)
    tags = np.where(on_boundary, RegionTag.BOUNDARY, tags)
    tags = np.where(v <= axis_tol * (1.0 + u), RegionTag.AXIS, tags)
    return tags if tags.shape else tags.item()


def _check_nonneg(u, v):
    if np.any(np.asarray(u) < 0) or np.any(np.asarray(v) < 0):
        raise DomainError("u and v must be nonnegative")


def _v_pow(v, expo):
    """v**expo with the continuous extension v**0 := 1 and 0**positive := 0."""
    v = np.asarray(v, dtype=float)
    if expo == 0.0:
        return np.ones_like(v)
    with np.errstate(divide="ignore"):
        out = np.where(v > 0.0, v ** expo, 0.0 if expo > 0 else np.inf)
    return out


def eval_beta(u, v, params: BellmanParams):
    """The Bellman profile beta(u, v); branch-selected, vectorized, NaN-free.

    On the matching curve the lower branch is used (the branches agree
    there; choosing one keeps evaluation deterministic).
    """
    _check_nonneg(u, v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    p, q, d = params.p, params.q, params.delta
    up = u ** p
    vq = v ** q
    lower = up + vq + d * u * u * _v_pow(v, 2.0 - q)
    upper = up + vq + d * ((2.0 / p) * up + (2.0 / q - 1.0) * vq)
    out = np.where(up <= vq, lower, upper)
    return out if out.shape else out.item()


def eval_Q(pt: BellmanPoint, params: BellmanParams) -> float:
    """Q(zeta, eta) = beta(|zeta|, |eta|) / 2."""
    return 0.5 * float(eval_beta(abs(pt.zeta), np.linalg.norm(pt.eta), params))


def grad_beta(u, v, params: BellmanParams):
    """Analytic partials (d_u beta, d_v beta); both nonnegative.

    Defined for u, v > 0 and by one-sided limits on the axes (the u-partial
    extends continuously to u = 0).  The branches match on u^p = v^q, so no
    boundary flagging is needed for first derivatives.
    """
    _check_nonneg(u, v)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    p, q, d = params.p, params.q, params.delta
    up = u ** p
    vq = v ** q
    low = up <= vq
    du_low = p * _v_pow(u, p - 1.0) + 2.0 * d * u * _v_pow(v, 2.0 - q)
    dv_low = q * _v_pow(v, q - 1.0) + d * (2.0 - q) * u * u * _v_pow(v, 1.0 - q)
    du_up = (p + 2.0 * d) * _v_pow(u, p - 1.0)
    dv_up = (q + d * (2.0 - q)) * _v_pow(v, q - 1.0)
    du = np.where(low, du_low, du_up)
    dv = np.where(low, dv_low, dv_up)
    if du.shape:
        return du, dv
    return du.item(), dv.item()


def beta_second_derivs(u, v, params: BellmanParams):
    """Branch-wise second derivatives (b_uu, b_uv, b_vv), vectorized.

    Only meaningful off the singular set; callers are expected to have
    filtered with :func:`region_tag`.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    p, q, d = params.p, params.q, params.delta
    up = u ** p
    vq = v ** q
    low = up <= vq
    buu_low = p * (p - 1.0) * _v_pow(u, p - 2.0) + 2.0 * d * _v_pow(v, 2.0 - q)
    buv_low = 2.0 * d * (2.0 - q) * u * _v_pow(v, 1.0 - q)
    bvv_low = q * (q - 1.0) * _v_pow(v, q - 2.0) + d * (2.0 - q) * (
        1.0 - q
    ) * u * u * _v_pow(v, -q)
    buu_up = (p + 2.0 * d) * (p - 1.0) * _v_pow(u, p - 2.0)
    buv_up = np.zeros_like(buu_up)
    bvv_up = (q + d * (2.0 - q)) * (q - 1.0) * _v_pow(v, q - 2.0)
    return (
        np.where(low, buu_low, buu_up),
        np.where(low, buv_low, buv_up),
        np.where(low, bvv_low, bvv_up),
    )


def hessian_Q(
    pt: BellmanPoint,
    params: BellmanParams,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
) -> np.ndarray:
    """Analytic Hessian of Q at pt, in coordinates (zeta, eta_1..eta_n).

    Rejects points on the fattened singular set, where Q is not C^2.
    """
    u = abs(pt.zeta)
    v = float(np.linalg.norm(pt.eta))
    tag = region_tag(u, v, params, boundary_tol, axis_tol)
    if tag in (RegionTag.BOUNDARY, RegionTag.AXIS):
        raise SingularSetError(f"point tagged {tag.value}; Hessian undefined there")
    n = pt.n
    s = math.copysign(1.0, pt.zeta) if pt.zeta != 0.0 else 0.0
    e = pt.eta / v
    bu, bv = grad_beta(u, v, params)
    buu, buv, bvv = beta_second_derivs(u, v, params)
    buu, buv, bvv = float(buu), float(buv), float(bvv)
    H = np.empty((n + 1, n + 1))
    H[0, 0] = 0.5 * buu
    H[0, 1:] = H[1:, 0] = 0.5 * buv * s * e
    H[1:, 1:] = 0.5 * (
        bvv * np.outer(e, e) + (bv / v) * (np.eye(n) - np.outer(e, e))
    )
    return H


def hessian_entries(u, v, params: BellmanParams):
    """Stacked 2x2 Hessians of Q for n = 1 at (zeta, eta) = (u, v), u, v > 0.

    Returns (A, B, C) with H = [[A, B], [B, C]]; vectorized over samples.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    buu, buv, bvv = beta_second_derivs(u, v, params)
    return 0.5 * buu, 0.5 * buv, 0.5 * bvv


# ---------------------------------------------------------------------------
# samplers


def sample_box(m: int, u_max: float, v_max: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    pts = sobol_box(m, np.array([0.0, 0.0]), np.array([u_max, v_max]), seed)
    return pts[:, 0], pts[:, 1]


def sample_region(
    m: int,
    region: RegionTag,
    params: BellmanParams,
    u_max: float,
    v_max: float,
    seed: int,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
    axis_tol: float = DEFAULT_AXIS_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """m low-discrepancy points carrying the requested tag (LOWER or UPPER)."""
    us, vs = [], []
    got = 0
    batch_seed = seed
    while got < m:
        u, v = sample_box(2 * m, u_max, v_max, batch_seed)
        tags = region_tag(u, v, params, boundary_tol, axis_tol)
        keep = tags == region
        us.append(u[keep])
        vs.append(v[keep])
        got += int(keep.sum())
        batch_seed += 1
    return np.concatenate(us)[:m], np.concatenate(vs)[:m]


def sample_matching_curve(
    m: int, params: BellmanParams, u_max: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Points on the matching curve v = u^(p/q), parametrized by u."""
    u = sobol_box(m, np.array([1e-6]), np.array([u_max]), seed)[:, 0]
    return u, u ** (params.p / params.q)


# ---------------------------------------------------------------------------
# tau search


def tau_search(
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    delta: float,
    log_tau_bracket: tuple[float, float] = (-40.0, 40.0),
    rel_width: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point tau > 0 maximizing the smallest eigenvalue of
    [[A - delta*tau, B], [B, C - delta/tau]].

    Returns (tau, lambda_min_at_tau); certification holds where the second
    output is >= -assert_tol.  Golden-section in log tau on the given
    bracket.
    """

    def lam_min(log_tau):
        tau = np.exp(log_tau)
        a = A - delta * tau
        c = C - delta / tau
        half = 0.5 * (a + c)
        return half - np.sqrt(0.25 * (a - c) ** 2 + B * B)

    lo = np.full(A.shape, log_tau_bracket[0])
    hi = np.full(A.shape, log_tau_bracket[1])
    # coarse pre-bracketing keeps golden-section on the unimodal hump
    grid = np.linspace(log_tau_bracket[0], log_tau_bracket[1], 81)
    vals = np.stack([lam_min(np.full(A.shape, g)) for g in grid])
    best = np.argmax(vals, axis=0)
    step = grid[1] - grid[0]
    lo = grid[best] - step
    hi = grid[best] + step
    log_tau, lam = golden_max(lam_min, lo, hi, rel_width=rel_width)
    return np.exp(log_tau), lam


def tau_search_matrices(
    hessians: np.ndarray,
    delta: float,
    log_tau_bracket: tuple[float, float] = (-40.0, 40.0),
    rel_width: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """General-n variant: hessians has shape (m, n+1, n+1)."""
    m, k, _ = hessians.shape
    n = k - 1

    def lam_min(log_tau):
        tau = np.exp(log_tau)
        shift = np.zeros((m, k, k))
        shift[:, 0, 0] = delta * tau
        idx = np.arange(1, k)
        shift[:, idx, idx] = (delta / tau)[:, None]
        return np.linalg.eigvalsh(hessians - shift)[:, 0]

    grid = np.linspace(log_tau_bracket[0], log_tau_bracket[1], 81)
    vals = np.stack([lam_min(np.full(m, g)) for g in grid])
    best = np.argmax(vals, axis=0)
    step = grid[1] - grid[0]
    log_tau, lam = golden_max(
        lam_min, grid[best] - step, grid[best] + step, rel_width=rel_width
    )
    return np.exp(log_tau), lam


# ---------------------------------------------------------------------------
# certificates


def certify_size_bound(
    params: BellmanParams,
    n_samples: int = 100_000,
    u_max: float = 4.0,
    v_max: float = 4.0,
    seed: int = 0,
    assert_tol: float = 1e-12,
) -> CheckResult:
    """0 <= beta <= (1+delta)(u^p + v^q) on a low-discrepancy box sample."""
    u, v = sample_box(n_samples, u_max, v_max, seed)
    b = eval_beta(u, v, params)
    upper = (1.0 + params.delta) * (u ** params.p + v ** params.q)
    lower_margin = b.min()
    gap = upper - b
    i = int(np.argmin(gap))
    margin = min(float(lower_margin), float(gap[i]))
    return CheckResult(
        check_id=f"bellman.size_bound.p={params.p:g}",
        prop="0 <= beta(u,v) <= (1+delta)(u^p + v^q)",
        params={"p": params.p, "n_samples": n_samples, "box": [u_max, v_max]},
        margin=margin,
        passed=bool(margin >= -assert_tol),
        witness={"u": float(u[i]), "v": float(v[i]), "upper_gap": float(gap[i])},
        details={"min_beta": float(lower_margin), "min_upper_gap": float(gap[i])},
    )


def certify_hessian_bound(
    params: BellmanParams,
    n_samples_per_region: int = 10_000,
    n_w: int = 100,
    u_max: float = 4.0,
    v_max: float = 4.0,
    seed: int = 0,
    assert_tol: float = 1e-9,
    log_tau_bracket: tuple[float, float] = (-40.0, 40.0),
) -> tuple[CheckResult, dict]:
    """Certify H_Q >= delta*(tau w1^2 + w2^2/tau) off the singular set (n = 1).

    Also spot-checks the weaker consequence H_Q(xi; w) >= 2 delta |w1||w2|
    on random directions.  Returns the result row and the tau table
    {u, v, tau} for downstream convolution checks.
    """
    rng = np.random.default_rng(seed)
    us, vs = [], []
    for k, region in enumerate((RegionTag.LOWER, RegionTag.UPPER)):
        u, v = sample_region(
            n_samples_per_region, region, params, u_max, v_max, seed + 101 * k
        )
        us.append(u)
        vs.append(v)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    A, B, C = hessian_entries(u, v, params)
    tau, lam = tau_search(A, B, C, params.delta, log_tau_bracket)
    i = int(np.argmin(lam))
    psd_margin = float(lam[i])

    # weaker consequence on random w
    w = rng.standard_normal((n_w, 2))
    quad = (
        A[:, None] * w[None, :, 0] ** 2
        + 2.0 * B[:, None] * w[None, :, 0] * w[None, :, 1]
        + C[:, None] * w[None, :, 1] ** 2
    )
    bound = 2.0 * params.delta * np.abs(w[None, :, 0] * w[None, :, 1])
    wmargin = float((quad - bound).min())

    margin = min(psd_margin, wmargin)
    res = CheckResult(
        check_id=f"bellman.hessian_bound.p={params.p:g}",
        prop="exists tau>0: Hess Q - delta*diag(tau, 1/tau) is PSD; "
        "H_Q(xi;w) >= 2 delta |w1||w2|",
        params={
            "p": params.p,
            "n_samples_per_region": n_samples_per_region,
            "n_w": n_w,
        },
        margin=margin,
        passed=bool(margin >= -assert_tol),
        witness={
            "u": float(u[i]),
            "v": float(v[i]),
            "tau": float(tau[i]),
            "lambda_min": psd_margin,
        },
        details={"psd_margin": psd_margin, "w_margin": wmargin},
    )
    table = {"u": u, "v": v, "tau": tau}
    return res, table


def certify_derivative_bounds(
    params: BellmanParams,
    n_samples: int = 20_000,
    u_max: float = 4.0,
    v_max: float = 4.0,
    seed: int = 0,
    fit_tol: float = 0.05,
) -> CheckResult:
    """Nonnegativity of both partials plus refinement-stable growth constants.

    The growth constants C_u = sup d_u beta / max(u^(p-1), v) and
    C_v = sup d_v beta / v^(q-1) are empirical; PASS requires the suprema to
    move by less than a factor 1 + fit_tol when the sample is doubled.
    """

    def fit(m, s):
        u, v = sample_box(m, u_max, v_max, s)
        keep = (u > 1e-9) & (v > 1e-9)
        u, v = u[keep], v[keep]
        du, dv = grad_beta(u, v, params)
        cu = du / np.maximum(u ** (params.p - 1.0), v)
        cv = dv / v ** (params.q - 1.0)
        return float(du.min()), float(dv.min()), float(cu.max()), float(cv.max())

    dmin1, dmin2, cu1, cv1 = fit(n_samples, seed)
    dmin1b, dmin2b, cu2, cv2 = fit(2 * n_samples, seed)
    sign_margin = min(dmin1, dmin2, dmin1b, dmin2b)
    stable = (
        math.isfinite(cu2)
        and math.isfinite(cv2)
        and cu2 / cu1 < 1.0 + fit_tol
        and cv2 / cv1 < 1.0 + fit_tol
    )
    return CheckResult(
        check_id=f"bellman.derivative_bounds.p={params.p:g}",
        prop="0 <= d_u beta <= C*max(u^(p-1), v); 0 <= d_v beta <= C*v^(q-1)",
        params={"p": params.p, "n_samples": n_samples},
        margin=sign_margin,
        passed=bool(sign_margin >= 0.0 and stable),
        witness={"C_u": cu2, "C_v": cv2},
        details={
            "C_u_coarse": cu1,
            "C_u_fine": cu2,
            "C_v_coarse": cv1,
            "C_v_fine": cv2,
        },
    )


def certify_all(
    params: BellmanParams, seed: int = 0, **kwargs
) -> tuple[CertificationReport, dict]:
    rep = CertificationReport()
    rep.add(certify_size_bound(params, seed=seed))
    hess, table = certify_hessian_bound(params, seed=seed)
    rep.add(hess)
    rep.add(certify_derivative_bounds(params, seed=seed))
    return rep, table
