"""Mollification of the Bellman function and certificates for the smooth variant.

The bump

    psi(x) = c * exp(-1 / (1 - |x|^2))  on the unit ball of R^(n+1)

is scaled to radius kappa and convolved with Q.  Convolutions are evaluated
by a tensor Gauss-Legendre rule over [-1, 1]^(n+1), with the rule's discrete
mass self-normalized to one; this makes the kappa -> 0 limit exact and keeps
every mollified value a convex combination of Q values.  Derivatives of the
mollified function are taken by central finite differences of the quadrature
evaluator (one code path, step h = kappa/16).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .bellman import BellmanParams, eval_beta, sample_box, sample_matching_curve, tau_search
from .quadrature import tensor_rule
from .report import CertificationReport, CheckResult


class QuadratureError(RuntimeError):
    """Refinement levels of a quadrature rule failed to agree."""


class CoverageError(ValueError):
    """A tabulated field does not cover the requested convolution support."""


def _bump(x2: np.ndarray) -> np.ndarray:
    """exp(-1/(1-|x|^2)) extended by zero outside the unit ball; x2 = |x|^2."""
    out = np.zeros_like(x2)
    inside = x2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x2[inside]))
    return out


def mollifier_constant(n: int, nodes_per_axis: int = 48, quad_tol: float = 1e-6) -> float:
    """Normalization making the radius-1 bump integrate to one over R^(n+1).

    Two tensor-rule refinement levels must agree to quad_tol.
    """
    dim = n + 1
    if dim > 4:
        raise ValueError("convolution dimension capped at 4")

    def integral(nodes):
        pts, w = tensor_rule(dim, nodes)
        return float((w * _bump((pts * pts).sum(axis=1))).sum())

    coarse = integral(nodes_per_axis)
    fine = integral(2 * nodes_per_axis)
    if abs(fine - coarse) > quad_tol * abs(fine):
        raise QuadratureError(
            f"mollifier constant did not converge: {coarse} vs {fine}"
        )
    return 1.0 / fine


@dataclass
class MollifierSpec:
    """Radius-kappa mollifier in dimension n+1 with its tensor quadrature rule."""

    n: int
    kappa: float
    nodes_per_axis: int = 32
    quad_tol: float = 1e-6
    c_norm: float = field(default=0.0)
    _pts: np.ndarray = field(default=None, repr=False)
    _wts: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not (0.0 < self.kappa < 1.0):
            raise ValueError("kappa must lie in (0, 1)")
        if self.n + 1 > 4:
            raise ValueError("convolution dimension capped at 4")
        pts, w = tensor_rule(self.n + 1, self.nodes_per_axis)
        psi = w * _bump((pts * pts).sum(axis=1))
        keep = psi > 0.0
        pts, psi = pts[keep], psi[keep]
        raw_mass = float(psi.sum())
        if self.c_norm == 0.0:
            self.c_norm = 1.0 / raw_mass
        self._pts = pts
        self._wts = psi / raw_mass  # unit discrete mass by construction

    @property
    def mass(self) -> float:
        return float(self._wts.sum())


def eval_Q_kappa(
    x: np.ndarray, spec: MollifierSpec, params: BellmanParams
) -> np.ndarray:
    """Mollified Q at points x of shape (m, n+1); returns shape (m,).

    Q_kappa(x) = sum_i w_i Q(x - kappa z_i) over the ball rule.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != spec.n + 1:
        raise ValueError("point dimension mismatch")
    shifted = x[:, None, :] - spec.kappa * spec._pts[None, :, :]  # (m, k, n+1)
    u = np.abs(shifted[:, :, 0])
    v = np.linalg.norm(shifted[:, :, 1:], axis=2)
    q = 0.5 * eval_beta(u, v, params)
    return q @ spec._wts


def beta_kappa(u, v, spec: MollifierSpec, params: BellmanParams) -> np.ndarray:
    """Mollified profile: beta_kappa(u, v) = 2 Q_kappa(u, (v, 0, ...))."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    x = np.zeros((u.size, spec.n + 1))
    x[:, 0] = u
    x[:, 1] = v
    return 2.0 * eval_Q_kappa(x, spec, params)


def fd_gradient_Q_kappa(
    x: np.ndarray, spec: MollifierSpec, params: BellmanParams, h: float | None = None
) -> np.ndarray:
    """Central-difference gradient of Q_kappa; shape (m, n+1)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    h = spec.kappa / 16.0 if h is None else h
    dim = spec.n + 1
    g = np.empty_like(x)
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = h
        g[:, j] = (
            eval_Q_kappa(x + e, spec, params) - eval_Q_kappa(x - e, spec, params)
        ) / (2.0 * h)
    return g


def fd_hessian_Q_kappa(
    x: np.ndarray, spec: MollifierSpec, params: BellmanParams, h: float | None = None
) -> np.ndarray:
    """Central-difference Hessians of Q_kappa; shape (m, n+1, n+1)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    h = spec.kappa / 16.0 if h is None else h
    m, dim = x.shape
    H = np.empty((m, dim, dim))
    f0 = eval_Q_kappa(x, spec, params)
    eye = np.eye(dim)
    for j in range(dim):
        ej = h * eye[j]
        H[:, j, j] = (
            eval_Q_kappa(x + ej, spec, params)
            - 2.0 * f0
            + eval_Q_kappa(x - ej, spec, params)
        ) / (h * h)
    for j in range(dim):
        for k in range(j + 1, dim):
            ej, ek = h * eye[j], h * eye[k]
            v = (
                eval_Q_kappa(x + ej + ek, spec, params)
                - eval_Q_kappa(x + ej - ek, spec, params)
                - eval_Q_kappa(x - ej + ek, spec, params)
                + eval_Q_kappa(x - ej - ek, spec, params)
            ) / (4.0 * h * h)
            H[:, j, k] = H[:, k, j] = v
    return H


def certify_regular_properties(
    spec: MollifierSpec,
    params: BellmanParams,
    n_samples: int = 300,
    n_boundary: int = 100,
    u_max: float = 2.0,
    v_max: float = 2.0,
    seed: int = 0,
    assert_tol: float = 1e-9,
    fd_slack: float = 1e-6,
) -> CertificationReport:
    """Certify the three properties of the mollified function (n = 1).

    (i')  0 <= beta_kappa <= (1+delta)((u+kappa)^p + (v+kappa)^q),
    (ii') a positive tau exists pointwise for the finite-difference Hessian,
          including on the matching curve where the raw function is not C^2,
    (iii') both partials of beta_kappa are nonnegative and obey the shifted
          growth bounds with a finite fitted constant.

    Finite-difference checks get an extra ``fd_slack`` on top of assert_tol.
    """
    rep = CertificationReport()
    d = params.delta
    kap = spec.kappa

    u, v = sample_box(n_samples, u_max, v_max, seed)
    ub, vb = sample_matching_curve(n_boundary, params, u_max, seed + 7)
    u = np.concatenate([u, ub])
    v = np.concatenate([v, vb])

    bk = beta_kappa(u, v, spec, params)
    ceiling = (1.0 + d) * ((u + kap) ** params.p + (v + kap) ** params.q)
    m_low = float(bk.min())
    gap = ceiling - bk
    i = int(np.argmin(gap))
    margin1 = min(m_low, float(gap[i]))
    rep.add(
        CheckResult(
            check_id=f"mollify.size_bound.p={params.p:g}.kappa={kap:g}",
            prop="0 <= beta_kappa <= (1+delta)((u+kappa)^p + (v+kappa)^q)",
            params={"p": params.p, "kappa": kap, "n_samples": int(u.size)},
            margin=margin1,
            passed=bool(margin1 >= -assert_tol),
            witness={"u": float(u[i]), "v": float(v[i])},
        )
    )

    # (ii') on zeta/eta points covering both regions and the matching curve
    pts = np.stack([u, v], axis=1)
    H = fd_hessian_Q_kappa(pts, spec, params)
    tau, lam = tau_search(H[:, 0, 0], H[:, 0, 1], H[:, 1, 1], d)
    j = int(np.argmin(lam))
    margin2 = float(lam[j])
    rep.add(
        CheckResult(
            check_id=f"mollify.hessian_bound.p={params.p:g}.kappa={kap:g}",
            prop="exists tau_kappa>0: Hess Q_kappa - delta*diag(tau, 1/tau) PSD, "
            "all points incl. matching curve",
            params={"p": params.p, "kappa": kap},
            margin=margin2,
            passed=bool(margin2 >= -(assert_tol + fd_slack)),
            witness={"u": float(u[j]), "v": float(v[j]), "tau": float(tau[j])},
        )
    )

    # (iii') partial derivative signs and shifted growth bounds
    g = 2.0 * fd_gradient_Q_kappa(pts, spec, params)  # partials of beta_kappa
    du, dv = g[:, 0], g[:, 1]
    cu = du / np.maximum((u + kap) ** (params.p - 1.0), v + kap)
    cv = dv / (v + kap) ** (params.q - 1.0)
    margin3 = float(min(du.min(), dv.min()))
    finite = bool(np.isfinite(cu).all() and np.isfinite(cv).all())
    rep.add(
        CheckResult(
            check_id=f"mollify.derivative_bounds.p={params.p:g}.kappa={kap:g}",
            prop="0 <= d_u beta_kappa <= C*max((u+kappa)^(p-1), v+kappa); "
            "0 <= d_v beta_kappa <= C*(v+kappa)^(q-1)",
            params={"p": params.p, "kappa": kap},
            margin=margin3,
            passed=bool(margin3 >= -(assert_tol + fd_slack) and finite),
            witness={"C_u": float(cu.max()), "C_v": float(cv.max())},
        )
    )
    return rep


# ---------------------------------------------------------------------------
# tau-field convolution check


def load_tau_table(path: str | Path) -> dict:
    """Read a {u, v, tau} table written by the Hessian certification."""
    u, v, tau = [], [], []
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            u.append(float(row["u"]))
            v.append(float(row["v"]))
            tau.append(float(row["tau"]))
    return {"u": np.array(u), "v": np.array(v), "tau": np.array(tau)}


def _gridded_tau(table: dict, grid_n: int = 96) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nearest-sample rasterization of a scattered tau table onto a regular grid."""
    from scipy.spatial import cKDTree

    u, v, tau = table["u"], table["v"], table["tau"]
    gu = np.linspace(u.min(), u.max(), grid_n)
    gv = np.linspace(v.min(), v.max(), grid_n)
    uu, vv = np.meshgrid(gu, gv, indexing="ij")
    tree = cKDTree(np.stack([u, v], axis=1))
    _, idx = tree.query(np.stack([uu.ravel(), vv.ravel()], axis=1))
    return gu, gv, tau[idx].reshape(grid_n, grid_n)


def holder_product_check(
    spec: MollifierSpec,
    table: dict,
    n_eval: int = 200,
    seed: int = 0,
    assert_tol: float = 1e-6,
) -> CheckResult:
    """Check (tau * psi_kappa)(xi) * (tau^{-1} * psi_kappa)(xi) >= 1.

    The product of the two convolved fields can never drop below one
    (Cauchy-Schwarz with the unit-mass kernel); equality holds only for
    constant tau.  tau comes tabulated on the (u, v) plane; evaluation
    points must sit at least kappa inside the table's coverage.
    """
    gu, gv, gt = _gridded_tau(table)
    interp_t = RegularGridInterpolator((gu, gv), gt)
    interp_it = RegularGridInterpolator((gu, gv), 1.0 / gt)

    lo = np.array([gu[0] + spec.kappa, gv[0] + spec.kappa])
    hi = np.array([gu[-1] - spec.kappa, gv[-1] - spec.kappa])
    if np.any(hi <= lo):
        raise CoverageError("tau table too small for the convolution support")
    from .quadrature import sobol_box

    xi = sobol_box(n_eval, lo, hi, seed)
    shifted = xi[:, None, :] - spec.kappa * spec._pts[None, :, :]
    conv_t = interp_t(shifted.reshape(-1, 2)).reshape(n_eval, -1) @ spec._wts
    conv_it = interp_it(shifted.reshape(-1, 2)).reshape(n_eval, -1) @ spec._wts
    prod = conv_t * conv_it
    i = int(np.argmin(prod))
    margin = float(prod[i] - 1.0)
    return CheckResult(
        check_id=f"mollify.holder_product.kappa={spec.kappa:g}",
        prop="(tau conv psi_kappa) * (1/tau conv psi_kappa) >= 1",
        params={"kappa": spec.kappa, "n_eval": n_eval},
        margin=margin,
        passed=bool(margin >= -assert_tol),
        witness={"u": float(xi[i, 0]), "v": float(xi[i, 1]), "product": float(prod[i])},
    )
