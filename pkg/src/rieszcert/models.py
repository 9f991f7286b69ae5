"""Desk-scale weighted model spaces with exact self-adjoint spectral calculus.

Two families:

* ``weighted_circle``: N grid points on [0, 2pi) with node measure
  mu_i = exp(-phi_i) h and edge measure mu_{i+1/2} = exp(-(phi_i+phi_{i+1})/2) h.
  The scalar operator is the weighted graph Laplacian L = Dstar D and the
  1-form operator is L_form = D Dstar, so the intertwining L_form D = D L,
  the adjointness of D/Dstar and the energy identity <Lf, f> = |Df|^2 are
  matrix identities, exact to rounding.  The symmetrized scalar operator has
  nonpositive off-diagonal entries, so the heat semigroup is a stochastic
  kernel: positivity and the Jensen-type pointwise bounds hold exactly.

* ``ou_line`` / ``ou_tensor``: the Gaussian-weight operator on R^d realized
  spectrally on (tensor) Hermite modes.  Eigenvalues are total degrees, the
  derivative is the lowering band matrix D[k-1, k] = sqrt(k), and the 1-form
  operator is degree + 1 per component, which makes the intertwining exact on
  the truncated mode space.  The curvature term is identically 1, so the
  shift a = 0 is admissible.

All semigroup/Riesz applications go through stored full eigendecompositions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .quadrature import subordination_rule

MAX_DENSE_N = 2048


class TruncationError(ValueError):
    """A requested field has nonnegligible mass in the top retained mode."""


class NullspaceError(ValueError):
    """a = 0 requested with a nonzero component in the operator nullspace."""


@dataclass
class SpectralSpace:
    """Eigendecomposition of an operator self-adjoint in a weighted inner product.

    The operator acts as  x -> m_inv_half * V diag(g(lam)) V^T * (m_half * x),
    where V is orthonormal and m_* are the square roots of the measure weights.
    """

    lam: np.ndarray
    V: np.ndarray | None  # None means the operator is diagonal in coefficients
    m_half: np.ndarray | None
    measure: np.ndarray | None  # weights of the L^2 inner product on this space

    def apply(self, g: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
        if self.V is None:
            return g(self.lam) * x
        y = self.V.T @ (self.m_half * x)
        return (self.V @ (g(self.lam) * y)) / self.m_half

    def coeffs(self, x: np.ndarray) -> np.ndarray:
        if self.V is None:
            return x.copy()
        return self.V.T @ (self.m_half * x)

    def from_coeffs(self, c: np.ndarray) -> np.ndarray:
        if self.V is None:
            return c.copy()
        return (self.V @ c) / self.m_half

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        if self.measure is None:
            return float(x @ y)
        return float((x * y * self.measure).sum())


@dataclass
class ModelOperator:
    kind: str
    N: int
    a_min: float
    L_scalar: np.ndarray
    L_form: np.ndarray
    D: np.ndarray
    Dstar: np.ndarray
    scalar_space: SpectralSpace
    form_space: SpectralSpace
    # circle-specific
    h: float = 0.0
    theta: np.ndarray | None = None
    phi: np.ndarray | None = None
    measure: np.ndarray | None = None
    edge_measure: np.ndarray | None = None
    # OU-specific
    d: int = 0
    K: int = 0
    quad_x: np.ndarray | None = None
    quad_w: np.ndarray | None = None
    herm_vals: np.ndarray | None = None  # (n_quad, K) orthonormal Hermite values
    label: str = ""

    @property
    def n_form(self) -> int:
        return self.L_form.shape[0]


@dataclass
class Field:
    values: np.ndarray
    model: ModelOperator

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.model.N,):
            raise ValueError("field length does not match model dimension")


@dataclass
class FormField:
    values: np.ndarray
    model: ModelOperator

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.model.n_form,):
            raise ValueError("form length does not match form-space dimension")


# ---------------------------------------------------------------------------
# builders


def build_circle_model(
    N: int, phi_fn: Callable[[np.ndarray], np.ndarray] | None = None, label: str = ""
) -> ModelOperator:
    """Weighted circle with face-weight graph Laplacian; see module docstring."""
    if N < 8:
        raise ValueError("N must be >= 8")
    if N > MAX_DENSE_N:
        raise ValueError(f"dense eigendecomposition capped at N = {MAX_DENSE_N}")
    h = 2.0 * math.pi / N
    theta = h * np.arange(N)
    phi = np.zeros(N) if phi_fn is None else np.asarray(phi_fn(theta), dtype=float)
    if phi.shape != (N,):
        raise ValueError("phi samples must match the grid")

    mu = np.exp(-phi) * h  # node measure
    phi_next = np.roll(phi, -1)
    mu_e = np.exp(-0.5 * (phi + phi_next)) * h  # edge measure, edge i = (i, i+1)

    # forward difference, edge i joining nodes (i, i+1): (Df)_i = (f_{i+1} - f_i)/h
    D = (np.roll(np.eye(N), -1, axis=0) - np.eye(N)) / h
    Dstar = (D.T * mu_e) / mu[:, None]  # exact weighted adjoint
    L_scalar = Dstar @ D
    L_form = D @ Dstar  # intertwines exactly: L_form D = D L_scalar

    ms = np.sqrt(mu)
    me = np.sqrt(mu_e)
    Ls_sym = (L_scalar * ms[:, None]) / ms[None, :]
    Lf_sym = (L_form * me[:, None]) / me[None, :]
    lam_s, V_s = np.linalg.eigh(0.5 * (Ls_sym + Ls_sym.T))
    lam_f, V_f = np.linalg.eigh(0.5 * (Lf_sym + Lf_sym.T))
    lam_s = np.maximum(lam_s, 0.0)
    lam_f = np.maximum(lam_f, 0.0)

    # conservative Bakry-Emery lower bound: centered second difference of phi
    # minus an h * |phi'''| safety margin
    d2 = (np.roll(phi, -1) - 2.0 * phi + np.roll(phi, 1)) / h**2
    d3 = (
        np.roll(phi, -2) - 2.0 * np.roll(phi, -1) + 2.0 * np.roll(phi, 1) - np.roll(phi, 2)
    ) / (2.0 * h**3)
    ric_lb = float(d2.min() - h * np.abs(d3).max())
    a_min = math.sqrt(max(0.0, -ric_lb))

    return ModelOperator(
        kind="weighted_circle",
        N=N,
        a_min=a_min,
        L_scalar=L_scalar,
        L_form=L_form,
        D=D,
        Dstar=Dstar,
        scalar_space=SpectralSpace(lam_s, V_s, ms, mu),
        form_space=SpectralSpace(lam_f, V_f, me, mu_e),
        h=h,
        theta=theta,
        phi=phi,
        measure=mu,
        edge_measure=mu_e,
        label=label or f"circle(N={N})",
    )


def _hermite_values(x: np.ndarray, K: int) -> np.ndarray:
    """Orthonormal (probabilists') Hermite values h_k(x) = He_k(x)/sqrt(k!)."""
    out = np.empty((x.size, K))
    out[:, 0] = 1.0
    if K > 1:
        out[:, 1] = x
    for k in range(1, K - 1):
        # He_{k+1} = x He_k - k He_{k-1}; normalized recurrence
        out[:, k + 1] = (x * out[:, k] - math.sqrt(k) * out[:, k - 1]) / math.sqrt(k + 1)
    return out


def build_ou_model(d: int, K: int, n_quad: int = 0, label: str = "") -> ModelOperator:
    """Gaussian-measure model on Hermite modes; eigenvalues are total degrees."""
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if K < 4:
        raise ValueError("need at least 4 modes per axis")
    D1 = np.zeros((K, K))
    for k in range(1, K):
        D1[k - 1, k] = math.sqrt(k)
    if d == 1:
        N = K
        deg = np.arange(K, dtype=float)
        D = D1
    else:
        N = K * K
        I = np.eye(K)
        Dx = np.kron(D1, I)
        Dy = np.kron(I, D1)
        D = np.vstack([Dx, Dy])
        degs = np.arange(K, dtype=float)
        deg = (degs[:, None] + degs[None, :]).ravel()
    Dstar = D.T
    L_scalar = np.diag(deg)  # equals Dstar @ D exactly in exact arithmetic
    lam_form = np.concatenate([deg + 1.0] * d)
    L_form = np.diag(lam_form)

    n_quad = n_quad or max(4 * K, 64)
    x, w = hermegauss(n_quad)
    w = w / w.sum()  # standard normal probability weights
    H = _hermite_values(x, K)

    return ModelOperator(
        kind="ou_line" if d == 1 else "ou_tensor",
        N=N,
        a_min=0.0,  # curvature term is identically +1
        L_scalar=L_scalar,
        L_form=L_form,
        D=D,
        Dstar=Dstar,
        scalar_space=SpectralSpace(deg, None, None, None),
        form_space=SpectralSpace(lam_form, None, None, None),
        d=d,
        K=K,
        quad_x=x,
        quad_w=w,
        herm_vals=H,
        label=label or f"ou(d={d},K={K})",
    )


# ---------------------------------------------------------------------------
# pointwise evaluation helpers (OU)


def ou_point_values(model: ModelOperator, coeffs: np.ndarray) -> np.ndarray:
    """Evaluate a scalar coefficient vector on the Gauss-Hermite grid.

    Returns shape (n_quad,) for d = 1 and (n_quad, n_quad) raveled for d = 2.
    """
    H = model.herm_vals
    if model.d == 1:
        return H @ coeffs
    C = coeffs.reshape(model.K, model.K)
    return (H @ C @ H.T).ravel()


def ou_quad_weights(model: ModelOperator) -> np.ndarray:
    if model.d == 1:
        return model.quad_w
    return np.outer(model.quad_w, model.quad_w).ravel()


def check_truncation(model: ModelOperator, x: Field, trunc_tol: float = 1e-8) -> None:
    """Reject fields with significant mass in the top retained mode."""
    c = model.scalar_space.coeffs(x.values)
    if model.d == 1:
        top = abs(c[-1])
    else:
        C = c.reshape(model.K, model.K)
        top = max(np.abs(C[-1, :]).max(), np.abs(C[:, -1]).max())
    total = np.linalg.norm(c)
    if total > 0 and top > trunc_tol * total:
        raise TruncationError("field has nonzero top-mode mass beyond trunc_tol")


# ---------------------------------------------------------------------------
# spectral calculus operations


def _space_of(x) -> str:
    if isinstance(x, Field):
        return "scalar"
    if isinstance(x, FormField):
        return "form"
    raise TypeError("expected Field or FormField")


def _wrap(values: np.ndarray, model: ModelOperator, space: str):
    return Field(values, model) if space == "scalar" else FormField(values, model)


def heat(model: ModelOperator, t: float, x):
    """e^{-t L} x by spectral calculus (no shift; shifts enter via exp(-t a^2))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    space = _space_of(x)
    sp = model.scalar_space if space == "scalar" else model.form_space
    vals = sp.apply(lambda lam: np.exp(-t * lam), x.values)
    return _wrap(vals, model, space)


def poisson(model: ModelOperator, a: float, t: float, x):
    """e^{-t sqrt(a^2 + L)} x by spectral calculus."""
    if t < 0:
        raise ValueError("t must be >= 0")
    space = _space_of(x)
    sp = model.scalar_space if space == "scalar" else model.form_space
    vals = sp.apply(lambda lam: np.exp(-t * np.sqrt(a * a + lam)), x.values)
    return _wrap(vals, model, space)


def poisson_subordinated(
    model: ModelOperator, a: float, t: float, x, n_nodes: int = 32
):
    """Poisson operator via the heat-semigroup average against the measure
    (pi s)^{-1/2} e^{-s} ds; agrees with :func:`poisson` to quadrature accuracy.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    space = _space_of(x)
    sp = model.scalar_space if space == "scalar" else model.form_space
    mu = a * a + sp.lam
    s, omega = subordination_rule(t, mu, n_nodes)
    c = (t * t / 4.0) * mu
    factors = (omega * np.exp(-c[:, None] / s)).sum(axis=1)
    coeffs = sp.coeffs(x.values)
    return _wrap(sp.from_coeffs(factors * coeffs), model, space)


def subordination_mass(n_nodes: int = 32) -> float:
    """Total mass of the discretized averaging measure (should be 1)."""
    _, omega = subordination_rule(0.0, np.array([0.0]), n_nodes)
    return float(omega.sum())


def gradient(model: ModelOperator, f: Field) -> FormField:
    return FormField(model.D @ f.values, model)


def divergence(model: ModelOperator, omega: FormField) -> Field:
    return Field(model.Dstar @ omega.values, model)


def project_out_nullspace(
    model: ModelOperator, x, a: float, tol: float = 1e-10, strict: bool = True
) -> np.ndarray:
    """Component of x orthogonal to N(a^2 I + L).

    With ``strict`` a significant nullspace component raises; otherwise it is
    silently removed (used by iterative searches whose pointwise
    nonlinearities reintroduce a mean).
    """
    space = _space_of(x)
    sp = model.scalar_space if space == "scalar" else model.form_space
    c = sp.coeffs(x.values)
    null = (a * a + sp.lam) <= tol
    bad = np.linalg.norm(c[null])
    if strict and bad > tol * max(np.linalg.norm(c), 1.0):
        raise NullspaceError("field has a component in the operator nullspace")
    c = c.copy()
    c[null] = 0.0
    return sp.from_coeffs(c)


def riesz(model: ModelOperator, a: float, f: Field) -> FormField:
    """Shifted Riesz transform D (a^2 I + L)^{-1/2} f by spectral calculus.

    For a = 0 the input must be orthogonal to the nullspace of L.
    """
    sp = model.scalar_space
    if a == 0.0:
        vals = project_out_nullspace(model, f, 0.0)
    else:
        vals = f.values
    mu = a * a + sp.lam
    inv_sqrt = np.where(mu > 1e-300, 1.0 / np.sqrt(np.maximum(mu, 1e-300)), 0.0)
    g = sp.apply(lambda lam: inv_sqrt, vals)
    return FormField(model.D @ g, model)


# ---------------------------------------------------------------------------
# norms


def _weighted_lp(vals: np.ndarray, weights: np.ndarray, p: float) -> float:
    """(sum |vals|^p w)^(1/p), rescaled by the max to avoid overflow at large p."""
    vals = np.abs(vals)
    m = float(vals.max()) if vals.size else 0.0
    if m == 0.0:
        return 0.0
    return m * float((((vals / m) ** p * weights).sum()) ** (1.0 / p))


def _circle_lp(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(np.abs(values).max())
    return _weighted_lp(values, weights, p)


def lp_norm(x, p: float) -> float:
    """Weighted L^p norm; p = inf gives the max pointwise magnitude."""
    if not (p >= 1.0):
        raise ValueError("p must be in [1, inf]")
    model = x.model
    space = _space_of(x)
    if model.kind == "weighted_circle":
        w = model.measure if space == "scalar" else model.edge_measure
        return _circle_lp(x.values, w, p)
    # OU: evaluate on the Gauss-Hermite grid
    w = ou_quad_weights(model)
    if space == "scalar":
        vals = np.abs(ou_point_values(model, x.values))
    else:
        comps = x.values.reshape(model.d, -1)
        sq = np.zeros(w.size)
        for c in comps:
            sq += ou_point_values(model, c) ** 2
        vals = np.sqrt(sq)
    if p == math.inf:
        return float(vals.max())
    return _weighted_lp(vals, w, p)


def inner(x, y) -> float:
    """Weighted L^2 inner product of two fields on the same space."""
    if type(x) is not type(y) or x.model is not y.model:
        raise ValueError("mismatched spaces")
    sp = x.model.scalar_space if isinstance(x, Field) else x.model.form_space
    return sp.inner(x.values, y.values)


# ---------------------------------------------------------------------------
# structure residuals (exact identities)


def structure_residuals(model: ModelOperator) -> dict:
    """Machine-precision identities: intertwining, adjointness, energy."""
    rng = np.random.default_rng(12345)
    res = {}
    # relative to the operator scale: raw entries grow like h^-3 on fine grids
    DL = model.D @ model.L_scalar
    res["intertwining"] = float(
        np.abs(model.L_form @ model.D - DL).max() / max(np.abs(DL).max(), 1.0)
    )
    f = rng.standard_normal(model.N)
    w = rng.standard_normal(model.n_form)
    sp_s, sp_f = model.scalar_space, model.form_space
    lhs = sp_f.inner(model.D @ f, w)
    rhs = sp_s.inner(f, model.Dstar @ w)
    scale = max(abs(lhs), abs(rhs), 1.0)
    res["adjointness"] = abs(lhs - rhs) / scale
    energy_lhs = sp_s.inner(model.L_scalar @ f, f)
    energy_rhs = sp_f.inner(model.D @ f, model.D @ f)
    res["energy_identity"] = abs(energy_lhs - energy_rhs) / max(energy_rhs, 1.0)
    if model.kind == "weighted_circle":
        res["annihilates_constants"] = float(np.abs(model.L_scalar @ np.ones(model.N)).max())
    return res


# ---------------------------------------------------------------------------
# config-driven construction and JSON dump


PHI_BUILDERS = {
    "zero": lambda params: None,
    "cos": lambda params: (
        lambda th: params.get("amplitude", 1.0) * np.cos(th)
    ),
    "poly": lambda params: (
        lambda th: sum(
            a * np.cos((k + 1) * th) for k, a in enumerate(params.get("cos", []))
        )
        + sum(b * np.sin((k + 1) * th) for k, b in enumerate(params.get("sin", [])))
        + 0.0 * th
    ),
    "table": lambda params: (lambda th: np.asarray(params["values"], dtype=float)),
}


def build_model_from_config(cfg: dict) -> ModelOperator:
    kind = cfg.get("kind")
    if kind == "weighted_circle":
        phi_cfg = cfg.get("phi", {"type": "zero"})
        phi_type = phi_cfg.get("type", "zero")
        if phi_type not in PHI_BUILDERS:
            raise ValueError(f"unknown phi type {phi_type!r}")
        phi_fn = PHI_BUILDERS[phi_type](phi_cfg.get("params", phi_cfg))
        return build_circle_model(int(cfg["N"]), phi_fn, label=cfg.get("label", ""))
    if kind in ("ou_line", "ou_tensor"):
        d = int(cfg.get("d", 1 if kind == "ou_line" else 2))
        return build_ou_model(d, int(cfg["K"]), label=cfg.get("label", ""))
    raise ValueError(f"unknown model kind {kind!r}")


def model_to_json_dict(model: ModelOperator) -> dict:
    """Binary-free dump (row-major matrix arrays) for debugging."""
    out = {
        "kind": model.kind,
        "N": model.N,
        "a_min": model.a_min,
        "L_scalar": model.L_scalar.tolist(),
        "L_form": model.L_form.tolist(),
        "D": model.D.tolist(),
        "Dstar": model.Dstar.tolist(),
    }
    if model.kind == "weighted_circle":
        out["h"] = model.h
        out["phi"] = model.phi.tolist()
        out["measure"] = model.measure.tolist()
        out["edge_measure"] = model.edge_measure.tolist()
    else:
        out["d"] = model.d
        out["K"] = model.K
    return out
