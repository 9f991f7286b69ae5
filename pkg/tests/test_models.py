"""Discrete model spaces: exact structure, spectral calculus, norms."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszcert.models import (
    Field,
    FormField,
    NullspaceError,
    TruncationError,
    build_circle_model,
    build_model_from_config,
    build_ou_model,
    check_truncation,
    divergence,
    gradient,
    heat,
    inner,
    lp_norm,
    model_to_json_dict,
    ou_point_values,
    poisson,
    poisson_subordinated,
    riesz,
    structure_residuals,
    subordination_mass,
)


def test_flat_circle_eigenvalues():
    N = 64
    m = build_circle_model(N)
    h = 2 * math.pi / N
    want = np.sort(4.0 * np.sin(np.pi * np.arange(N) / N) ** 2 / h**2)
    got = np.sort(m.scalar_space.lam)
    assert np.allclose(got, want, atol=1e-9)


@pytest.mark.parametrize("N", [64, 128, 256])
@pytest.mark.parametrize("weighted", [False, True])
def test_circle_structure_exact(N, weighted):
    m = build_circle_model(N, np.cos if weighted else None)
    res = structure_residuals(m)
    assert max(res.values()) <= 1e-12


def test_ou_structure_exact():
    for d in (1, 2):
        m = build_ou_model(d, 16 if d == 2 else 32)
        res = structure_residuals(m)
        assert max(res.values()) <= 1e-12
        # form operator is degree + 1 per component
        assert np.allclose(np.diag(m.L_form), np.concatenate([np.diag(m.L_scalar) + 1] * d))


def test_heat_is_markov_on_circle():
    m = build_circle_model(64, np.cos)
    ones = Field(np.ones(64), m)
    out = heat(m, 0.7, ones)
    assert np.allclose(out.values, 1.0, atol=1e-12)
    # positivity: evolve a delta-like spike
    spike = np.zeros(64)
    spike[10] = 1.0
    assert heat(m, 0.3, Field(spike, m)).values.min() >= -1e-13


def test_poisson_single_mode_closed_form():
    m = build_circle_model(128)
    lam1 = 4.0 * math.sin(math.pi / 128) ** 2 / (2 * math.pi / 128) ** 2
    f = Field(np.cos(m.theta), m)
    a, t = 1.0, 0.8
    out = poisson(m, a, t, f)
    want = math.exp(-t * math.sqrt(a * a + lam1)) * np.cos(m.theta)
    assert np.allclose(out.values, want, atol=1e-12)


def test_subordinated_poisson_matches_spectral():
    for m in (build_circle_model(96, np.cos), build_ou_model(1, 32)):
        rng = np.random.default_rng(3)
        f = Field(rng.standard_normal(m.N), m)
        for t in (0.1, 1.0, 10.0):
            ps = poisson(m, 1.0, t, f).values
            pq = poisson_subordinated(m, 1.0, t, f).values
            scale = max(np.abs(ps).max(), 1e-300)
            assert np.abs(ps - pq).max() / scale < 1e-8


def test_ou_poisson_eigenvalue_closed_forms():
    m = build_ou_model(1, 32)
    e1 = np.zeros(32)
    e1[1] = 1.0
    out = poisson(m, 0.0, 1.0, Field(e1, m))
    assert out.values[1] == pytest.approx(math.exp(-1.0), rel=1e-14)
    e2 = np.zeros(32)
    e2[2] = 1.0
    out2 = poisson(m, 0.0, 1.0, Field(e2, m))
    assert out2.values[2] == pytest.approx(math.exp(-math.sqrt(2.0)), rel=1e-14)


def test_subordination_mass_unit():
    assert abs(subordination_mass(32) - 1.0) <= 1e-12


def test_riesz_isometry_on_mean_zero():
    # p = 2: the transform is a spectral isometry on mean-zero data
    for m in (build_circle_model(128), build_circle_model(128, np.cos)):
        rng = np.random.default_rng(7)
        f0 = rng.standard_normal(m.N)
        c = m.scalar_space.coeffs(f0)
        c[np.argmin(m.scalar_space.lam)] = 0.0
        f = Field(m.scalar_space.from_coeffs(c), m)
        w = riesz(m, 0.0, f)
        assert lp_norm(w, 2.0) == pytest.approx(lp_norm(f, 2.0), rel=1e-10)


def test_riesz_single_mode_shape():
    m = build_circle_model(256)
    f = Field(np.cos(m.theta), m)
    w = riesz(m, 0.0, f)
    # continuum: -sin at the edge midpoints, up to O(h^2)
    want = -np.sin(m.theta + m.h / 2.0)
    assert np.abs(w.values - want).max() < 5e-4


def test_riesz_nullspace_guard():
    m = build_circle_model(64)
    with pytest.raises(NullspaceError):
        riesz(m, 0.0, Field(np.ones(64), m))


def test_lp_norms_closed_forms():
    m = build_circle_model(128)
    ones = Field(np.ones(128), m)
    for p in (1.0, 2.0, 4.0):
        assert lp_norm(ones, p) == pytest.approx((2 * math.pi) ** (1 / p), rel=1e-14)
    assert lp_norm(ones, math.inf) == 1.0
    mo = build_ou_model(1, 16)
    h0 = np.zeros(16)
    h0[0] = 1.0
    assert lp_norm(Field(h0, mo), 3.0) == pytest.approx(1.0, rel=1e-14)
    h1 = np.zeros(16)
    h1[1] = 1.0
    assert lp_norm(Field(h1, mo), 2.0) == pytest.approx(1.0, rel=1e-12)


def test_inner_products_and_adjoint():
    m = build_circle_model(64, np.cos)
    rng = np.random.default_rng(0)
    f = Field(rng.standard_normal(64), m)
    w = FormField(rng.standard_normal(64), m)
    assert inner(gradient(m, f), w) == pytest.approx(inner(f, divergence(m, w)), rel=1e-12)


def test_ou_point_values_match_hermite():
    m = build_ou_model(1, 8)
    c = np.zeros(8)
    c[2] = 1.0
    vals = ou_point_values(m, c)
    x = m.quad_x
    want = (x * x - 1.0) / math.sqrt(2.0)  # normalized He_2
    assert np.allclose(vals, want, atol=1e-12)


def test_truncation_guard():
    m = build_ou_model(1, 8)
    bad = np.zeros(8)
    bad[-1] = 1.0
    with pytest.raises(TruncationError):
        check_truncation(m, Field(bad, m))


def test_field_shape_validation():
    m = build_circle_model(64)
    with pytest.raises(ValueError):
        Field(np.zeros(65), m)
    with pytest.raises(ValueError):
        FormField(np.zeros(63), m)


def test_build_from_config_and_dump():
    for cfg in (
        {"kind": "weighted_circle", "N": 32, "phi": {"type": "zero"}},
        {"kind": "weighted_circle", "N": 32, "phi": {"type": "cos", "amplitude": 0.5}},
        {"kind": "weighted_circle", "N": 16, "phi": {"type": "poly", "cos": [0.3], "sin": [0.1]}},
        {"kind": "ou_line", "K": 8},
        {"kind": "ou_tensor", "K": 6, "d": 2},
    ):
        m = build_model_from_config(cfg)
        dump = model_to_json_dict(m)
        assert dump["kind"] == cfg["kind"]
        assert len(dump["L_scalar"]) == m.N
    with pytest.raises(ValueError):
        build_model_from_config({"kind": "mystery"})


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0.01, 5.0), r=st.floats(1.0, 4.0), seed=st.integers(0, 1000))
def test_jensen_pointwise_property(t, r, seed):
    # |P_t f|^r <= P_t |f|^r: exact for the stochastic kernel
    m = build_circle_model(48, np.cos)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(48)
    lhs = np.abs(poisson(m, 1.0, t, Field(f, m)).values) ** r
    rhs = poisson(m, 1.0, t, Field(np.abs(f) ** r, m)).values
    assert (rhs - lhs).min() >= -1e-12 * max(1.0, np.abs(rhs).max())
