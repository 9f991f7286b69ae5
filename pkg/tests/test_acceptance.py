"""Acceptance suite: ten headline criteria with pinned tolerances and budgets.

Each criterion is one test that prints a single PASS/FAIL line with its
worst margin and runtime before asserting.
"""
import math
import time

import numpy as np
import pytest

from rieszcert.bellman import (
    BellmanParams,
    certify_hessian_bound,
    certify_size_bound,
)
from rieszcert.mollify import (
    MollifierSpec,
    certify_regular_properties,
    holder_product_check,
)
from rieszcert.models import (
    Field,
    FormField,
    build_circle_model,
    build_ou_model,
    poisson,
    poisson_subordinated,
    structure_residuals,
    subordination_mass,
)
from rieszcert.campaigns import random_pair
from rieszcert.verify import (
    bilinear_embedding,
    constant_audit,
    domination_refinement,
    duality_identity,
    lemma_suite,
    riesz_norm_search,
)

P_SET = (2.0, 3.0, 5.0, 10.0)


def _line(num, passed, text):
    verdict = "PASS" if passed else "FAIL"
    print(f"[criterion {num:02d}] {verdict} {text}")


@pytest.fixture(scope="module")
def flat_circle():
    return build_circle_model(128, label="flat_circle")


@pytest.fixture(scope="module")
def cos_circle():
    return build_circle_model(128, np.cos, label="cos_circle")


@pytest.fixture(scope="module")
def ou_line():
    return build_ou_model(1, 32, label="ou_line")


def test_criterion_01_size_bound():
    t0 = time.perf_counter()
    worst = math.inf
    for p in P_SET:
        res = certify_size_bound(BellmanParams.from_p(p), n_samples=100_000, seed=0)
        worst = min(worst, res.margin)
        assert res.passed, f"size bound violated at p={p}: margin={res.margin}"
    dt = time.perf_counter() - t0
    ok = worst >= -1e-12 and dt < 10.0
    _line(1, ok, f"size bound 0<=beta<=(1+delta)(u^p+v^q), worst margin={worst:.3e}, {dt:.1f}s")
    assert ok


def test_criterion_02_hessian_certification():
    t0 = time.perf_counter()
    worst = math.inf
    for p in P_SET:
        res, table = certify_hessian_bound(
            BellmanParams.from_p(p), n_samples_per_region=10_000, n_w=100, seed=0
        )
        worst = min(worst, res.margin)
        assert res.passed, f"Hessian certification failed at p={p}: margin={res.margin}"
        assert table["tau"].min() > 0.0
    dt = time.perf_counter() - t0
    ok = worst >= -1e-9 and dt < 120.0
    _line(2, ok, f"tau-certified Hessian PSD + H_Q>=2delta|w1 w2|, worst margin={worst:.3e}, {dt:.1f}s")
    assert ok


def test_criterion_03_mollified_properties():
    t0 = time.perf_counter()
    worst = math.inf
    for p in P_SET:
        params = BellmanParams.from_p(p)
        _, table = certify_hessian_bound(params, n_samples_per_region=10_000, seed=0)
        for kappa in (0.2, 0.1, 0.05):
            spec = MollifierSpec(n=1, kappa=kappa)
            rep = certify_regular_properties(spec, params, seed=0)
            assert rep.all_passed, (
                f"mollified property failed at p={p}, kappa={kappa}: "
                + "; ".join(rep.summary_lines())
            )
            worst = min(worst, min(r.margin for r in rep.rows))
            hold = holder_product_check(spec, table, seed=0)
            assert hold.passed, f"Holder product below 1-1e-6 at p={p}, kappa={kappa}"
            worst = min(worst, hold.margin)
    dt = time.perf_counter() - t0
    ok = dt < 300.0
    _line(3, ok, f"mollified (i')-(iii') + Holder product >= 1-1e-6, worst margin={worst:.3e}, {dt:.1f}s")
    assert ok


def test_criterion_04_exact_discrete_structure():
    worst = 0.0
    for N in (64, 128, 256):
        for phi in (None, np.cos):
            worst = max(worst, max(structure_residuals(build_circle_model(N, phi)).values()))
    worst = max(worst, max(structure_residuals(build_ou_model(1, 32)).values()))
    ok = worst <= 1e-12
    _line(4, ok, f"intertwining/adjointness/energy residuals, worst={worst:.3e}")
    assert ok


def test_criterion_05_subordination(cos_circle, ou_line):
    worst = 0.0
    for m in (cos_circle, ou_line):
        rng = np.random.default_rng(5)
        f = Field(rng.standard_normal(m.N), m)
        a = 1.0 if m.kind == "weighted_circle" else 0.0
        for t in (0.1, 1.0, 10.0):
            ps = poisson(m, a, t, f).values
            pq = poisson_subordinated(m, a, t, f, n_nodes=32).values
            worst = max(worst, float(np.abs(ps - pq).max() / max(np.abs(ps).max(), 1e-300)))
    mass_err = abs(subordination_mass(32) - 1.0)
    ok = worst < 1e-8 and mass_err <= 1e-12
    _line(5, ok, f"spectral vs 32-node quadrature Poisson rel err={worst:.3e}, mass err={mass_err:.3e}")
    assert ok


def test_criterion_06_semigroup_comparisons(cos_circle):
    rep = lemma_suite(cos_circle, 1.0, seed=0)
    jensen = next(r for r in rep.rows if r.check_id.startswith("lemma.jensen."))
    exact_c = jensen.margin >= 0.0
    out = domination_refinement(np.cos, 1.0, N_list=(64, 128, 256), seed=0)
    viols = [r["violation_d"] for r in out["rows"]] + [r["violation_e"] for r in out["rows"]]
    # zero violation at every level is stronger than any decay rate; otherwise
    # each observed order under N doubling must reach 0.9
    decay_ok = (max(viols) <= 1e-12) or (
        bool(out["orders_d"] + out["orders_e"])
        and min(out["orders_d"] + out["orders_e"]) >= 0.9
    )
    ok = exact_c and decay_ok
    _line(6, ok, f"Jensen gap min={jensen.margin:.3e} (exact), domination worst violation={max(viols):.3e}")
    assert ok


def test_criterion_07_duality(flat_circle, cos_circle, ou_line):
    t0 = time.perf_counter()
    f = Field(np.cos(flat_circle.theta), flat_circle)
    w = FormField(np.sin(flat_circle.theta + flat_circle.h / 2.0), flat_circle)
    lhs, _, rel_anchor = duality_identity(flat_circle, 1.0, f, w)
    anchor_ok = rel_anchor < 1e-6 and abs(abs(lhs) - math.pi / math.sqrt(2.0)) < 1e-2
    worst = 0.0
    for m in (flat_circle, cos_circle, ou_line):
        a = 1.0 if m.kind == "weighted_circle" else 0.0
        rng = np.random.default_rng(7)
        for _ in range(50):
            fr, wr = random_pair(m, rng)
            _, _, rel = duality_identity(m, a, fr, wr)
            worst = max(worst, rel)
    dt = time.perf_counter() - t0
    ok = anchor_ok and worst < 1e-5 and dt < 60.0
    _line(7, ok, f"pi/sqrt(2) anchor rel={rel_anchor:.3e}, 50-pair worst rel={worst:.3e}, {dt:.1f}s")
    assert ok


def test_criterion_08_bilinear_embedding(flat_circle, cos_circle, ou_line):
    t0 = time.perf_counter()
    worst_ratio = -math.inf
    for m in (flat_circle, cos_circle, ou_line):
        a = max(1.0, m.a_min) if m.kind == "weighted_circle" else 0.0
        for p in P_SET:
            rng = np.random.default_rng(11)
            for _ in range(50):
                fr, wr = random_pair(m, rng)
                res = bilinear_embedding(m, a, p, fr, wr)
                assert res.passed, (
                    f"embedding exceeded on {m.label}, p={p}: ratio={res.ratio}"
                )
                worst_ratio = max(worst_ratio, res.ratio)
    f = Field(np.cos(flat_circle.theta), flat_circle)
    w = FormField(np.sin(flat_circle.theta + flat_circle.h / 2.0), flat_circle)
    res = bilinear_embedding(flat_circle, 1.0, 2.0, f, w)
    worked_rel = abs(res.lhs / res.rhs_bound - 1.1529 / (3.0 * math.pi)) / (
        1.1529 / (3.0 * math.pi)
    )
    dt = time.perf_counter() - t0
    ok = worst_ratio <= 1.0 and worked_rel < 0.02 and dt < 600.0
    _line(8, ok, f"max ratio={worst_ratio:.4f} over 600 pairs, worked-example rel err={worked_rel:.3e}, {dt:.1f}s")
    assert ok


def test_criterion_09_riesz_ceiling(flat_circle, cos_circle, ou_line):
    t0 = time.perf_counter()
    worst_gap = math.inf
    for m in (flat_circle, cos_circle, ou_line):
        a = max(1.0, m.a_min) if m.kind == "weighted_circle" else 0.0
        for p in (2.0, 4.0, 8.0, 16.0):
            ceiling = 12.0 * (max(p, p / (p - 1.0)) - 1.0)
            norm, _ = riesz_norm_search(m, a, p, n_starts=3, seed=0)
            worst_gap = min(worst_gap, ceiling - norm)
            assert norm <= ceiling, f"{m.label} p={p}: {norm} > {ceiling}"
    ou_norm, _ = riesz_norm_search(ou_line, 0.0, 2.0, n_starts=3, seed=0)
    dt = time.perf_counter() - t0
    ok = worst_gap >= 0.0 and ou_norm >= 0.999 and dt < 600.0
    _line(9, ok, f"min ceiling gap={worst_gap:.3f}, p=2 isometry ascent={ou_norm:.6f}, {dt:.1f}s")
    assert ok


def test_criterion_10_constant_audit():
    rep = constant_audit(bracket_tol=1e-6)
    sup_row = next(r for r in rep.rows if r.check_id == "audit.sup_constant")
    sup = sup_row.witness["sup"]
    argmax = sup_row.witness["argmax_s"]
    ok = rep.all_passed and 2.5 < sup < 3.0
    _line(10, ok, f"sup={sup:.7f} at s={argmax:.7f}, inside (2.5, 3)")
    assert ok
