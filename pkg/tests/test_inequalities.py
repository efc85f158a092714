import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grunbaum import inequalities as Q
from grunbaum import polytope as poly
from grunbaum.bodies import make_equality_body, make_sharpness_family
from grunbaum.core import Seed, Subspace, random_subspace, sharp_constant

TRIANGLE = poly.hull([[-1, -1], [1, -1], [0, 2]])


def cube(d, half=1.0):
    return poly.hull(half * np.array(list(itertools.product([-1, 1], repeat=d)), dtype=float))


def ball_polytope(n, m, seed):
    """Centrally symmetric polytope close to a ball."""
    U = Seed(seed).rng(0).standard_normal((m, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    P = poly.hull(np.vstack([U, -U]))
    return P


E1 = Subspace.coordinate(2, [0])
R2 = Subspace.full(2)


# -- pattern search and the translation maximum ----------------------------

def test_pattern_search_quadratic():
    A = np.vstack([np.eye(2), -np.eye(2)])
    b = np.ones(4)
    f = lambda y: -((y[0] - 0.3) ** 2 + (y[1] + 0.2) ** 2)
    y, fy, _ = Q.pattern_search(f, [0.0, 0.0], A, b, 0.5, 1e-9)
    assert np.allclose(y, [0.3, -0.2], atol=1e-8)
    # the maximiser sits on the boundary: snapping reaches it exactly
    y, _, _ = Q.pattern_search(lambda y: y[0] + 0.1 * y[1], [0.0, 0.0], A, b, 0.3, 1e-9)
    assert np.allclose(y, [1.0, 1.0], atol=1e-12)


def test_max_section_functional_ball_like_body():
    P = ball_polytope(3, 60, 1)
    E = random_subspace(3, 2, Seed(2))
    x, val, _ = Q.max_section_functional(P, E, "volume", "orth_complement")
    assert np.linalg.norm(x) <= 1e-4
    assert val.value == pytest.approx(poly.section(P, E).volume, rel=1e-9)


def test_max_section_functional_triangle_base_chord():
    x, val, trace = Q.max_section_functional(TRIANGLE, E1, "volume", "orth_complement")
    assert val.value == pytest.approx(2.0, abs=1e-9)
    assert x[1] == pytest.approx(-1.0, abs=1e-9)
    _, again, _ = Q.max_section_functional(TRIANGLE, E1, "volume", "orth_complement", cfg=Q.CheckConfig(seed=99))
    assert abs(again.value - val.value) <= 1e-6 * val.value


def test_max_section_functional_domain_errors():
    with pytest.raises(ValueError):
        Q.max_section_functional(TRIANGLE, E1, "volume", "everywhere")
    with pytest.raises(ValueError):
        Q.max_section_functional(TRIANGLE, Subspace.coordinate(3, [0]), "volume", "orth_complement")


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32), meas=st.sampled_from(["volume", "intrinsic", "dual"]))
def test_search_never_below_centre(seed, meas):
    P = poly.random_centered_polytope(3, 12, Seed(seed))
    E = random_subspace(3, 2, Seed(seed).child(1))
    cfg = Q.CheckConfig(seed=seed, directions=512, starts=4)
    rep = Q.check_centroid_section(P, E, 2 if meas == "volume" else 1, meas, cfg)
    assert rep.ratio <= 1 + 3 * rep.sigma + 1e-9
    assert rep.rhs_raw.value >= rep.lhs.value - 3 * rep.lhs.stderr - 1e-12


# -- centroid sections ------------------------------------------------------------

def test_centroid_section_triangle_equality():
    rep = Q.check_centroid_section(TRIANGLE, E1, 1, "volume")
    assert rep.lhs.value == pytest.approx(4 / 3)
    assert rep.rhs_raw.value == pytest.approx(2.0)
    assert rep.ratio == pytest.approx(2 / 3, abs=1e-6)
    assert rep.passed and rep.theorem == "centroid_section_volume"
    for meas in ("intrinsic", "dual"):
        assert Q.check_centroid_section(TRIANGLE, E1, 1, meas).ratio == pytest.approx(2 / 3, abs=1e-6)


@pytest.mark.parametrize("meas, i", [("volume", 2), ("intrinsic", 1), ("intrinsic", 2), ("dual", 1), ("dual", 2)])
def test_centroid_section_cube_is_symmetric(meas, i):
    E = random_subspace(3, 2, Seed(4))
    rep = Q.check_centroid_section(cube(3), E, i, meas, Q.CheckConfig(seed=5, directions=1024))
    assert rep.passed and rep.margin > 0
    assert rep.ratio == pytest.approx(1.0, abs=3 * rep.sigma + 1e-6)


def test_centroid_section_sharpness_family_body():
    n, i, k = 3, 1, 2
    I = np.eye(n)
    K = make_sharpness_family("thm1", n, i, 1e-3, Subspace(I[:1]), I[2])
    rep = Q.check_centroid_section(K, Subspace(I[:2]), i, "intrinsic")
    assert abs(rep.ratio - 0.5) <= 0.05 and rep.passed


def test_centroid_section_errors():
    shifted = TRIANGLE.translate([0.3, 0.0])
    with pytest.raises(ValueError):
        Q.check_centroid_section(shifted, E1, 1, "volume")
    with pytest.raises(ValueError):
        Q.check_centroid_section(TRIANGLE, E1, 2, "dual")
    with pytest.raises(ValueError):
        Q.check_centroid_section(TRIANGLE, E1, 1, "mean_width")


def test_dual_and_volume_agree_when_i_is_k():
    for seed in range(2):
        P = poly.random_centered_polytope(3, 12, Seed(seed))
        E = random_subspace(3, 2, Seed(seed).child(1))
        vol = Q.check_centroid_section(P, E, 2, "volume")
        dual = Q.check_centroid_section(P, E, 2, "dual", Q.CheckConfig(seed=seed, directions=4096, starts=8))
        assert abs(vol.ratio - dual.ratio) <= 3 * dual.sigma + 1e-9


# -- half-space checks -------------------------------------------------------------

def test_classic_triangle():
    rep = Q.check_halfspace(TRIANGLE, R2, 2, "section", "volume", [0, 1])
    assert rep.theorem == "halfspace_classic"
    assert rep.ratio == pytest.approx(4 / 9, abs=1e-9) and rep.passed
    assert Q.ratio_form(rep) == pytest.approx(4 / 5, abs=1e-9)


@pytest.mark.parametrize("mode", ["section", "projection"])
@pytest.mark.parametrize("measure, i", [("volume", 2), ("dual", 1), ("dual", 2)])
def test_halfspace_symmetric_body_is_half(mode, measure, i):
    E = random_subspace(3, 2, Seed(6))
    xi = E.embed([0.6, 0.8])
    rep = Q.check_halfspace(cube(3), E, i, mode, measure, xi)
    assert rep.ratio == pytest.approx(0.5, abs=1e-9)
    assert Q.ratio_form(rep) == pytest.approx(1.0, abs=1e-8)


def test_halfspace_symmetric_body_mc():
    E = random_subspace(4, 3, Seed(7))
    xi = E.embed([0.0, 0.6, 0.8])
    rep = Q.check_halfspace(cube(4), E, 2, "section", "dual", xi, Q.CheckConfig(seed=8, samples=50_000))
    assert abs(rep.ratio - 0.5) <= 3 * rep.sigma and rep.sigma > 0


@pytest.mark.parametrize("n, i", [(3, 1), (4, 2), (5, 2), (6, 3)])
def test_halfspace_equality_body_closed_form(n, i):
    I = np.eye(n)
    F = Subspace(I[:i])
    K = make_equality_body(n, i, 1.0, 0.8, 1.2, F, I[0])
    rep = Q.check_halfspace(K, F, i, "section", "dual", I[0])
    assert rep.ratio == pytest.approx((i / (n + 1)) ** i, abs=1e-6)
    assert rep.search == {"path": "product_cone"}
    assert Q.ratio_form(rep) == pytest.approx(i**i / ((n + 1) ** i - i**i), abs=1e-6)


def test_halfspace_errors():
    with pytest.raises(ValueError):
        Q.check_halfspace(TRIANGLE, R2, 1, "section", "volume", [0, 1])
    with pytest.raises(ValueError):
        Q.check_halfspace(TRIANGLE, E1, 1, "section", "dual", [0, 1])
    with pytest.raises(ValueError):
        Q.check_halfspace(TRIANGLE, R2, 2, "slice", "volume", [0, 1])
    with pytest.raises(ValueError):
        Q.check_halfspace(TRIANGLE, R2, 3, "section", "dual", [0, 1])


def test_ratio_form_degenerate():
    rep = Q.make_report("x", 2, 2, 2, Q.Estimate(1.0), Q.Estimate(1.0), 0.4, 1.0, 0.0)
    with pytest.raises(ValueError):
        Q.ratio_form(rep)


def test_report_pass_rule():
    c = 0.25
    ok = Q.make_report("x", 3, 2, 1, Q.Estimate(0.2), Q.Estimate(1.0), c, c - 0.029, 0.01)
    bad = Q.make_report("x", 3, 2, 1, Q.Estimate(0.2), Q.Estimate(1.0), c, c - 0.031, 0.01)
    assert ok.passed and not bad.passed
    d = ok.to_dict()
    assert d["dims"] == {"n": 3, "k": 2, "i": 1} and d["pass"] is True


# -- sections and projections onto subspaces ------------------------------------

@pytest.mark.parametrize("n, i", [(3, 1), (4, 2), (5, 2)])
@pytest.mark.parametrize("which", ["section_then_project", "project_then_section"])
def test_prop_equality_body(n, i, which):
    I = np.eye(n)
    F = Subspace(I[:i])
    K = make_equality_body(n, i, 1.0, 1.0, 1.0, F, I[0])
    rep = Q.check_prop(K, F, F, I[0], which)
    assert rep.ratio == pytest.approx((i / (n + 1)) ** i, abs=1e-9)


def test_prop_equality_polytope_generic_pipeline():
    # the planar equality body is a triangle, so the generic polytope route applies
    P = make_equality_body(2, 1, 1.0, 1.0, 1.0, E1, [1.0, 0.0]).to_polytope()
    for which in ("section_then_project", "project_then_section"):
        rep = Q.check_prop(P, R2, E1, [1.0, 0.0], which)
        assert rep.ratio == pytest.approx(1 / 3, abs=1e-9)
        assert rep.search == {}


@pytest.mark.parametrize("which", ["section_then_project", "project_then_section"])
def test_prop_cube_is_half(which):
    E = random_subspace(3, 2, Seed(11))
    F = Subspace(E.basis[:1])
    rep = Q.check_prop(cube(3), E, F, F.basis[0], which)
    assert rep.ratio == pytest.approx(0.5, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32), which=st.sampled_from(["section_then_project", "project_then_section"]))
def test_prop_random_polytopes_pass(seed, which):
    P = poly.random_centered_polytope(3, 12, Seed(seed))
    E = random_subspace(3, 2, Seed(seed).child(1))
    u = Seed(seed).child(2).rng(0).standard_normal(2)
    F = Subspace(E.embed(u / np.linalg.norm(u))[None, :])
    rep = Q.check_prop(P, E, F, F.basis[0], which)
    assert rep.passed
    assert Q.ratio_form(rep) >= sharp_constant("halfspace_ratio", 3, 1) - 1e-9


def test_prop_rejects_f_outside_e():
    with pytest.raises(ValueError):
        Q.check_prop(cube(3), Subspace.coordinate(3, [0, 1]), Subspace.coordinate(3, [2]), [0, 0, 1],
                     "section_then_project")


# -- worst direction -------------------------------------------------------------

def test_worst_direction_square():
    xi, rep = Q.worst_direction(cube(2), R2, 2, "section", "volume")
    assert rep.ratio == pytest.approx(0.5, abs=1e-12)


def test_worst_direction_triangle():
    xi, rep = Q.worst_direction(TRIANGLE, R2, 2, "section", "volume")
    assert rep.ratio == pytest.approx(4 / 9, abs=1e-9)
    assert np.allclose(xi, [0, 1], atol=1e-6)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_worst_direction_random_polygon(seed):
    P = poly.random_centered_polytope(2, 9, Seed(seed))
    _, rep = Q.worst_direction(P, R2, 2, "section", "volume")
    assert rep.ratio >= 4 / 9 - 1e-9
    grid = Q.direction_grid(2, 64, Seed(0))
    coarse = min(poly.halfspace_cut(P, poly.HalfSpace(u)).volume / P.volume for u in grid)
    assert rep.ratio <= coarse + 1e-12


def test_worst_direction_dual_in_three_dimensions():
    P = poly.random_centered_polytope(3, 12, Seed(13))
    E = Subspace.full(3)
    xi, rep = Q.worst_direction(P, E, 2, "section", "dual", Q.CheckConfig(seed=14, samples=20_000, grid=64))
    assert rep.passed and abs(np.linalg.norm(xi) - 1) < 1e-12


def test_direction_grids():
    assert Q.direction_grid(1, None, Seed(0)).shape == (2, 1)
    for k, m in [(2, 512), (3, 512), (4, 2048)]:
        G = Q.direction_grid(k, None, Seed(0))
        assert G.shape == (m, k)
        assert np.allclose(np.linalg.norm(G, axis=1), 1)
    # the Fibonacci grid is balanced
    assert np.abs(Q.direction_grid(3, None, Seed(0)).mean(axis=0)).max() < 5e-3


# -- sharpness sweeps ------------------------------------------------------------

def test_thm2_sweep_identity_at_zero():
    rows = Q.sharpness_sweep("thm2", 4, 3, 2, [1e-2, 1e-4, 1e-6], t=0.0)
    assert all(r.ratio == pytest.approx(1.0, abs=1e-12) for r in rows)


def test_thm2_sweep_limit():
    rows = Q.sharpness_sweep("thm2", 4, 3, 2, [1e-2, 1e-3, 1e-4, 1e-5, 1e-6], t=0.2)
    err = [r.error for r in rows]
    assert all(b < a for a, b in zip(err, err[1:]))
    assert rows[-1].expected_limit == pytest.approx(2.25)
    assert err[-1] <= 0.225


def test_thm1_sweep():
    rows = Q.sharpness_sweep("thm1", 3, 2, 1, [1e-1, 1e-2, 1e-3])
    assert abs(rows[-1].ratio - 0.5) <= 0.05
    assert all(b.error <= a.error for a, b in zip(rows, rows[1:]))


def test_thm1_sweep_matches_polytope_search():
    n, k, i, eps = 3, 2, 1, 1e-2
    row = Q.sharpness_sweep("thm1", n, k, i, [eps])[0]
    I = np.eye(n)
    K = make_sharpness_family("thm1", n, i, eps, Subspace(I[:i]), I[n - 1])
    rep = Q.check_centroid_section(K, Subspace(I[:k]), i, "intrinsic")
    assert rep.ratio == pytest.approx(row.ratio, abs=1e-6)


def test_thm3_sweep_trend():
    rows = Q.sharpness_sweep("thm3_section", 3, 2, 1, [1e-1, 1e-2, 1e-3])
    ratios = [r.ratio for r in rows]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert all(r >= 0.25 for r in ratios)


def test_thm3_sweep_mc_matches_quadrature():
    quad = Q.sharpness_sweep("thm3_projection", 3, 2, 1, [1e-1])[0]
    mc = Q.sharpness_sweep("thm3_projection", 3, 2, 1, [1e-1], cfg=Q.CheckConfig(seed=3, samples=200_000),
                           method="sphere_mc")[0]
    assert abs(mc.ratio - quad.ratio) <= 3 * mc.stderr


def test_sweep_errors():
    with pytest.raises(ValueError):
        Q.sharpness_sweep("thm2", 4, 3, 2, [1e-2, 1e-3], t=0.7)
    with pytest.raises(ValueError):
        Q.sharpness_sweep("thm2", 4, 3, 2, [1e-3, 1e-2], t=0.1)
    with pytest.raises(ValueError):
        Q.sharpness_sweep("thm4", 4, 3, 2, [1e-2])
    with pytest.raises(ValueError):
        Q.sharpness_sweep("thm1", 3, 3, 1, [1e-2])


# -- suites ------------------------------------------------------------------

def test_small_suite_passes_and_is_reproducible():
    cfg = Q.CheckConfig(seed=17, samples=20_000, directions=512)
    reps = Q.suite_reports(3, 2, 1, bodies=2, directions=2, cfg=cfg)
    # three centroid checks plus two modes per direction
    assert len(reps) == 2 * (3 + 2 * 2)
    assert all(r.passed for r in reps)
    again = Q.suite_reports(3, 2, 1, bodies=2, directions=2, cfg=cfg)
    assert [r.ratio for r in reps] == [r.ratio for r in again]


@pytest.mark.slow
@pytest.mark.parametrize("n, k, i", [(2, 1, 1), (3, 1, 1), (3, 2, 1), (3, 2, 2), (4, 2, 1), (4, 3, 2)])
def test_prop_suite_all_configs(n, k, i):
    from grunbaum.core import random_subspace_within

    root = Seed(1000 * n + 100 * k + i)
    for b in range(50):
        sb = root.child(b)
        P = poly.random_centered_polytope(n, 3 * n + 6, sb.child(0))
        E = random_subspace(n, k, sb.child(1))
        F = random_subspace_within(E, i, sb.child(2))
        u = sb.child(3).rng(0).standard_normal(i)
        xi = F.embed(u / np.linalg.norm(u))
        for which in ("section_then_project", "project_then_section"):
            assert Q.check_prop(P, E, F, xi, which).passed


@pytest.mark.slow
@pytest.mark.parametrize("n, k, i, bodies", [(3, 1, 1, 50), (4, 2, 1, 10)])
def test_suite_remaining_configs(n, k, i, bodies):
    cfg = Q.CheckConfig(seed=Seed(77).child(1000 * n + 100 * k + i))
    reps = Q.suite_reports(n, k, i, bodies=bodies, directions=8, cfg=cfg)
    assert all(r.passed for r in reps)
