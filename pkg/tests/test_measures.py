import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grunbaum import measures as M
from grunbaum import polytope as poly
from grunbaum.bodies import Ball, SectionView, dual_volume_ball_product
from grunbaum.core import Seed, Subspace, ball_volume


def box(half_widths):
    hw = np.asarray(half_widths, dtype=float)
    return poly.hull(np.array(list(itertools.product([-1, 1], repeat=len(hw)))) * hw)


def within(a: M.Estimate, b: M.Estimate, k=3.0):
    return abs(a.value - b.value) <= k * math.hypot(a.stderr, b.stderr) + 1e-12


SQUARE = box([0.5, 0.5])
DISK = Ball(2)


# -- intrinsic volumes ----------------------------------------------------------

def test_ball_intrinsic_volumes():
    assert M.ball_intrinsic_volume(2, 1) == pytest.approx(math.pi)
    assert M.ball_intrinsic_volume(3, 1) == pytest.approx(4.0)
    assert M.ball_intrinsic_volume(3, 2) == pytest.approx(2 * math.pi)
    assert M.ball_intrinsic_volume(3, 3, 2.0) == pytest.approx(8 * ball_volume(3))
    assert M.ball_intrinsic_volume(3, 4) == 0.0


def test_ball_product_matches_box():
    # [-1,1]^3 is a product of three unit 1-balls
    C = box([1, 1, 1])
    assert M.ball_product_intrinsic_volume([1, 1, 1], [1, 1, 1], 1) == pytest.approx(6.0)
    assert M.ball_product_intrinsic_volume([1, 1, 1], [1, 1, 1], 2) == pytest.approx(
        M.intrinsic_volume(C, 2).value)
    assert M.ball_product_intrinsic_volume([1, 1, 1], [1, 1, 1], 3) == pytest.approx(C.volume)
    # a disk times a segment: cylinder
    assert M.ball_product_intrinsic_volume([2, 1], [1, 1], 2) == pytest.approx(math.pi + 2 * math.pi)


def test_intrinsic_exact_examples():
    assert M.intrinsic_volume(SQUARE, 1).value == pytest.approx(2.0)
    assert M.intrinsic_volume(SQUARE, 1, "exact_2d").value == pytest.approx(2.0)
    assert M.intrinsic_volume(SQUARE, 2, "exact_2d").value == pytest.approx(1.0)
    unit_cube = box([0.5, 0.5, 0.5])
    assert M.intrinsic_volume(unit_cube, 2).value == pytest.approx(3.0)
    assert M.intrinsic_volume(unit_cube, 3).value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        M.intrinsic_volume(unit_cube, 1)
    with pytest.raises(ValueError):
        M.intrinsic_volume(SQUARE, 3)
    with pytest.raises(ValueError):
        M.intrinsic_volume(SQUARE, 1, "nonsense")


def test_intrinsic_of_points_lower_dimensional():
    seg = np.array([[0, 0, 0], [1, 2, 2]], dtype=float)
    assert M.intrinsic_of_points(seg, 1) == pytest.approx(3.0)
    assert M.intrinsic_of_points(seg, 2) == 0.0
    flat = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    assert M.intrinsic_of_points(flat, 1) == pytest.approx(2.0)
    assert M.intrinsic_of_points(flat, 2) == pytest.approx(1.0)
    assert M.intrinsic_of_points(flat, 0) == 1.0


def test_kubota_square_and_cube():
    est = M.intrinsic_volume(SQUARE, 1, "kubota_mc", samples=200_000, seed=1)
    assert abs(est.value - 2.0) <= 3 * est.stderr
    cube = box([0.5, 0.5, 0.5])
    est = M.intrinsic_volume(cube, 1, "kubota_mc", samples=200_000, seed=2)
    assert abs(est.value - 3.0) <= 3 * est.stderr
    est = M.intrinsic_volume(cube, 2, "kubota_mc", samples=4000, seed=3)
    assert abs(est.value - 3.0) <= 3 * est.stderr


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_kubota_agrees_with_exact_on_random_polygons(seed):
    P = poly.random_centered_polytope(2, 9, Seed(seed))
    exact = M.intrinsic_volume(P, 1).value
    est = M.intrinsic_volume(P, 1, "kubota_mc", samples=50_000, seed=seed)
    assert abs(est.value - exact) <= 3.5 * est.stderr


def test_intrinsic_homogeneity():
    P = poly.random_centered_polytope(3, 12, Seed(4))
    lam = 1.7
    Q = P.linear_map(lam * np.eye(3))
    for i in (2, 3):
        assert M.intrinsic_volume(Q, i).value == pytest.approx(lam**i * M.intrinsic_volume(P, i).value)
    a = M.intrinsic_volume(P, 1, "kubota_mc", samples=10_000, seed=5)
    b = M.intrinsic_volume(Q, 1, "kubota_mc", samples=10_000, seed=5)
    assert b.value == pytest.approx(lam * a.value, rel=1e-12)


# -- dual volumes ------------------------------------------------------------

def test_dual_volume_disk_all_methods():
    assert M.dual_volume(DISK, 1, "sphere_quadrature").value == pytest.approx(math.pi, abs=1e-9)
    assert M.dual_volume(DISK, 1, "sphere_mc", 10_000, seed=1).value == pytest.approx(math.pi, abs=1e-12)
    est = M.dual_volume(DISK, 1, "solid_mc", 200_000, seed=2)
    assert abs(est.value - math.pi) <= 3 * est.stderr + 1e-12
    # a generic polygon leaves mass outside its inscribed ball
    P = poly.random_centered_polytope(2, 12, Seed(5))
    est = M.dual_volume(P, 1, "solid_mc", 200_000, seed=6)
    assert est.stderr > 0
    assert abs(est.value - M.dual_volume(P, 1, "sphere_quadrature").value) <= 3 * est.stderr


def test_dual_volume_of_ball_is_ball_volume():
    for k in (2, 3, 4):
        for i in range(1, k + 1):
            est = M.dual_volume(Ball(k, 1.5), i, "sphere_mc", 1000, seed=0)
            assert est.value == pytest.approx(ball_volume(k) * 1.5**i, rel=1e-12)


def test_dual_volume_square_quadrature_closed_form():
    sq = box([1, 1])
    assert M.dual_volume(sq, 1, "sphere_quadrature").value == pytest.approx(4 * math.log(1 + math.sqrt(2)), abs=1e-12)
    assert M.dual_volume(sq, 2, "sphere_quadrature").value == pytest.approx(4.0, abs=1e-10)


def test_dual_volume_top_index_is_volume():
    P = poly.random_centered_polytope(3, 12, Seed(8))
    est = M.dual_volume(P, 3, "sphere_mc", 200_000, seed=9)
    assert abs(est.value - P.volume) <= 3 * est.stderr
    assert M.dual_volume(P, 3, "kubota_mc", seed=0).value == pytest.approx(P.volume)


def test_segment_dual_volume_is_exact():
    seg = poly.hull([[-0.4], [1.1]])
    est = M.dual_volume(seg, 1, "sphere_mc", seed=0)
    assert est.value == pytest.approx(1.5, abs=1e-15) and est.stderr == 0.0
    assert M.dual_volume(seg, 1, "sphere_quadrature").value == pytest.approx(1.5, abs=1e-15)
    half = M.dual_volume_halfspace(seg, 1, [1.0], "sphere_mc", seed=0)
    assert half.value == pytest.approx(1.1, abs=1e-15)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_dual_methods_agree_on_random_polygon(seed):
    P = poly.random_centered_polytope(2, 10, Seed(seed))
    ref = M.dual_volume(P, 1, "sphere_quadrature").value
    for method in ("sphere_mc", "kubota_mc", "solid_mc"):
        est = M.dual_volume(P, 1, method, 200_000, seed=seed)
        assert abs(est.value - ref) <= 3 * est.stderr, method


def test_dual_methods_agree_on_random_polytope():
    P = poly.random_centered_polytope(3, 12, Seed(21))
    a = M.dual_volume(P, 1, "sphere_mc", 200_000, seed=22)
    b = M.dual_volume(P, 1, "solid_mc", 200_000, seed=23)
    c = M.dual_volume(P, 2, "sphere_mc", 200_000, seed=24)
    d = M.dual_volume(P, 2, "kubota_mc", 3000, seed=25)
    assert within(a, b) and within(c, d)


def test_dual_homogeneity_and_monotonicity():
    P = poly.random_centered_polytope(2, 9, Seed(31))
    lam = 0.6
    Q = P.linear_map(lam * np.eye(2))
    for i in (1, 2):
        a = M.dual_volume(P, i, "sphere_quadrature").value
        assert M.dual_volume(Q, i, "sphere_quadrature").value == pytest.approx(lam**i * a, rel=1e-10)
        # Q sits inside P since P is star-shaped about the origin
        assert M.dual_volume(Q, i, "sphere_mc", 20_000, seed=1).value <= M.dual_volume(P, i, "sphere_mc", 20_000, seed=1).value


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_hemisphere_additivity(seed):
    P = poly.random_centered_polytope(3, 10, Seed(seed))
    xi = Seed(seed).rng(1).standard_normal(3)
    xi /= np.linalg.norm(xi)
    full = M.dual_volume(P, 2, "sphere_mc", 5000, seed=seed).value
    plus = M.dual_volume_halfspace(P, 2, xi, "sphere_mc", 5000, seed=seed).value
    minus = M.dual_volume_halfspace(P, 2, -xi, "sphere_mc", 5000, seed=seed).value
    # directions exactly orthogonal to xi have probability zero
    assert plus + minus == pytest.approx(full, rel=1e-12)
    Q = poly.random_centered_polytope(2, 8, Seed(seed))
    u = xi[:2] / np.linalg.norm(xi[:2])
    full = M.dual_volume(Q, 1, "sphere_quadrature").value
    plus = M.dual_volume_halfspace(Q, 1, u, "sphere_quadrature").value
    minus = M.dual_volume_halfspace(Q, 1, -u, "sphere_quadrature").value
    assert plus + minus == pytest.approx(full, rel=1e-9)


def test_halfspace_dual_of_ball_is_half():
    half, full, R, sR = M.dual_halfspace_ratio(Ball(3), 2, [0, 0, 1.0], "sphere_mc", 50_000, seed=4)
    assert full.value == pytest.approx(ball_volume(3))
    assert abs(R - 0.5) <= 3 * sR


def test_halfspace_dual_kubota_top_index():
    P = poly.random_centered_polytope(3, 10, Seed(41))
    xi = np.array([0.0, 0.6, 0.8])
    half = M.dual_volume_halfspace(P, 3, xi, "kubota_mc", seed=0).value
    assert half == pytest.approx(poly.halfspace_cut(P, poly.HalfSpace(xi)).volume)


def test_section_view_dual_volume():
    # a product of segments seen through the plane it spans
    P = box([1, 1, 0.5])
    view = SectionView(P, Subspace.coordinate(3, [0, 1]))
    assert M.dual_volume(view, 1, "sphere_quadrature").value == pytest.approx(
        dual_volume_ball_product(2, 1, 1.0, 1.0), abs=1e-8)


def test_dual_argument_checks():
    with pytest.raises(ValueError):
        M.dual_volume(SQUARE, 3)
    with pytest.raises(ValueError):
        M.dual_volume(SQUARE, 1, "bogus")
    with pytest.raises(ValueError):
        M.dual_volume(Ball(3), 1, "sphere_quadrature")
    with pytest.raises(ValueError):
        M.dual_volume_halfspace(SQUARE, 1, [1.0, 1.0])
    shifted = SQUARE.translate([2.0, 0.0])
    with pytest.raises(ValueError):
        M.dual_volume(shifted, 1)


def test_ratio_stats():
    den = np.linspace(1, 2, 50)
    R, s = M.ratio_stats(3 * den, den)
    assert R == pytest.approx(3.0) and s == pytest.approx(0.0, abs=1e-14)
    # delta-method error against the spread of independent replicates
    rng = Seed(7).rng(0)
    reps = []
    errs = []
    for _ in range(400):
        d = rng.uniform(1, 2, 500)
        n = d * rng.uniform(0, 1, 500)
        r, e = M.ratio_stats(n, d)
        reps.append(r)
        errs.append(e)
    assert np.mean(errs) == pytest.approx(np.std(reps, ddof=1), rel=0.15)
    with pytest.raises(ZeroDivisionError):
        M.ratio_stats(np.ones(3), np.zeros(3))


# -- Steiner identities -----------------------------------------------------------

def test_steiner_unit_square():
    est, formula = M.steiner_check_2d(SQUARE, 1.0, samples=10**6, seed=1)
    assert formula == pytest.approx(5 + math.pi)
    assert abs(est.value - formula) <= 3 * est.stderr


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 2**32), t=st.floats(0.0, 2.0))
def test_steiner_random_polygon(seed, t):
    P = poly.random_centered_polytope(2, 7, Seed(seed))
    est, formula = M.steiner_check_2d(P, t, samples=100_000, seed=seed)
    assert abs(est.value - formula) <= 3.5 * est.stderr + 1e-12


def test_dual_steiner_residual():
    P = poly.random_centered_polytope(3, 12, Seed(3))
    assert M.dual_steiner_check(P, 0.7, 10_000, seed=1) <= 1e-9
    assert M.dual_steiner_check(SQUARE, 1.0, 10_000, seed=2) <= 1e-9
    with pytest.raises(ValueError):
        M.dual_steiner_check(SQUARE, -1.0)


def test_estimate_to_dict():
    d = M.dual_volume(SQUARE, 1, "sphere_mc", 1000, seed=3).to_dict()
    assert d["samples"] == 1000 and d["method"] == "sphere_mc" and d["stderr"] > 0
