"""Intrinsic and dual volumes by Kubota-type Monte Carlo or radial integrals, plus Steiner checks.

Bodies are handled in their own coordinates (dimension k = ``body.ambient_dim``).
A body only needs ``radial(U)`` for the sphere estimators and ``member(X)`` plus
``bounding_box()`` for the solid estimator; polytopes additionally support the
section-based dual Kubota route and exact intrinsic volumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Seed,
    Subspace,
    as_seed,
    ball_volume,
    integrate,
    random_directions,
    random_frames,
    sphere_area,
)
from . import polytope as poly
from .bodies import Ball

BLOCK = 1 << 16

INTRINSIC_METHODS = ("exact", "exact_2d", "kubota_mc")
DUAL_METHODS = ("sphere_mc", "sphere_quadrature", "kubota_mc", "solid_mc")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    samples: int = 0
    method: str = "exact"
    seed: Seed | None = None

    def __post_init__(self):
        if not self.stderr >= 0:
            raise ValueError("stderr must be non-negative")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "method": self.method,
            "seed": None if self.seed is None else self.seed.to_dict(),
        }


def _blocks(total: int):
    start = 0
    index = 0
    while start < total:
        size = min(BLOCK, total - start)
        yield index, size
        start += size
        index += 1


def _mean_err(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    if n == 0:
        return 0.0, 0.0
    m = float(np.mean(x))
    s = float(np.std(x, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return m, s


# ---------------------------------------------------------------------------
# intrinsic volumes

def ball_intrinsic_volume(d: int, i: int, r: float = 1.0) -> float:
    """V_i of ``r B^d``."""
    if i < 0 or i > d:
        return 0.0
    return math.comb(d, i) * ball_volume(d) / ball_volume(d - i) * r ** i


def ball_product_intrinsic_volume(dims, radii, i: int) -> float:
    """V_i of a Cartesian product of balls, from V_j(A x B) = sum V_a(A) V_{j-a}(B)."""
    coeffs = np.array([1.0])
    for d, r in zip(dims, radii):
        factor = np.array([ball_intrinsic_volume(d, a, r) if (d > 0 and r > 0) or a == 0 else 0.0
                           for a in range(d + 1)])
        coeffs = np.convolve(coeffs, factor)
    return float(coeffs[i]) if i < len(coeffs) else 0.0


def kubota_constant(k: int, i: int) -> float:
    return ball_volume(k) / (ball_volume(i) * ball_volume(k - i)) * math.comb(k, i)


def _exact_intrinsic(P: poly.Polytope, i: int) -> float:
    k = P.ambient_dim
    if i == k:
        return P.volume
    if i == k - 1:
        return 0.5 * P.surface_area
    raise ValueError(f"no exact route for V_{i} of a {k}-polytope; use kubota_mc")


def intrinsic_of_points(points: np.ndarray, i: int) -> float:
    """Exact V_i of the convex hull of ``points`` (any affine dimension)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return 0.0
    if i == 0:
        return 1.0
    c = pts.mean(axis=0)
    X = pts - c
    scale = max(1.0, float(np.abs(pts).max()))
    _, s, vt = np.linalg.svd(X, full_matrices=False)
    r = int(np.sum(s > poly.TOL * scale))
    if r < i:
        return 0.0
    Y = X @ vt[:r].T
    if r == 1:
        return float(Y.max() - Y.min())
    return _exact_intrinsic(poly.hull(poly._unique_rows(Y)), i)


def intrinsic_volume(body, i: int, method: str = "exact", samples: int = 100_000,
                     seed: Seed | int | None = None) -> Estimate:
    """i-th intrinsic volume of a polytope given in its own k-dimensional coordinates."""
    if not isinstance(body, poly.Polytope):
        raise TypeError("intrinsic volumes are computed for polytopes")
    k = body.ambient_dim
    if not (1 <= i <= k):
        raise ValueError(f"need 1 <= i <= k = {k}, got i={i}")
    if method == "exact_2d":
        if k != 2:
            raise ValueError("exact_2d needs a planar body")
        return Estimate([1.0, 0.5 * body.surface_area, body.volume][i], 0.0, 0, "exact_2d")
    if method == "exact":
        return Estimate(_exact_intrinsic(body, i), 0.0, 0, "exact")
    if method != "kubota_mc":
        raise ValueError(f"unknown intrinsic-volume method {method!r}")
    seed = as_seed(seed)
    const = kubota_constant(k, i)
    vals = []
    for index, size in _blocks(samples):
        rng = seed.rng(index)
        if i == k:
            vals.append(np.full(size, body.volume))
            continue
        frames = random_frames(k, i, size, rng)
        if i == 1:
            proj = np.einsum("mk,sk->sm", body.vertices, frames[:, 0, :])
            vals.append(proj.max(axis=1) - proj.min(axis=1))
        else:
            out = np.empty(size)
            for s in range(size):
                Y = body.vertices @ frames[s].T
                out[s] = poly.hull(poly._unique_rows(Y)).volume
            vals.append(out)
    m, e = _mean_err(np.concatenate(vals))
    return Estimate(const * m, const * e, samples, "kubota_mc", seed)


# ---------------------------------------------------------------------------
# dual volumes

def radial_function(body):
    """Vectorised radial function; polytopes may have the origin on the boundary."""
    if isinstance(body, poly.Polytope):
        if np.any(body.b < -poly.TOL):
            raise ValueError("origin lies outside the body")
        A, b = body.A, body.b
        return lambda U: poly.radial_hrep(A, b, U)
    return body.radial


def _sphere_samples(k: int, N: int, seed: Seed):
    """Directions for the sphere estimators; S^0 is enumerated exactly."""
    if k == 1:
        return np.array([[1.0], [-1.0]]), True
    return np.concatenate([random_directions(k, size, seed.rng(index)) for index, size in _blocks(N)]), False


def _polygon_angles(body) -> list[float]:
    if isinstance(body, poly.Polytope) and body.ambient_dim == 2:
        ang = np.mod(np.arctan2(body.vertices[:, 1], body.vertices[:, 0]), 2 * np.pi)
        return sorted(ang.tolist())
    return list(np.linspace(0, 2 * np.pi, 65)[1:-1])


def _circle_integral(rho, i: int, lo: float, hi: float, breaks, tol: float = 1e-11) -> float:
    f = lambda th: rho(np.array([math.cos(th), math.sin(th)])) ** i
    pts = [lo] + sorted(set(b for b in breaks if lo < b < hi)) + [hi]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate(f, (a, b), tol=tol, rel_tol=1e-12)
    return total


def _inradius_about_origin(body) -> float:
    """Radius of a centred ball inside the body (0 when no cheap bound exists)."""
    if isinstance(body, poly.Polytope):
        return max(0.0, float(np.min(body.b)))
    if isinstance(body, Ball):
        return float(body.radius)
    return 0.0


def _dual_contributions(body, i: int, method: str, N: int, seed: Seed, xi=None):
    """Per-sample contributions whose means estimate the full and half dual volumes.

    Returns ``(full, half, exact)``; ``half`` is ``None`` without ``xi``.
    """
    k = body.ambient_dim
    if method == "sphere_mc":
        rho = radial_function(body)
        U, exact = _sphere_samples(k, N, seed)
        w = sphere_area(k) / k
        r = np.asarray(rho(U)) ** i * w
        half = None if xi is None else r * (U @ xi >= 0)
        return r, half, exact
    if method == "kubota_mc":
        const = ball_volume(k) / ball_volume(i)
        if i == k:
            vol = body.volume
            full = np.array([const * vol])
            half = None
            if xi is not None:
                cut = poly.halfspace_cut(body, poly.HalfSpace(xi)) if isinstance(body, poly.Polytope) else None
                if cut is None:
                    raise ValueError("kubota_mc with i = k needs a polytope")
                half = np.array([const * cut.volume])
            return full, half, True
        if i == 1:
            rho = radial_function(body)
            # own stream so line samples stay independent of sphere_mc draws
            U, exact = _sphere_samples(k, N, seed.child(1))
            full = const * (rho(U) + rho(-U))
            half = None
            if xi is not None:
                s = np.where(U @ xi >= 0, 1.0, -1.0)[:, None]
                half = const * rho(s * U)
            return full, half, exact
        if not isinstance(body, poly.Polytope):
            raise ValueError("kubota_mc with 2 <= i < k needs a polytope")
        full, half = [], []
        for index, size in _blocks(N):
            frames = random_frames(k, i, size, seed.rng(index))
            for s in range(size):
                F = Subspace(frames[s])
                S = poly.section(body, F)
                full.append(S.volume)
                if xi is not None:
                    xf = F.coords(xi)
                    nrm = np.linalg.norm(xf)
                    if S.volume == 0.0 or nrm < 1e-14:
                        half.append(S.volume)
                    else:
                        half.append(poly.halfspace_cut(S, poly.HalfSpace(xf / nrm)).volume)
        return const * np.array(full), (None if xi is None else const * np.array(half)), False
    if method == "solid_mc":
        # |x|^(i-k) has infinite variance near 0 when 2i <= k, so the ball
        # r_in B inside the body is integrated exactly and only sampled outside
        r_in = _inradius_about_origin(body)
        core = ball_volume(k) * r_in ** i
        lo, hi = body.bounding_box()
        box = float(np.prod(hi - lo))
        full, half = [], []
        for index, size in _blocks(N):
            X = lo + (hi - lo) * seed.rng(index).random((size, k))
            inside = np.asarray(body.member(X))
            r = np.linalg.norm(X, axis=1)
            keep = inside & (r > r_in)
            with np.errstate(divide="ignore"):
                w = np.where(keep, r ** float(i - k), 0.0) * (i / k) * box
            full.append(w + core)
            if xi is not None:
                half.append(w * (X @ xi >= 0) + 0.5 * core)
        return np.concatenate(full), (None if xi is None else np.concatenate(half)), False
    raise ValueError(f"unknown dual-volume method {method!r}")


def _dual_quadrature(body, i: int, xi=None) -> tuple[float, float | None]:
    k = body.ambient_dim
    rho = radial_function(body)
    if k == 1:
        rp, rm = float(rho(np.array([1.0]))), float(rho(np.array([-1.0])))
        full = rp ** i + rm ** i
        half = None if xi is None else (rp ** i if xi[0] > 0 else rm ** i)
        return full, half
    if k != 2:
        raise ValueError("sphere_quadrature is only available for planar bodies")
    breaks = _polygon_angles(body)
    breaks = breaks + [b + 2 * np.pi for b in breaks] + [b - 2 * np.pi for b in breaks]
    full = 0.5 * _circle_integral(rho, i, 0.0, 2 * np.pi, breaks)
    half = None
    if xi is not None:
        phi = math.atan2(xi[1], xi[0])
        half = 0.5 * _circle_integral(rho, i, phi - np.pi / 2, phi + np.pi / 2, breaks)
    return full, half


def _check_dual_args(body, i, method):
    k = body.ambient_dim
    if not (1 <= i <= k):
        raise ValueError(f"need 1 <= i <= k = {k}, got i={i}")
    if method not in DUAL_METHODS:
        raise ValueError(f"unknown dual-volume method {method!r}")


def dual_volume(body, i: int, method: str = "sphere_mc", samples: int = 100_000,
                seed: Seed | int | None = None) -> Estimate:
    """i-th dual volume of a star body (origin inside) within its own space."""
    _check_dual_args(body, i, method)
    if method == "sphere_quadrature":
        full, _ = _dual_quadrature(body, i)
        return Estimate(full, 0.0, 0, method)
    seed = as_seed(seed)
    full, _, exact = _dual_contributions(body, i, method, samples, seed)
    if exact:
        return Estimate(float(np.mean(full)), 0.0, len(full), method, seed)
    m, e = _mean_err(full)
    return Estimate(m, e, len(full), method, seed)


def dual_volume_halfspace(body, i: int, xi, method: str = "sphere_mc", samples: int = 100_000,
                          seed: Seed | int | None = None) -> Estimate:
    """Dual volume of ``body ∩ ξ^+``: the radial integral over the hemisphere ``<u, ξ> >= 0``."""
    _check_dual_args(body, i, method)
    xi = _unit(xi, body.ambient_dim)
    if method == "sphere_quadrature":
        _, half = _dual_quadrature(body, i, xi)
        return Estimate(half, 0.0, 0, method)
    seed = as_seed(seed)
    _, half, exact = _dual_contributions(body, i, method, samples, seed, xi)
    if exact:
        return Estimate(float(np.mean(half)), 0.0, len(half), method, seed)
    m, e = _mean_err(half)
    return Estimate(m, e, len(half), method, seed)


def _unit(xi, k):
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape != (k,) or abs(np.linalg.norm(xi) - 1) > 1e-10:
        raise ValueError(f"ξ must be a unit vector in R^{k}")
    return xi


def ratio_stats(num: np.ndarray, den: np.ndarray) -> tuple[float, float]:
    """Ratio of means of paired samples and its delta-method standard error."""
    mn, md = float(np.mean(num)), float(np.mean(den))
    if md == 0:
        raise ZeroDivisionError("denominator mean is zero")
    R = mn / md
    if len(num) < 2:
        return R, 0.0
    resid = num - R * den
    return R, float(np.std(resid, ddof=1) / math.sqrt(len(num)) / abs(md))


def dual_halfspace_ratio(body, i: int, xi, method: str = "sphere_mc", samples: int = 100_000,
                         seed: Seed | int | None = None):
    """``(half, full, ratio, ratio_stderr)`` computed on one shared sample."""
    _check_dual_args(body, i, method)
    xi = _unit(xi, body.ambient_dim)
    if method == "sphere_quadrature":
        full, half = _dual_quadrature(body, i, xi)
        return Estimate(half, 0, 0, method), Estimate(full, 0, 0, method), half / full, 0.0
    seed = as_seed(seed)
    full, half, exact = _dual_contributions(body, i, method, samples, seed, xi)
    if exact:
        fv, hv = float(np.mean(full)), float(np.mean(half))
        return (Estimate(hv, 0, len(full), method, seed), Estimate(fv, 0, len(full), method, seed),
                hv / fv, 0.0)
    R, sR = ratio_stats(half, full)
    hm, he = _mean_err(half)
    fm, fe = _mean_err(full)
    return Estimate(hm, he, len(half), method, seed), Estimate(fm, fe, len(full), method, seed), R, sR


# ---------------------------------------------------------------------------
# Steiner-type identities

def _polygon_distance(P: poly.Polytope, X: np.ndarray) -> np.ndarray:
    inside = P.contains(X)
    E = P.edges
    a = P.vertices[E[:, 0]]
    b = P.vertices[E[:, 1]]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    rel = X[:, None, :] - a[None, :, :]
    s = np.clip(np.einsum("nej,ej->ne", rel, ab) / L2[None, :], 0.0, 1.0)
    closest = a[None, :, :] + s[:, :, None] * ab[None, :, :]
    d = np.linalg.norm(X[:, None, :] - closest, axis=2).min(axis=1)
    return np.where(inside, 0.0, d)


def steiner_check_2d(P: poly.Polytope, t: float, samples: int = 200_000,
                     seed: Seed | int | None = None) -> tuple[Estimate, float]:
    """Monte-Carlo area of ``P + t B^2`` next to ``A + perimeter t + π t^2``."""
    if P.ambient_dim != 2:
        raise ValueError("steiner_check_2d needs a planar polygon")
    if t < 0:
        raise ValueError("t must be non-negative")
    formula = P.volume + P.surface_area * t + math.pi * t * t
    seed = as_seed(seed)
    lo, hi = P.bounding_box()
    lo, hi = lo - t, hi + t
    box = float(np.prod(hi - lo))
    hits = []
    for index, size in _blocks(samples):
        X = lo + (hi - lo) * seed.rng(index).random((size, 2))
        hits.append((_polygon_distance(P, X) <= t).astype(float) * box)
    m, e = _mean_err(np.concatenate(hits))
    return Estimate(m, e, samples, "membership_mc", seed), formula


def dual_steiner_check(body, t: float, directions: int = 10_000, seed: Seed | int | None = None) -> float:
    """Largest residual of the dual Steiner expansion on one shared direction sample.

    Checks ``(ρ + t)^k = Σ C(k,i) ρ^i t^{k-i}`` pointwise and the integrated
    identity ``vol(L +~ tB) = Σ C(k,i) Ṽ_i(L) t^{k-i}`` with every term
    estimated from the same directions.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    k = body.ambient_dim
    rho_fn = radial_function(body)
    U, _ = _sphere_samples(k, directions, as_seed(seed))
    rho = np.asarray(rho_fn(U))
    lhs = (rho + t) ** k
    rhs = sum(math.comb(k, i) * rho ** i * t ** (k - i) for i in range(k + 1))
    pointwise = float(np.max(np.abs(lhs - rhs)))
    w = sphere_area(k) / k
    vol_radial_sum = w * float(np.mean(lhs))
    duals = [w * float(np.mean(rho ** i)) for i in range(k + 1)]
    integrated = abs(vol_radial_sum - sum(math.comb(k, i) * duals[i] * t ** (k - i) for i in range(k + 1)))
    return max(pointwise, integrated)
