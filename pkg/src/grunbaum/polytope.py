"""Exact low-dimensional convex polytopes.

Polytopes carry both representations: the extreme points and the facet
inequalities ``A x <= b`` (unit normals).  Everything is built on Qhull; the
triangulation it returns doubles as the simplicial decomposition used for
volume and centroid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import Seed, Subspace, as_seed

TOL = 1e-9
MAX_DIM = 6
MAX_POINTS = 256


class DegenerateError(ValueError):
    """Input does not span a full-dimensional body."""


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space through the origin: ``<x, normal> >= 0`` (plus) or ``<= 0`` (minus)."""

    normal: np.ndarray
    side: str = "plus"

    def __post_init__(self):
        v = np.asarray(self.normal, dtype=float).ravel()
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("half-space normal must be a unit vector")
        if self.side not in ("plus", "minus"):
            raise ValueError(f"side must be 'plus' or 'minus', got {self.side!r}")
        object.__setattr__(self, "normal", v)

    @property
    def signed_normal(self) -> np.ndarray:
        return self.normal if self.side == "plus" else -self.normal


@dataclass(frozen=True, eq=False)
class Degenerate:
    """Result of a section or cut that is empty or not full-dimensional."""

    ambient_dim: int
    points: np.ndarray = field(repr=False)
    reason: str = "empty"

    is_polytope = False
    volume = 0.0

    @property
    def is_empty(self) -> bool:
        return self.reason == "empty"


def _affine_rank(points: np.ndarray, scale: float | None = None) -> int:
    if len(points) == 0:
        return -1
    c = points - points.mean(axis=0)
    if scale is None:
        scale = max(1.0, float(np.abs(points).max()))
    s = np.linalg.svd(c, compute_uv=False)
    return int(np.sum(s > TOL * scale))


def _unique_rows(X: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Rows of X with near-duplicates (max-norm <= tol) removed, first occurrence kept."""
    if len(X) <= 1:
        return X
    close = np.abs(X[:, None, :] - X[None, :, :]).max(axis=2) <= tol
    dup = np.tril(close, k=-1).any(axis=1)
    return X[~dup]


class Polytope:
    """Full-dimensional convex polytope in R^d (d <= 6), immutable.

    Construct with :func:`hull`.  ``A``/``b`` hold the facet inequalities with
    unit normals; ``simplices`` indexes a triangulation of the boundary.
    """

    is_polytope = True
    is_empty = False

    def __init__(self, vertices: np.ndarray, A: np.ndarray, b: np.ndarray, simplices: np.ndarray):
        for arr in (vertices, A, b, simplices):
            arr.setflags(write=False)
        self.vertices = vertices
        self.A = A
        self.b = b
        self.simplices = simplices

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    dim = ambient_dim

    @property
    def facets(self) -> list[tuple[np.ndarray, float]]:
        return [(a, float(bj)) for a, bj in zip(self.A, self.b)]

    def __repr__(self):
        return f"Polytope(dim={self.ambient_dim}, vertices={len(self.vertices)}, facets={len(self.b)})"

    # -- measures ----------------------------------------------------------

    def _simplex_fan(self):
        d = self.ambient_dim
        apex = self.vertices[0]
        tris = self.vertices[self.simplices]  # (s, d, d)
        M = tris - apex[None, None, :]
        vols = np.abs(np.linalg.det(M)) / math.factorial(d)
        cents = (tris.sum(axis=1) + apex) / (d + 1)
        return vols, cents

    @cached_property
    def volume(self) -> float:
        if self.ambient_dim == 1:
            return float(self.vertices[1, 0] - self.vertices[0, 0])
        vols, _ = self._simplex_fan()
        return float(vols.sum())

    @cached_property
    def centroid(self) -> np.ndarray:
        if self.ambient_dim == 1:
            c = self.vertices.mean(axis=0)
        else:
            vols, cents = self._simplex_fan()
            c = (vols[:, None] * cents).sum(axis=0) / vols.sum()
        c.setflags(write=False)
        return c

    @cached_property
    def surface_area(self) -> float:
        """Total (d-1)-volume of the boundary."""
        d = self.ambient_dim
        if d == 1:
            return 2.0
        tris = self.vertices[self.simplices]
        E = tris[:, 1:, :] - tris[:, :1, :]
        G = np.einsum("sij,skj->sik", E, E)
        return float(np.sqrt(np.clip(np.linalg.det(G), 0.0, None)).sum() / math.factorial(d - 1))

    @cached_property
    def edges(self) -> np.ndarray:
        """Index pairs of vertices joined by an edge, shape (e, 2)."""
        d = self.ambient_dim
        m = len(self.vertices)
        if d == 1:
            return np.array([[0, 1]])
        tight = np.abs(self.vertices @ self.A.T - self.b[None, :]) <= TOL * 10
        out = []
        for u, v in itertools.combinations(range(m), 2):
            common = tight[u] & tight[v]
            if common.sum() < d - 1:
                continue
            if np.linalg.matrix_rank(self.A[common], tol=1e-8) == d - 1:
                out.append((u, v))
        return np.array(out, dtype=int).reshape(-1, 2)

    @cached_property
    def diameter(self) -> float:
        V = self.vertices
        D = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=2)
        return float(D.max())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def circumradius(self) -> float:
        """Largest distance from the origin to a point of the body."""
        return float(np.linalg.norm(self.vertices, axis=1).max())

    # -- predicates --------------------------------------------------------

    def contains(self, X, tol: float = TOL):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        ok = np.all(X @ self.A.T <= self.b[None, :] + tol, axis=1)
        return bool(ok[0]) if single else ok

    member = contains

    def origin_interior(self, tol: float = TOL) -> bool:
        return bool(np.all(self.b > tol))

    def radial(self, U) -> np.ndarray | float:
        """Radial function at unit vector(s) ``U``; the origin must be interior."""
        if not self.origin_interior():
            raise ValueError("radial function needs the origin in the interior of the polytope")
        return radial_hrep(self.A, self.b, U)

    # -- transformations ---------------------------------------------------

    def translate(self, t) -> "Polytope":
        t = np.asarray(t, dtype=float)
        return Polytope(self.vertices + t, self.A.copy(), self.b + self.A @ t, self.simplices.copy())

    def linear_map(self, M, t=None) -> "Polytope":
        V = self.vertices @ np.asarray(M, dtype=float).T
        if t is not None:
            V = V + np.asarray(t, dtype=float)
        return hull(V)

    def scale(self, lam: float) -> "Polytope":
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        return Polytope(self.vertices * lam, self.A.copy(), self.b * lam, self.simplices.copy())

    def to_json_dict(self) -> dict:
        return {
            "type": "polytope",
            "ambient_dim": self.ambient_dim,
            "vertices": self.vertices.tolist(),
        }

    # -- hyperplane slicing -------------------------------------------------

    def hyperplane_points(self, normal, offset: float) -> np.ndarray:
        """Vertices of ``P ∩ {<x, normal> = offset}`` (unordered, may repeat)."""
        vals = self.vertices @ np.asarray(normal, dtype=float) - offset
        on = np.abs(vals) <= TOL
        pts = [self.vertices[on]]
        E = self.edges
        if len(E):
            vu, vv = vals[E[:, 0]], vals[E[:, 1]]
            cross = ((vu < -TOL) & (vv > TOL)) | ((vu > TOL) & (vv < -TOL))
            if np.any(cross):
                e = E[cross]
                lam = vals[e[:, 0]] / (vals[e[:, 0]] - vals[e[:, 1]])
                pts.append(self.vertices[e[:, 0]] + lam[:, None] * (self.vertices[e[:, 1]] - self.vertices[e[:, 0]]))
        return np.concatenate(pts, axis=0)


def radial_hrep(A: np.ndarray, b: np.ndarray, U) -> np.ndarray | float:
    """Radial function of ``{A x <= b}`` (origin inside, b >= 0) at direction(s) ``U``."""
    U = np.asarray(U, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    den = A @ U.T  # (f, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 1e-15, np.maximum(b, 0.0)[:, None] / den, np.inf)
    rho = r.min(axis=0)
    return float(rho[0]) if single else rho


# ---------------------------------------------------------------------------
# construction

def hull(points) -> Polytope:
    """Convex hull of a full-dimensional point set (ambient dim <= 6, <= 256 points)."""
    P = np.array(points, dtype=float, ndmin=2)
    if P.ndim != 2:
        raise ValueError("points must be a 2-D array")
    m, d = P.shape
    if d < 1 or d > MAX_DIM:
        raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}, got {d}")
    if m > MAX_POINTS:
        raise ValueError(f"at most {MAX_POINTS} points supported, got {m}")
    if not np.all(np.isfinite(P)):
        raise ValueError("points must be finite")
    if d == 1:
        lo, hi = float(P.min()), float(P.max())
        if hi - lo <= TOL:
            raise DegenerateError("points do not span a segment")
        return Polytope(
            np.array([[lo], [hi]]),
            np.array([[1.0], [-1.0]]),
            np.array([hi, -lo]),
            np.array([[1], [0]]),
        )
    if m < d + 1 or _affine_rank(P) < d:
        raise DegenerateError(f"points do not affinely span R^{d}")
    try:
        qh = ConvexHull(P)
    except QhullError as exc:  # pragma: no cover - rank test catches the usual cases
        raise DegenerateError(str(exc)) from exc
    eq = qh.equations
    normals, offsets = eq[:, :-1], -eq[:, -1]
    # Qhull triangulates facets; merge coplanar pieces back into facets
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    planes = _unique_rows(np.column_stack([normals, offsets]), TOL * 10)
    keep_n, keep_b = planes[:, :-1], planes[:, -1]
    vidx = np.sort(qh.vertices)
    remap = -np.ones(m, dtype=int)
    remap[vidx] = np.arange(len(vidx))
    simplices = remap[qh.simplices]
    return Polytope(P[vidx].copy(), keep_n.copy(), keep_b.copy(), simplices)


def _from_points_or_degenerate(points: np.ndarray, dim: int) -> Polytope | Degenerate:
    pts = np.asarray(points, dtype=float).reshape(-1, dim)
    if len(pts) == 0:
        return Degenerate(dim, pts, "empty")
    pts = _unique_rows(pts)
    if _affine_rank(pts) < dim:
        return Degenerate(dim, pts, "lower_dimensional")
    return hull(pts)


def hrep_vertices(A: np.ndarray, b: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Vertices of ``{A y <= b}`` by solving every d-subset of tight constraints."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    f, d = A.shape
    if d == 1:
        a = A[:, 0]
        lo = max([b[j] / a[j] for j in range(f) if a[j] < -1e-14], default=-np.inf)
        hi = min([b[j] / a[j] for j in range(f) if a[j] > 1e-14], default=np.inf)
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo - tol:
            return np.zeros((0, 1))
        return np.array([[lo], [hi]])
    combos = np.array(list(itertools.combinations(range(f), d)), dtype=int)
    if len(combos) == 0:
        return np.zeros((0, d))
    M = A[combos]  # (c, d, d)
    rhs = b[combos]
    dets = np.linalg.det(M)
    ok = np.abs(dets) > 1e-12
    if not np.any(ok):
        return np.zeros((0, d))
    Y = np.linalg.solve(M[ok], rhs[ok][:, :, None])[:, :, 0]
    feas = np.all(Y @ A.T <= b[None, :] + tol, axis=1)
    return _unique_rows(Y[feas])


# ---------------------------------------------------------------------------
# sections, projections, cuts

def _section_points(P: Polytope, E: Subspace, x: np.ndarray) -> np.ndarray:
    """Points spanning ``(P - x) ∩ E`` in E-coordinates."""
    n = P.ambient_dim
    if E.ambient_dim != n:
        raise ValueError(f"subspace lives in R^{E.ambient_dim}, polytope in R^{n}")
    k = E.dim
    if k == n:
        return E.coords(P.vertices - x)
    comp = E.complement()
    if n - k == 1:
        nu = comp.basis[0]
        pts = P.hyperplane_points(nu, float(nu @ x))
        return E.coords(pts - x)
    # higher codimension: substitute z = x + B^T y into the facet inequalities
    A2 = P.A @ E.basis.T
    b2 = P.b - P.A @ x
    return hrep_vertices(A2, b2)


def section(P: Polytope, E: Subspace) -> Polytope | Degenerate:
    """``P ∩ E`` expressed in the coordinates of ``E``."""
    return section_translated(P, E, np.zeros(P.ambient_dim))


def section_translated(P: Polytope, E: Subspace, x) -> Polytope | Degenerate:
    """``(P - x) ∩ E`` in E-coordinates; empty or flat results come back as :class:`Degenerate`."""
    x = np.asarray(x, dtype=float)
    pts = _section_points(P, E, x)
    return _from_points_or_degenerate(pts, E.dim)


def project(P: Polytope, E: Subspace) -> Polytope:
    """Orthogonal projection ``P | E`` in E-coordinates."""
    if E.ambient_dim != P.ambient_dim:
        raise ValueError("dimension mismatch between polytope and subspace")
    pts = E.coords(P.vertices)
    if E.dim == 1:
        return hull(pts)
    return hull(_unique_rows(pts))


def halfspace_cut(P: Polytope, h: HalfSpace) -> Polytope | Degenerate:
    """``P ∩ {<x, ξ> >= 0}`` (or ``<= 0`` for the minus side)."""
    xi = h.signed_normal
    if xi.shape[0] != P.ambient_dim:
        raise ValueError("half-space normal has the wrong dimension")
    vals = P.vertices @ xi
    keep = P.vertices[vals >= -TOL]
    if len(keep) == 0:
        return Degenerate(P.ambient_dim, keep, "empty")
    if np.all(vals >= -TOL):
        return P
    pts = np.concatenate([keep, P.hyperplane_points(xi, 0.0)], axis=0)
    return _from_points_or_degenerate(pts, P.ambient_dim)


def radial(P: Polytope, u) -> float:
    return P.radial(u)


def volume(P: Polytope | Degenerate) -> float:
    return float(P.volume)


def centroid(P: Polytope) -> np.ndarray:
    return np.array(P.centroid)


def random_centered_polytope(n: int, m: int, seed: Seed | int) -> Polytope:
    """Hull of ``m`` standard-normal points in R^n, translated to centroid 0."""
    if n < 1 or n > MAX_DIM:
        raise ValueError(f"n must be in 1..{MAX_DIM}")
    if m < n + 2:
        raise ValueError(f"need m >= n + 2 points, got m={m}")
    seed = as_seed(seed)
    for attempt in range(8):
        pts = seed.rng(attempt).standard_normal((m, n))
        try:
            P = hull(pts)
        except DegenerateError:
            continue
        return P.translate(-P.centroid)
    raise DegenerateError("could not draw a full-dimensional polytope in 8 attempts")
