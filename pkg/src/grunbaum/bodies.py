"""Closed-form bodies: product cones, balls, symmetral profiles and cone fits.

A product cone is ``conv(r0 B^p + c0 ξ, r1 B^q + c1 ξ)`` with the two balls in
mutually orthogonal subspaces orthogonal to the axis ξ and ``p + q + 1 = n``.
Its slice at axial height t is the product of balls with radii
``r0 (c1 - t)/h`` and ``r1 (t - c0)/h``, h = c1 - c0, which makes volume,
centroid and radial function available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import beta as beta_fn

from .core import Subspace, ball_volume, integrate, orthonormalize, sphere_area
from . import polytope as poly

FRAME_TOL = 1e-10


def _frame(rows, n: int) -> np.ndarray:
    F = np.array(rows, dtype=float).reshape(-1, n)
    F.setflags(write=False)
    return F


@dataclass(frozen=True, eq=False)
class ProductConeBody:
    n: int
    p: int
    q: int
    r0: float
    r1: float
    c0: float
    c1: float
    axis: np.ndarray = field(repr=False)
    frame_p: np.ndarray = field(repr=False)
    frame_q: np.ndarray = field(repr=False)

    is_polytope = False

    def __post_init__(self):
        n, p, q = self.n, self.p, self.q
        if p < 0 or q < 0 or p + q + 1 != n:
            raise ValueError(f"need p + q + 1 = n, got p={p}, q={q}, n={n}")
        if not self.c0 < self.c1:
            raise ValueError("need c0 < c1")
        if self.r0 < 0 or self.r1 < 0:
            raise ValueError("radii must be non-negative")
        if p > 0 and self.r0 == 0:
            raise ValueError("r0 = 0 is only meaningful for a point base (p = 0)")
        if q > 0 and self.r1 == 0:
            raise ValueError("r1 = 0 is only meaningful for a point top (q = 0)")
        axis = np.asarray(self.axis, dtype=float).ravel()
        fp, fq = _frame(self.frame_p, n), _frame(self.frame_q, n)
        if axis.shape != (n,) or fp.shape != (p, n) or fq.shape != (q, n):
            raise ValueError("axis/frame shapes do not match (n, p, q)")
        M = np.vstack([axis[None, :], fp, fq])
        if np.max(np.abs(M @ M.T - np.eye(n))) > FRAME_TOL:
            raise ValueError("axis and frames must be mutually orthonormal")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "frame_p", fp)
        object.__setattr__(self, "frame_q", fq)

    @property
    def ambient_dim(self) -> int:
        return self.n

    dim = ambient_dim

    @property
    def height(self) -> float:
        return self.c1 - self.c0

    def slice_radii(self, t):
        """Radii of the two ball factors of the slice at axial height ``t``."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.c0 - 1e-12) or np.any(t_arr > self.c1 + 1e-12):
            raise ValueError(f"t outside the axial extent [{self.c0}, {self.c1}]")
        h = self.height
        a = self.r0 * (self.c1 - t_arr) / h
        b = self.r1 * (t_arr - self.c0) / h
        if t_arr.ndim == 0:
            return float(a), float(b)
        return a, b

    @property
    def volume(self) -> float:
        p, q = self.p, self.q
        rp = self.r0 ** p if p else 1.0
        rq = self.r1 ** q if q else 1.0
        return ball_volume(p) * ball_volume(q) * rp * rq * self.height * float(beta_fn(p + 1, q + 1))

    @property
    def centroid_axial(self) -> float:
        return self.c0 + self.height * (self.q + 1) / (self.n + 1)

    @property
    def centroid(self) -> np.ndarray:
        return self.centroid_axial * self.axis

    def circumradius(self) -> float:
        lo = math.hypot(self.c0, self.r0 if self.p else 0.0)
        hi = math.hypot(self.c1, self.r1 if self.q else 0.0)
        return max(lo, hi)

    def bounding_box(self):
        R = self.circumradius()
        return -R * np.ones(self.n), R * np.ones(self.n)

    def _split(self, X):
        t = X @ self.axis
        yp = np.linalg.norm(X @ self.frame_p.T, axis=-1) if self.p else np.zeros_like(t)
        yq = np.linalg.norm(X @ self.frame_q.T, axis=-1) if self.q else np.zeros_like(t)
        return t, yp, yq

    def member(self, X, tol: float = 1e-12):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        t, yp, yq = self._split(X)
        h = self.height
        ok = (t >= self.c0 - tol) & (t <= self.c1 + tol)
        tt = np.clip(t, self.c0, self.c1)
        if self.p:
            ok &= yp <= self.r0 * (self.c1 - tt) / h + tol
        if self.q:
            ok &= yq <= self.r1 * (tt - self.c0) / h + tol
        return bool(ok[0]) if single else ok

    contains = member

    def radial(self, U):
        """Radial function in direction(s) ``U``.

        Membership along a ray is an intersection of linear constraints in the
        ray parameter, so the exit point is the smallest positive bound.
        """
        if not (self.c0 <= 0.0 <= self.c1):
            raise ValueError("origin is not in the body")
        U = np.asarray(U, dtype=float)
        single = U.ndim == 1
        U = np.atleast_2d(U)
        ut, up, uq = self._split(U)
        h = self.height
        alphas = [ut, -ut]
        betas = [np.full_like(ut, self.c1), np.full_like(ut, -self.c0)]
        if self.p:
            alphas.append(up + self.r0 * ut / h)
            betas.append(np.full_like(ut, self.r0 * self.c1 / h))
        if self.q:
            alphas.append(uq - self.r1 * ut / h)
            betas.append(np.full_like(ut, -self.r1 * self.c0 / h))
        al = np.stack(alphas)
        be = np.stack(betas)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(al > 1e-15, be / al, np.inf)
        rho = r.min(axis=0)
        return float(rho[0]) if single else rho

    def is_polytopal(self) -> bool:
        return self.p <= 1 and self.q <= 1

    def to_polytope(self) -> poly.Polytope:
        if not self.is_polytopal():
            raise ValueError("only bodies with p, q <= 1 are polytopes")
        pts = []
        base = self.c0 * self.axis
        top = self.c1 * self.axis
        if self.p:
            pts += [base + self.r0 * self.frame_p[0], base - self.r0 * self.frame_p[0]]
        else:
            pts.append(base)
        if self.q:
            pts += [top + self.r1 * self.frame_q[0], top - self.r1 * self.frame_q[0]]
        else:
            pts.append(top)
        return poly.hull(np.array(pts))

    def to_json_dict(self) -> dict:
        return {
            "type": "product_cone",
            "n": self.n, "p": self.p, "q": self.q,
            "r0": self.r0, "r1": self.r1, "c0": self.c0, "c1": self.c1,
            "axis": self.axis.tolist(),
            "frame_p": self.frame_p.tolist(),
            "frame_q": self.frame_q.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ProductConeBody":
        n = int(d["n"])
        return cls(
            n=n, p=int(d["p"]), q=int(d["q"]),
            r0=float(d["r0"]), r1=float(d["r1"]), c0=float(d["c0"]), c1=float(d["c1"]),
            axis=np.array(d["axis"], dtype=float),
            frame_p=np.array(d["frame_p"], dtype=float).reshape(-1, n),
            frame_q=np.array(d["frame_q"], dtype=float).reshape(-1, n),
        )


@dataclass(frozen=True)
class Ball:
    """Centred Euclidean ball ``radius * B^dim``."""

    dim: int
    radius: float = 1.0
    is_polytope = False

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def volume(self) -> float:
        return ball_volume(self.dim) * self.radius ** self.dim

    def radial(self, U):
        U = np.asarray(U, dtype=float)
        if U.ndim == 1:
            return float(self.radius)
        return np.full(len(U), float(self.radius))

    def member(self, X, tol: float = 1e-12):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1)
        out = r <= self.radius + tol
        return bool(out) if X.ndim == 1 else out

    contains = member

    def circumradius(self) -> float:
        return float(self.radius)

    def bounding_box(self):
        return -self.radius * np.ones(self.dim), self.radius * np.ones(self.dim)


@dataclass(frozen=True, eq=False)
class SectionView:
    """``body ∩ E`` seen in the coordinates of ``E`` (star-shaped about 0)."""

    body: object
    E: Subspace

    is_polytope = False

    @property
    def ambient_dim(self) -> int:
        return self.E.dim

    dim = ambient_dim

    def radial(self, U):
        U = np.asarray(U, dtype=float)
        return self.body.radial(self.E.embed(U))

    def member(self, Y, tol: float = 1e-12):
        return self.body.member(self.E.embed(np.asarray(Y, dtype=float)), tol)

    contains = member

    def circumradius(self) -> float:
        return self.body.circumradius()

    def bounding_box(self):
        R = self.circumradius()
        return -R * np.ones(self.E.dim), R * np.ones(self.E.dim)


def pc_volume(B: ProductConeBody) -> float:
    return B.volume


def pc_centroid(B: ProductConeBody) -> float:
    return B.centroid_axial


def pc_member(B: ProductConeBody, x) -> bool:
    return B.member(x)


def pc_radial(B: ProductConeBody, u) -> float:
    return B.radial(u)


def pc_radial_bisect(B: ProductConeBody, u, tol: float = 1e-12) -> float:
    """Radial function by bisection on membership; slow reference path."""
    u = np.asarray(u, dtype=float)
    if not B.member(np.zeros(B.n)):
        raise ValueError("origin is not in the body")
    lo, hi = 0.0, 2.0 * B.circumradius() + 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if B.member(mid * u, tol=0.0):
            lo = mid
        else:
            hi = mid
    return lo


def slice_radii(B: ProductConeBody, t: float):
    return B.slice_radii(t)


# ---------------------------------------------------------------------------
# constructors

def _check_unit(xi, n):
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape != (n,) or abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise ValueError("ξ must be a unit vector in R^n")
    return xi


def _complement_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the row span."""
    if len(rows) == 0:
        return np.eye(n)
    if len(rows) == n:
        return np.zeros((0, n))
    _, _, vt = np.linalg.svd(rows)
    return orthonormalize(vt[len(rows):])


def make_equality_body(n: int, i: int, a: float, r0: float, r1: float, F: Subspace, xi) -> ProductConeBody:
    """Centred cone body giving equality in the half-space inequalities for slices/shadows on F.

    The (i-1)-ball sits in ``F ∩ ξ^⊥`` at height ``-a (n-i+1)/(n+1)`` and the
    (n-i)-ball in ``F^⊥`` at height ``a i/(n+1)``.
    """
    if not (1 <= i <= n - 1):
        raise ValueError(f"need 1 <= i <= n-1, got n={n}, i={i}")
    if min(a, r0, r1) <= 0:
        raise ValueError("a, r0, r1 must be positive")
    if F.ambient_dim != n or F.dim != i:
        raise ValueError(f"F must be an {i}-dimensional subspace of R^{n}")
    xi = _check_unit(xi, n)
    if not F.contains(xi):
        raise ValueError("ξ must lie in F")
    fp = F.intersect_orthogonal(xi)
    frame_p = fp.basis if fp is not None else np.zeros((0, n))
    frame_q = _complement_rows(F.basis, n)
    return ProductConeBody(
        n=n, p=i - 1, q=n - i,
        r0=float(r0) if i > 1 else 0.0, r1=float(r1),
        c0=-a * (n - i + 1) / (n + 1), c1=a * i / (n + 1),
        axis=xi, frame_p=frame_p, frame_q=frame_q,
    )


SHARPNESS_FAMILIES = ("intrinsic_sections", "dual_sections", "dual_halfspace")
_FAMILY_ALIASES = {"thm1": "intrinsic_sections", "thm2": "dual_sections", "thm3": "dual_halfspace"}


def family_name(theorem: str) -> str:
    name = _FAMILY_ALIASES.get(theorem, theorem)
    if name not in SHARPNESS_FAMILIES:
        raise ValueError(f"unknown sharpness family {theorem!r}")
    return name


def make_sharpness_family(theorem: str, n: int, i: int, eps: float, F: Subspace, xi) -> ProductConeBody:
    """Member ``K_eps`` of the family showing a constant cannot be improved.

    ``intrinsic_sections`` / ``dual_sections``: ξ ⟂ F, the i-ball lies in F and
    the (n-i-1)-ball in ``span(F, ξ)^⊥``; the shrinking factor ``eps``
    multiplies the top ball (intrinsic) or the base ball (dual).
    ``dual_halfspace``: ξ ∈ F, a cone-like body flattened along ξ by ``eps``.
    """
    name = family_name(theorem)
    if eps <= 0:
        raise ValueError("eps must be positive")
    xi = _check_unit(xi, n)
    if F.ambient_dim != n or F.dim != i:
        raise ValueError(f"F must be an {i}-dimensional subspace of R^{n}")
    if name in ("intrinsic_sections", "dual_sections"):
        if not (1 <= i <= n - 2):
            raise ValueError(f"need 1 <= i <= n-2, got n={n}, i={i}")
        if np.max(np.abs(F.basis @ xi)) > 1e-10:
            raise ValueError("ξ must be orthogonal to F")
        frame_q = _complement_rows(np.vstack([F.basis, xi[None, :]]), n)
        r0, r1 = (1.0, float(eps)) if name == "intrinsic_sections" else (float(eps), 1.0)
        return ProductConeBody(
            n=n, p=i, q=n - i - 1, r0=r0, r1=r1,
            c0=-(n - i) / (n + 1), c1=(i + 1) / (n + 1),
            axis=xi, frame_p=F.basis, frame_q=frame_q,
        )
    if not (1 <= i <= n - 1):
        raise ValueError(f"need 1 <= i <= n-1, got n={n}, i={i}")
    if not F.contains(xi):
        raise ValueError("ξ must lie in F")
    fp = F.intersect_orthogonal(xi)
    return ProductConeBody(
        n=n, p=i - 1, q=n - i,
        r0=float(eps) if i > 1 else 0.0, r1=1.0,
        c0=-eps * (n - i + 1) / (n + 1), c1=eps * i / (n + 1),
        axis=xi,
        frame_p=fp.basis if fp is not None else np.zeros((0, n)),
        frame_q=_complement_rows(F.basis, n),
    )


# ---------------------------------------------------------------------------
# profiles

@dataclass(frozen=True, eq=False)
class Profile:
    """Radius function ``t -> r(t)`` sampled on a uniform grid."""

    axis: np.ndarray = field(repr=False)
    cross_dim: int
    t: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if t.shape != r.shape or t.ndim != 1 or len(t) < 2:
            raise ValueError("profile needs matching 1-D grids of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("profile grid must be strictly increasing")
        if np.any(r < -1e-12):
            raise ValueError("profile radii must be non-negative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", np.maximum(r, 0.0))
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float))

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.r.tolist()))

    def __call__(self, t):
        return np.interp(t, self.t, self.r, left=0.0, right=0.0)

    def volume(self) -> float:
        """(cross_dim + 1)-volume of the body of revolution (trapezoidal rule)."""
        return float(np.trapezoid(ball_volume(self.cross_dim) * self.r ** self.cross_dim, self.t))


def symmetral_profile(body, xi, i: int, grid_size: int = 2048, extent=None) -> Profile:
    """Profile of the i-symmetral: ``r(t) = (vol_i(slice at t) / κ_i)^{1/i}``.

    ``body`` is a :class:`~grunbaum.polytope.Polytope` of dimension i + 1, an
    axial :class:`ProductConeBody` with n = i + 1, or a callable returning the
    slice volume at t (then ``extent`` is required).
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    xi = np.asarray(xi, dtype=float)
    if callable(body) and not hasattr(body, "ambient_dim"):
        if extent is None:
            raise ValueError("extent is required for a callable slice function")
        lo, hi = extent
        t = np.linspace(lo, hi, grid_size)
        vols = np.array([body(s) for s in t], dtype=float)
    elif isinstance(body, poly.Polytope):
        d = body.ambient_dim
        if i != d - 1:
            raise ValueError(f"slices of a {d}-polytope are {d - 1}-dimensional, got i={i}")
        xi = _check_unit(xi, d)
        vals = body.vertices @ xi
        lo, hi = (vals.min(), vals.max()) if extent is None else extent
        t = np.linspace(lo, hi, grid_size)
        perp = Subspace.span(xi[None, :]).complement()
        vols = np.empty(grid_size)
        for j, s in enumerate(t):
            pts = perp.coords(body.hyperplane_points(xi, s)) if len(body.edges) else np.zeros((0, i))
            piece = poly._from_points_or_degenerate(pts, i) if len(pts) else None
            vols[j] = piece.volume if piece is not None else 0.0
    elif isinstance(body, ProductConeBody):
        if i != body.n - 1:
            raise ValueError(f"slices of the body are {body.n - 1}-dimensional, got i={i}")
        xi = _check_unit(xi, body.n)
        sgn = float(xi @ body.axis)
        if abs(abs(sgn) - 1.0) > 1e-10:
            raise ValueError("closed-form slices need ξ parallel to the body axis")
        lo, hi = (body.c0, body.c1) if sgn > 0 else (-body.c1, -body.c0)
        if extent is not None:
            lo, hi = extent
        t = np.linspace(lo, hi, grid_size)
        a, b = body.slice_radii(np.clip(sgn * t, body.c0, body.c1))
        vols = ball_volume(body.p) * ball_volume(body.q) * (a ** body.p) * (b ** body.q)
    else:
        raise TypeError(f"unsupported body type {type(body).__name__}")
    r = (np.maximum(vols, 0.0) / ball_volume(i)) ** (1.0 / i)
    return Profile(axis=xi, cross_dim=i, t=t, r=r)


def fit_cone_profile(prof: Profile, t0: float) -> tuple[float, Profile]:
    """Cone through ``(-t0, r(-t0))`` and ``(0, r(0))``, apex on the positive side.

    Returns the apex height t1 and the cone radius on the profile's grid
    (zero below the base at -t0 and beyond the apex).
    """
    r_base = float(np.interp(-t0, prof.t, prof.r))
    r_mid = float(np.interp(0.0, prof.t, prof.r))
    if not (r_base > r_mid > 0):
        raise ValueError("need r(-t0) > r(0) > 0 for a cone with apex at t > 0")
    t1 = t0 * r_mid / (r_base - r_mid)
    slope = (r_mid - r_base) / t0
    cone = np.where((prof.t >= -t0 - 1e-12) & (prof.t <= t1), r_mid + slope * prof.t, 0.0)
    return t1, Profile(axis=prof.axis, cross_dim=prof.cross_dim, t=prof.t, r=np.maximum(cone, 0.0))


# ---------------------------------------------------------------------------
# dual volumes of products of balls

def dual_volume_ball_product(k: int, i: int, a: float, b: float, tol: float = 1e-10) -> float:
    """i-th dual volume (inside R^k) of ``(a B^i) x (b B^{k-i})``.

    Polar coordinates in each factor reduce it to a 2-D integral; the outer
    radius is rescaled to [0, 1] so ``tol`` acts as a relative tolerance.
    """
    if not (1 <= i < k):
        raise ValueError(f"need 1 <= i < k, got k={k}, i={i}")
    if a <= 0 or b <= 0:
        raise ValueError("radii must be positive")
    e = 0.5 * (i - k)

    def inner(s):
        c = a * s
        f = lambda w: w ** (k - i - 1) * (c * c + w * w) ** e
        pts = [c] if 0 < c < b else None
        return integrate(f, (0.0, b), tol=tol * 1e-3, rel_tol=tol, points=pts)

    outer = integrate(lambda s: s ** (i - 1) * inner(s), (0.0, 1.0), tol=tol * 1e-3, rel_tol=tol)
    return (i / k) * sphere_area(i) * sphere_area(k - i) * a ** i * outer


def pc_section_dual_volume(B: ProductConeBody, k: int, i: int, t_range=None, tol: float = 1e-9) -> float:
    """Dual volume of ``B ∩ E`` within E (dim k) restricted to axial heights in ``t_range``.

    E must contain the axis and the p-frame; its slices are then products
    ``r0(t) B^p x r1(t) B^{k-1-p}``, integrated in polar coordinates.
    """
    p = B.p
    qk = k - 1 - p
    if qk < 0 or qk > B.q:
        raise ValueError(f"section dimension {k} incompatible with p={p}, q={B.q}")
    if not (1 <= i <= k):
        raise ValueError("need 1 <= i <= k")
    lo, hi = (B.c0, B.c1) if t_range is None else t_range
    lo, hi = max(lo, B.c0), min(hi, B.c1)
    if hi <= lo:
        return 0.0
    e = 0.5 * (i - k)
    h = B.height
    w_p = sphere_area(p) if p else 1.0
    w_q = sphere_area(qk) if qk else 1.0

    def slice_integral(t):
        ra = B.r0 * (B.c1 - t) / h
        rb = B.r1 * (t - B.c0) / h
        if p == 0 and qk == 0:
            if e == 0:
                return 1.0
            return abs(t) ** (2 * e) if t != 0 else 0.0

        def over_q(r1sq):
            if qk == 0:
                return (t * t + r1sq) ** e
            g = lambda w: w ** (qk - 1) * (t * t + r1sq + w * w) ** e
            c = math.sqrt(t * t + r1sq)
            pts = [c] if 0 < c < rb else None
            return integrate(g, (0.0, rb), tol=1e-14, rel_tol=tol, points=pts)

        if p == 0:
            return over_q(0.0)
        if ra <= 0:
            return 0.0
        return integrate(lambda r: r ** (p - 1) * over_q(r * r), (0.0, ra), tol=1e-14, rel_tol=tol,
                         points=[abs(t)] if 0 < abs(t) < ra else None)

    pts = [0.0] if lo < 0 < hi else None
    total = integrate(slice_integral, (lo, hi), tol=1e-14, rel_tol=tol, points=pts)
    return (i / k) * w_p * w_q * total
