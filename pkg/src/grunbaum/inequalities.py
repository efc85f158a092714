"""Checkers for the centroid-section and half-space inequalities, plus sharpness sweeps.

Every checker returns an :class:`InequalityReport` comparing a left-hand side
with the sharp constant times a right-hand side.  Ratios are always
``lhs / rhs_raw`` and a report passes when ``ratio - constant >= -3 sigma - 1e-9``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import qmc

from . import measures
from . import polytope as poly
from .bodies import (
    ProductConeBody,
    SectionView,
    dual_volume_ball_product,
    family_name,
    make_sharpness_family,
    pc_section_dual_volume,
)
from .core import (
    Seed,
    SharpConstantKind,
    Subspace,
    as_seed,
    ball_volume,
    integrate,
    random_directions,
    random_frames,
    sharp_constant,
    sphere_area,
)
from .measures import Estimate, ratio_stats

GEOM_TOL = 1e-9
CENTROID_TOL = 1e-8
SWEEPS = ("thm1", "thm2", "thm3_section", "thm3_projection")


@dataclass(frozen=True)
class CheckConfig:
    """Numerical knobs shared by the checkers."""

    seed: Seed | int = 0
    samples: int = 100_000
    directions: int = 2048
    starts: int = 16
    shrink: float = 0.5
    step_tol: float = 1e-5
    dual_method: str = "auto"
    grid: int | None = None

    @property
    def rng_seed(self) -> Seed:
        return as_seed(self.seed)

    @property
    def search_seed(self) -> Seed:
        # start points only; exact checks stay runnable without a seed
        return Seed(0) if self.seed is None else as_seed(self.seed)


@dataclass
class InequalityReport:
    theorem: str
    n: int
    k: int
    i: int
    lhs: Estimate
    rhs_raw: Estimate
    constant: float
    ratio: float
    margin: float
    sigma: float
    passed: bool
    seed: Seed | None = None
    samples: int = 0
    search: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "dims": {"n": self.n, "k": self.k, "i": self.i},
            "lhs": self.lhs.to_dict(),
            "rhs_raw": self.rhs_raw.to_dict(),
            "constant": self.constant,
            "ratio": self.ratio,
            "margin": self.margin,
            "sigma": self.sigma,
            "pass": self.passed,
            "seed": None if self.seed is None else self.seed.to_dict(),
            "samples": self.samples,
            "search": self.search,
        }


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    t: float | None
    ratio: float
    expected_limit: float
    error: float
    stderr: float = 0.0

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "t": self.t,
            "ratio": self.ratio,
            "expected_limit": self.expected_limit,
            "error": self.error,
            "stderr": self.stderr,
        }


def make_report(theorem, n, k, i, lhs: Estimate, rhs: Estimate, constant, ratio, sigma,
                seed=None, samples=0, search=None) -> InequalityReport:
    ratio = float(ratio)
    sigma = float(sigma)
    margin = ratio - float(constant)
    return InequalityReport(
        theorem=theorem, n=n, k=k, i=i, lhs=lhs, rhs_raw=rhs, constant=float(constant),
        ratio=ratio, margin=margin, sigma=sigma, passed=bool(margin >= -3 * sigma - GEOM_TOL),
        seed=seed, samples=samples, search=search or {},
    )


# ---------------------------------------------------------------------------
# helpers

def _as_polytope(K) -> poly.Polytope:
    if isinstance(K, poly.Polytope):
        return K
    if isinstance(K, ProductConeBody) and K.is_polytopal():
        return K.to_polytope()
    raise TypeError(f"this path needs a polytope, got {type(K).__name__}")


def _check_centered(K):
    g = K.centroid
    if np.linalg.norm(g) > CENTROID_TOL:
        raise ValueError(f"body centroid is {np.linalg.norm(g):.3g} away from the origin")


def _check_subspace(K, E: Subspace):
    if E.ambient_dim != K.ambient_dim:
        raise ValueError(f"subspace lives in R^{E.ambient_dim}, body in R^{K.ambient_dim}")


def _unit_in(E: Subspace, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape != (E.ambient_dim,) or abs(np.linalg.norm(xi) - 1) > 1e-10:
        raise ValueError("ξ must be a unit vector")
    if not E.contains(xi):
        raise ValueError("ξ must lie in the subspace")
    xe = E.coords(xi)
    return xe / np.linalg.norm(xe)


def _sphere_sample(k: int, count: int, seed: Seed) -> np.ndarray:
    if k == 1:
        return np.array([[1.0], [-1.0]])
    return random_directions(k, count, seed.rng(0))


def _dual_method(cfg: CheckConfig, k: int) -> str:
    if cfg.dual_method != "auto":
        return cfg.dual_method
    return "sphere_quadrature" if k <= 2 else "sphere_mc"


# ---------------------------------------------------------------------------
# pattern search

def _ray_limit(A, b, y, d) -> float:
    """Largest step α >= 0 keeping ``y + α d`` inside ``{A y <= b}``."""
    Ad = A @ d
    pos = Ad > 1e-15
    if not np.any(pos):
        return np.inf
    return float(max(0.0, np.min((b[pos] - A[pos] @ y) / Ad[pos])))


def pattern_search(f, y0, A, b, step: float, step_min: float, shrink: float = 0.5):
    """Maximise ``f`` over ``{A y <= b}`` by coordinate polling.

    Poll points that leave the domain are pulled back onto its boundary, so
    maxima on the boundary are reached exactly.  Returns ``(y, f(y), evals)``.
    """
    y = np.array(y0, dtype=float)
    fy = f(y)
    evals = 1
    d = len(y)
    dirs = np.vstack([np.eye(d), -np.eye(d)])
    while step >= step_min:
        best_y, best_f = None, fy
        for e in dirs:
            alpha = min(step, _ray_limit(A, b, y, e))
            if alpha <= 1e-15:
                continue
            z = y + alpha * e
            fz = f(z)
            evals += 1
            if fz > best_f + 1e-15 * abs(best_f):
                best_y, best_f = z, fz
        if best_y is None:
            step *= shrink
        else:
            y, fy = best_y, best_f
    return y, fy, evals


def _starts(A, b, lo, hi, count: int, seed: Seed) -> list[np.ndarray]:
    """Origin plus ``count`` scrambled Halton points pulled into the domain."""
    d = len(lo)
    out = [np.zeros(d)]
    if count <= 0:
        return out
    rng = seed.rng(0)
    pts = qmc.Halton(d=d, scramble=True, seed=rng).random(count)
    for u in pts:
        h = lo + u * (hi - lo)
        r = np.linalg.norm(h)
        if r > 0 and np.any(A @ h > b):
            h = h * min(1.0, poly.radial_hrep(A, b, h / r) / r)
        out.append(h)
    return out


# ---------------------------------------------------------------------------
# section functionals

class _SectionFunctional:
    """Value of a measure of ``(K - x) ∩ E`` together with per-sample contributions."""

    def __init__(self, K: poly.Polytope, E: Subspace, kind: str, i: int, cfg: CheckConfig):
        self.K, self.E, self.kind, self.i = K, E, kind, i
        self.k = E.dim
        self.exact = True
        self.seed = None
        if kind == "dual":
            self.exact = self.k == 1
            if not self.exact:
                self.seed = cfg.rng_seed
            U = _sphere_sample(self.k, cfg.directions, self.seed)
            self.AW = K.A @ (U @ E.basis).T
            self.weight = sphere_area(self.k) / self.k
        elif kind == "intrinsic" and not (i >= self.k - 1):
            self.exact = False
            self.seed = cfg.rng_seed
            self.frames = random_frames(self.k, i, cfg.directions, self.seed.rng(0))
            self.const = measures.kubota_constant(self.k, i)
        elif kind not in ("volume", "intrinsic"):
            raise ValueError(f"unknown functional {kind!r}")

    def samples(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "dual":
            # ρ(u) = 1 / max_j (a_j·u) / slack_j; zero slack gives ρ = 0 on outward rays
            inv = 1.0 / np.maximum(self.K.b - self.K.A @ x, 1e-300)
            r = 1.0 / (inv[:, None] * self.AW).max(axis=0)
            return self.weight * r ** self.i
        pts = poly._section_points(self.K, self.E, x)
        if self.kind == "volume":
            piece = poly._from_points_or_degenerate(pts, self.k)
            return np.array([piece.volume])
        if self.exact:
            return np.array([measures.intrinsic_of_points(pts, self.i)])
        pts = poly._unique_rows(pts)
        out = np.empty(len(self.frames))
        for s, fr in enumerate(self.frames):
            Y = pts @ fr.T
            if self.i == 1:
                out[s] = Y.max() - Y.min() if len(Y) else 0.0
            else:
                out[s] = poly._from_points_or_degenerate(Y, self.i).volume if len(Y) else 0.0
        return self.const * out

    def __call__(self, x) -> float:
        return float(np.mean(self.samples(x)))


def max_section_functional(K, E: Subspace, functional: str, domain: str, i: int | None = None,
                           cfg: CheckConfig | None = None, _fn=None):
    """Maximise a measure of ``(K - x) ∩ E`` over translations x.

    ``functional`` is ``volume``, ``intrinsic`` or ``dual`` (order ``i``);
    ``domain`` is ``orth_complement`` (x ∈ K|E^⊥) or ``whole_body`` (x ∈ K).
    Returns ``(x_star, Estimate, trace)``.
    """
    cfg = cfg or CheckConfig()
    K = _as_polytope(K)
    _check_subspace(K, E)
    n, k = K.ambient_dim, E.dim
    if functional == "volume":
        i = k
    if i is None or not (1 <= i <= k):
        raise ValueError(f"need 1 <= i <= k = {k}")
    fn = _fn or _SectionFunctional(K, E, functional, i, cfg)
    if domain == "orth_complement":
        C = E.complement()
        if C is None:
            x_star = np.zeros(n)
            return x_star, _estimate(fn, x_star), {"domain": domain, "evaluations": 1, "starts": 1}
        D = poly.project(K, C)
        to_x = C.embed
    elif domain == "whole_body":
        D = K
        to_x = lambda y: np.asarray(y, dtype=float)
    else:
        raise ValueError(f"unknown search domain {domain!r}")
    lo, hi = D.bounding_box()
    step0 = 0.25 * float(np.max(hi - lo))
    step_min = cfg.step_tol * K.diameter
    f = lambda y: fn(to_x(y))
    best_y, best_f, evals = None, -np.inf, 0
    starts = _starts(D.A, D.b, lo, hi, cfg.starts, cfg.search_seed.child(7))
    for y0 in starts:
        y, fy, ev = pattern_search(f, y0, D.A, D.b, step0, step_min, cfg.shrink)
        evals += ev
        if fy > best_f:
            best_y, best_f = y, fy
    x_star = to_x(best_y)
    trace = {"domain": domain, "evaluations": evals, "starts": len(starts),
             "x_star": [float(v) for v in x_star]}
    return x_star, _estimate(fn, x_star), trace


def _estimate(fn: _SectionFunctional, x) -> Estimate:
    s = fn.samples(x)
    if fn.exact:
        return Estimate(float(np.mean(s)), 0.0, 0 if len(s) == 1 else len(s), _method_label(fn))
    m = float(np.mean(s))
    return Estimate(m, float(np.std(s, ddof=1) / math.sqrt(len(s))), len(s), _method_label(fn), fn.seed)


def _method_label(fn: _SectionFunctional) -> str:
    if fn.kind == "dual":
        return "sphere_exact" if fn.exact else "sphere_mc"
    if fn.kind == "intrinsic":
        return "exact" if fn.exact else "kubota_mc"
    return "exact"


# ---------------------------------------------------------------------------
# centroid-section inequalities

_CENTROID_KINDS = {
    "volume": SharpConstantKind.CENTROID_SECTION_VOLUME,
    "intrinsic": SharpConstantKind.CENTROID_SECTION_INTRINSIC,
    "dual": SharpConstantKind.CENTROID_SECTION_DUAL,
}


def check_centroid_section(K, E: Subspace, i: int | None, measure: str,
                           cfg: CheckConfig | None = None) -> InequalityReport:
    """Central section of a centred body against the largest parallel section."""
    cfg = cfg or CheckConfig()
    if measure not in _CENTROID_KINDS:
        raise ValueError(f"unknown measure {measure!r}")
    P = _as_polytope(K)
    _check_subspace(P, E)
    _check_centered(P)
    n, k = P.ambient_dim, E.dim
    if measure == "volume":
        if i is not None and i != k:
            raise ValueError("the volume measure compares k-dimensional sections (i = k)")
        i = k
    if i is None or not (1 <= i <= k):
        raise ValueError(f"need 1 <= i <= k = {k}")
    constant = sharp_constant(_CENTROID_KINDS[measure], n, i if measure != "volume" else k)
    domain = "whole_body" if measure == "dual" else "orth_complement"
    fn = _SectionFunctional(P, E, measure, i, cfg)
    x0 = np.zeros(n)
    if fn(x0) <= 0:
        raise ValueError("central section is empty or degenerate")
    x_star, rhs, trace = max_section_functional(P, E, measure, domain, i, cfg, _fn=fn)
    lhs = _estimate(fn, x0)
    if fn.exact:
        ratio, sigma = lhs.value / rhs.value, 0.0
    else:
        ratio, sigma = ratio_stats(fn.samples(x0), fn.samples(x_star))
    return make_report(f"centroid_section_{measure}", n, k, i, lhs, rhs, constant, ratio, sigma,
                       fn.seed, lhs.samples, trace)


# ---------------------------------------------------------------------------
# half-space inequalities

def _pc_closed_form_dims(B: ProductConeBody, E: Subspace) -> int | None:
    """Dimension of ``E ∩ span(frame_q)`` when E contains the axis and the base frame."""
    if not E.contains(B.axis):
        return None
    if B.p and not all(E.contains(v) for v in B.frame_p):
        return None
    return E.dim - 1 - B.p


def _pc_slab_volume(B: ProductConeBody, qk: int, lo: float, hi: float) -> float:
    """Volume of the slices ``r0(t) B^p x r1(t) B^qk`` for t in [lo, hi]."""
    lo, hi = max(lo, B.c0), min(hi, B.c1)
    if hi <= lo:
        return 0.0
    cst = ball_volume(B.p) * ball_volume(qk)

    def f(t):
        a, b = B.slice_radii(t)
        return cst * (a ** B.p) * (b ** qk)

    return integrate(f, (lo, hi), tol=1e-15, rel_tol=1e-13)


def _halfspace_label(E: Subspace, i: int, mode: str, measure: str) -> str:
    if measure == "volume" and E.dim == E.ambient_dim:
        return "halfspace_classic"
    return f"halfspace_{mode}_{measure}"


def check_halfspace(K, E: Subspace, i: int, mode: str, measure: str, xi,
                    cfg: CheckConfig | None = None) -> InequalityReport:
    """Measure of a section or projection on E restricted to ξ^+, against the whole."""
    cfg = cfg or CheckConfig()
    if mode not in ("section", "projection"):
        raise ValueError(f"unknown mode {mode!r}")
    if measure not in ("volume", "dual"):
        raise ValueError(f"unknown measure {measure!r}")
    _check_subspace(K, E)
    _check_centered(K)
    n, k = K.ambient_dim, E.dim
    if measure == "volume" and i != k:
        raise ValueError("the volume measure needs i = k")
    if not (1 <= i <= k):
        raise ValueError(f"need 1 <= i <= k = {k}")
    xe = _unit_in(E, xi)
    xi = E.embed(xe)
    constant = sharp_constant(SharpConstantKind.HALFSPACE_DUAL, n, i)
    label = _halfspace_label(E, i, mode, measure)

    if isinstance(K, ProductConeBody):
        qk = _pc_closed_form_dims(K, E)
        along = float(xi @ K.axis)
        if qk is not None and abs(abs(along) - 1) < 1e-10 and cfg.dual_method in ("auto", "quadrature"):
            rng = (0.0, np.inf) if along > 0 else (-np.inf, 0.0)
            if measure == "volume":
                full = _pc_slab_volume(K, qk, -np.inf, np.inf)
                half = _pc_slab_volume(K, qk, *rng)
                method = "closed_form"
            else:
                full = pc_section_dual_volume(K, k, i)
                half = pc_section_dual_volume(K, k, i, rng)
                method = "closed_form_quadrature"
            return make_report(label, n, k, i, Estimate(half, 0.0, 0, method), Estimate(full, 0.0, 0, method),
                               constant, half / full, 0.0, search={"path": "product_cone"})
        if not K.is_polytopal():
            if mode != "section" or measure != "dual":
                raise ValueError("no closed form for this product-cone configuration")
            body = SectionView(K, E)
            return _dual_report(body, label, n, k, i, xe, constant, cfg, "sphere_mc")
        K = K.to_polytope()

    L = poly.section(K, E) if mode == "section" else poly.project(K, E)
    if not isinstance(L, poly.Polytope):
        raise ValueError("section through the centroid is degenerate")
    if measure == "volume":
        cut = poly.halfspace_cut(L, poly.HalfSpace(xe))
        lhs, rhs = Estimate(cut.volume), Estimate(L.volume)
        return make_report(label, n, k, i, lhs, rhs, constant, lhs.value / rhs.value, 0.0)
    return _dual_report(L, label, n, k, i, xe, constant, cfg, _dual_method(cfg, k))


def _dual_report(L, label, n, k, i, xe, constant, cfg: CheckConfig, method: str) -> InequalityReport:
    half, full, ratio, sigma = measures.dual_halfspace_ratio(L, i, xe, method, cfg.samples, cfg.seed)
    return make_report(label, n, k, i, half, full, constant, ratio, sigma, half.seed, half.samples)


def check_prop(K, E: Subspace, F: Subspace, xi, which: str,
               cfg: CheckConfig | None = None) -> InequalityReport:
    """Half-space inequality for sections-then-projections onto F (or the reverse order)."""
    cfg = cfg or CheckConfig()
    if which not in ("section_then_project", "project_then_section"):
        raise ValueError(f"unknown order {which!r}")
    _check_subspace(K, E)
    _check_subspace(K, F)
    _check_centered(K)
    if not E.contains_subspace(F):
        raise ValueError("F must be a subspace of E")
    n, k, i = K.ambient_dim, E.dim, F.dim
    xf = _unit_in(F, xi)
    constant = sharp_constant(SharpConstantKind.HALFSPACE_DUAL, n, i)
    label = f"halfspace_{which}"

    if isinstance(K, ProductConeBody):
        cone_plane = Subspace.span(np.vstack([K.axis[None, :], K.frame_p])) if K.p else Subspace.span(K.axis[None, :])
        along = float(K.axis @ F.embed(xf))
        if F.same_span(cone_plane) and abs(abs(along) - 1) < 1e-10:
            # both orders give the cone conv(r0 B^p + c0 ξ, c1 ξ) inside F
            full = _pc_slab_volume(K, 0, -np.inf, np.inf)
            half = _pc_slab_volume(K, 0, 0.0, np.inf) if along > 0 else _pc_slab_volume(K, 0, -np.inf, 0.0)
            est = lambda v: Estimate(v, 0.0, 0, "closed_form")
            return make_report(label, n, k, i, est(half), est(full), constant, half / full, 0.0,
                               search={"path": "product_cone"})
        K = _as_polytope(K)

    FE = F.relative_to(E)
    if which == "section_then_project":
        S = poly.section(K, E)
        if not isinstance(S, poly.Polytope):
            raise ValueError("central section is degenerate")
        M = poly.project(S, FE)
    else:
        PE = poly.project(K, E)
        M = poly.section(PE, FE)
        if not isinstance(M, poly.Polytope):
            raise ValueError("central section is degenerate")
    cut = poly.halfspace_cut(M, poly.HalfSpace(xf))
    lhs, rhs = Estimate(cut.volume), Estimate(M.volume)
    return make_report(label, n, k, i, lhs, rhs, constant, lhs.value / rhs.value, 0.0)


def ratio_form(report: InequalityReport) -> float:
    """Ratio between the ξ^+ and ξ^- parts, ``lhs / (rhs_raw - lhs)``."""
    lhs, rhs = report.lhs.value, report.rhs_raw.value
    if rhs - lhs <= 0:
        raise ValueError("the whole measure lies on the ξ^+ side")
    return lhs / (rhs - lhs)


# ---------------------------------------------------------------------------
# worst direction

def direction_grid(k: int, count: int | None, seed: Seed) -> np.ndarray:
    """Deterministic direction grid on S^{k-1}: uniform angles, Fibonacci sphere, or random."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        m = count or 512
        th = 2 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(th), np.sin(th)])
    if k == 3:
        m = count or 512
        j = np.arange(m) + 0.5
        z = 1 - 2 * j / m
        phi = np.pi * (3 - math.sqrt(5)) * j
        s = np.sqrt(1 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return random_directions(k, count or 2048, seed.rng(0))


def _tangent_basis(u: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(u[None, :])
    return vt[1:]


def worst_direction(K, E: Subspace, i: int, mode: str, measure: str,
                    cfg: CheckConfig | None = None):
    """Direction ξ in E minimising the half-space ratio, with its report."""
    cfg = cfg or CheckConfig()
    _check_subspace(K, E)
    _check_centered(K)
    P = _as_polytope(K)
    k = E.dim
    if measure == "volume" and i != k:
        raise ValueError("the volume measure needs i = k")
    L = poly.section(P, E) if mode == "section" else poly.project(P, E)
    if not isinstance(L, poly.Polytope):
        raise ValueError("section through the centroid is degenerate")
    if measure == "volume":
        total = L.volume
        ratio = lambda u: poly.halfspace_cut(L, poly.HalfSpace(u)).volume / total
    else:
        method = _dual_method(cfg, k)
        if method == "sphere_mc" and k > 1:
            # one radial evaluation, then every direction is a reweighting
            full, _, _ = measures._dual_contributions(L, i, method, cfg.samples, cfg.rng_seed, None)
            U, _ = measures._sphere_samples(k, cfg.samples, cfg.rng_seed)
            ratio = lambda u: float(np.mean(full * (U @ u >= 0)) / np.mean(full))
        else:
            ratio = lambda u: measures.dual_halfspace_ratio(L, i, u, method, cfg.samples, cfg.seed)[2]

    G = direction_grid(k, cfg.grid, cfg.search_seed.child(3))
    vals = np.array([ratio(u) for u in G])
    j = int(np.argmin(vals))
    u, best = G[j], float(vals[j])
    evals = len(G)
    if k == 2:
        th0 = math.atan2(u[1], u[0])
        f = lambda th: -ratio(np.array([math.cos(th[0]), math.sin(th[0])]))
        th, fv, ev = pattern_search(f, [th0], np.zeros((0, 1)), np.zeros(0), 2 * np.pi / len(G), 1e-9)
        evals += ev
        if -fv < best:
            u, best = np.array([math.cos(th[0]), math.sin(th[0])]), -fv
    elif k >= 3:
        step = math.sqrt(4 * np.pi / len(G))
        while step > 1e-7:
            T = _tangent_basis(u)
            moved = False
            for d in np.vstack([T, -T]):
                v = u + step * d
                v /= np.linalg.norm(v)
                rv = ratio(v)
                evals += 1
                if rv < best - 1e-15:
                    u, best, moved = v, rv, True
                    break
            if not moved:
                step *= 0.5
    xi = E.embed(u)
    report = check_halfspace(P, E, i, mode, measure, xi, cfg)
    report.search = {"directions": int(len(G)), "evaluations": int(evals), "xi": [float(v) for v in xi]}
    return xi, report


# ---------------------------------------------------------------------------
# sharpness sweeps

def _sweep_frames(theorem: str, n: int, k: int, i: int):
    I = np.eye(n)
    E = Subspace(I[:k])
    if theorem in ("thm1", "thm2"):
        return E, Subspace(I[:i]), I[n - 1]
    return E, Subspace(I[:i]), I[0]


def _product_intrinsic(B: ProductConeBody, s: float, k: int, i: int) -> float:
    a, b = B.slice_radii(s)
    return measures.ball_product_intrinsic_volume([B.p, k - B.p], [a, b], i)


def _thm1_row(B: ProductConeBody, k: int, i: int):
    lhs = _product_intrinsic(B, 0.0, k, i)
    f = lambda s: _product_intrinsic(B, s, k, i)
    grid = np.linspace(B.c0, B.c1, 4097)
    vals = np.array([f(s) for s in grid])
    j = int(np.argmax(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
    res = minimize_scalar(lambda s: -f(s), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    s_star, best = (res.x, -res.fun) if -res.fun > vals[j] else (grid[j], vals[j])
    return float(s_star), float(lhs / best)


def sharpness_sweep(theorem: str, n: int, k: int, i: int, eps_list, t: float | None = None,
                    cfg: CheckConfig | None = None, method: str = "quadrature") -> list[SweepRow]:
    """Ratios along a family of bodies whose limit attains a sharp constant.

    ``thm1``: intrinsic volume of the central section against the best parallel
    section (closed form over products of balls).  ``thm2``: dual volumes of the
    central section and the section through ``t ξ``.  ``thm3_section`` /
    ``thm3_projection``: hemisphere share of the dual volume; ``method`` is
    ``quadrature`` or ``sphere_mc``.
    """
    cfg = cfg or CheckConfig()
    eps = [float(e) for e in eps_list]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_list must be positive and strictly decreasing")
    if theorem not in SWEEPS:
        raise ValueError(f"unknown sweep {theorem!r}; choose from {SWEEPS}")
    if not (1 <= i <= k <= n):
        raise ValueError(f"need 1 <= i <= k <= n, got n={n}, k={k}, i={i}")
    E, F, xi = _sweep_frames(theorem, n, k, i)
    rows = []
    if theorem == "thm1":
        if not (i < k <= n - 1):
            raise ValueError("the intrinsic family needs i < k <= n-1")
        limit = sharp_constant(SharpConstantKind.CENTROID_SECTION_INTRINSIC, n, i)
        for e in eps:
            B = make_sharpness_family("thm1", n, i, e, F, xi)
            s, r = _thm1_row(B, k, i)
            rows.append(SweepRow(e, s, r, limit, abs(r - limit)))
        return rows
    if theorem == "thm2":
        if not (i < k <= n - 1):
            raise ValueError("the dual-section family needs i < k <= n-1")
        a0, b0 = (i + 1) / (n + 1), (n - i) / (n + 1)
        if t is None or not (-b0 < t < a0):
            raise ValueError(f"t must lie in ({-b0:.6g}, {a0:.6g})")
        a, b = a0 - t, b0 + t
        limit = (a0 / a) ** i
        for e in eps:
            r = dual_volume_ball_product(k, i, e * a0, b0) / dual_volume_ball_product(k, i, e * a, b)
            rows.append(SweepRow(e, float(t), r, limit, abs(r - limit)))
        return rows
    if i >= k:
        raise ValueError("the dual half-space family needs i < k")
    limit = sharp_constant(SharpConstantKind.HALFSPACE_DUAL, n, i)
    for idx, e in enumerate(eps):
        B = make_sharpness_family("thm3", n, i, e, F, xi)
        # the sections of this family on E coincide with its projections onto E
        if method == "quadrature":
            full = pc_section_dual_volume(B, k, i)
            half = pc_section_dual_volume(B, k, i, (0.0, B.c1))
            r, sr = half / full, 0.0
        elif method == "sphere_mc":
            view = SectionView(B, E)
            _, _, r, sr = measures.dual_halfspace_ratio(view, i, E.coords(xi), "sphere_mc",
                                                        cfg.samples, cfg.rng_seed.child(idx))
        else:
            raise ValueError(f"unknown sweep method {method!r}")
        rows.append(SweepRow(e, None, r, limit, abs(r - limit), sr))
    return rows


# ---------------------------------------------------------------------------
# randomized theorem suites

SUITE_MEASURES = ("volume", "intrinsic", "dual")


def suite_reports(n: int, k: int, i: int, bodies: int = 50, directions: int = 8, vertices: int | None = None,
                  measures_: tuple = SUITE_MEASURES, cfg: CheckConfig | None = None) -> list[InequalityReport]:
    """Centroid-section and half-space checks on random centred polytopes.

    Body ``b`` draws its polytope, subspace and directions from child seed ``b``,
    so any single report can be re-run on its own.
    """
    from .core import random_subspace

    cfg = cfg or CheckConfig()
    base = cfg.rng_seed
    m = vertices or 3 * n + 6
    out = []
    for b in range(bodies):
        sb = base.child(b)
        K = poly.random_centered_polytope(n, m, sb.child(0))
        E = random_subspace(n, k, sb.child(1))
        bcfg = CheckConfig(seed=sb.child(2), samples=cfg.samples, directions=cfg.directions,
                           starts=cfg.starts, shrink=cfg.shrink, step_tol=cfg.step_tol,
                           dual_method=cfg.dual_method, grid=cfg.grid)
        for meas in measures_:
            out.append(check_centroid_section(K, E, k if meas == "volume" else i, meas, bcfg))
        U = random_directions(k, directions, sb.child(3).rng(0))
        for u in U:
            xi = E.embed(u)
            for mode in ("section", "projection"):
                if i == k:
                    out.append(check_halfspace(K, E, i, mode, "volume", xi, bcfg))
                out.append(check_halfspace(K, E, i, mode, "dual", xi, bcfg))
    return out
