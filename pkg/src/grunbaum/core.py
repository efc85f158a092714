"""Linear algebra over R^n, Grassmannian sampling and quadrature, with the sharp constants."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _quadpack

GRAM_TOL = 1e-10
GENERATOR = "PCG64"


class IntegrationError(RuntimeError):
    """Adaptive quadrature ran out of budget; ``value`` holds the partial estimate."""

    def __init__(self, message: str, value: float, abserr: float):
        super().__init__(f"{message} (partial value {value!r}, error estimate {abserr:.3g})")
        self.value = value
        self.abserr = abserr


# ---------------------------------------------------------------------------
# constants

def ball_volume(d: int) -> float:
    """Volume of the unit Euclidean ball in R^d."""
    if d < 0:
        raise ValueError(f"dimension must be >= 0, got {d}")
    if d == 0:
        return 1.0
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def sphere_area(d: int) -> float:
    """Measure of the unit sphere S^{d-1} in R^d, i.e. d * ball_volume(d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return d * ball_volume(d)


class SharpConstantKind(str, enum.Enum):
    CENTROID_SECTION_VOLUME = "centroid_section_volume"
    CENTROID_SECTION_INTRINSIC = "centroid_section_intrinsic"
    CENTROID_SECTION_DUAL = "centroid_section_dual"
    HALFSPACE_DUAL = "halfspace_dual"
    HALFSPACE_VOLUME = "halfspace_volume"
    HALFSPACE_RATIO = "halfspace_ratio"


def _pow_ratio(num: int, den: int, power: int) -> float:
    # (num/den)**power without losing digits when num/den is close to 1
    if num == den:
        return 1.0
    return math.exp(power * math.log1p((num - den) / den))


def sharp_constant(kind: SharpConstantKind | str, n: int, i: int) -> float:
    """Best constant of the named inequality in ambient dimension ``n``.

    For the volume kinds ``i`` plays the role of the section dimension k.
    """
    kind = SharpConstantKind(kind)
    if not (1 <= i <= n):
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    if kind in (
        SharpConstantKind.CENTROID_SECTION_VOLUME,
        SharpConstantKind.CENTROID_SECTION_INTRINSIC,
        SharpConstantKind.CENTROID_SECTION_DUAL,
    ):
        return _pow_ratio(i + 1, n + 1, i)
    if kind in (SharpConstantKind.HALFSPACE_DUAL, SharpConstantKind.HALFSPACE_VOLUME):
        return _pow_ratio(i, n + 1, i)
    # halfspace_ratio: c / (1 - c) with c = (i/(n+1))^i
    c = _pow_ratio(i, n + 1, i)
    return c / (1.0 - c)


# ---------------------------------------------------------------------------
# seeds

@dataclass(frozen=True)
class Seed:
    """Explicit 64-bit seed plus an integer stream label.

    Every random draw in the package goes through :meth:`rng`, so a sample
    block is a pure function of ``(value, stream, index)``.
    """

    value: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.value < 2**64):
            raise ValueError(f"seed value must be a 64-bit unsigned integer, got {self.value}")
        if self.stream < 0:
            raise ValueError("stream label must be non-negative")

    def rng(self, index: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.value, spawn_key=(self.stream, index))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, label: int) -> "Seed":
        ss = np.random.SeedSequence(self.value, spawn_key=(self.stream, 0xC0FFEE, label))
        return Seed(self.value, int(ss.generate_state(1, np.uint64)[0]))

    def to_dict(self) -> dict:
        return {"value": self.value, "stream": self.stream, "generator": GENERATOR}


def as_seed(seed: Seed | int | None) -> Seed:
    if seed is None:
        raise ValueError("a seed is mandatory for stochastic operations")
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


# ---------------------------------------------------------------------------
# subspaces

def orthonormalize(vectors, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Raises ``ValueError`` when the input is (numerically) rank deficient.
    """
    V = np.array(vectors, dtype=float, ndmin=2)
    Q = np.zeros_like(V)
    for j, v in enumerate(V):
        w = v.copy()
        scale = np.linalg.norm(w)
        for _ in range(2):
            for q in Q[:j]:
                w -= (q @ w) * q
        nrm = np.linalg.norm(w)
        if scale == 0.0 or nrm <= tol * max(scale, 1.0):
            raise ValueError("vectors are linearly dependent")
        Q[j] = w / nrm
    return Q


def orthonormalize_batch(G: np.ndarray) -> np.ndarray:
    """Row-wise modified Gram-Schmidt (two passes) on a stack of shape (N, d, n)."""
    Q = np.array(G, dtype=float)
    d = Q.shape[1]
    for j in range(d):
        for _ in range(2):
            for l in range(j):
                proj = np.einsum("ij,ij->i", Q[:, l], Q[:, j])
                Q[:, j] -= proj[:, None] * Q[:, l]
        Q[:, j] /= np.linalg.norm(Q[:, j], axis=1)[:, None]
    return Q


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n given by an orthonormal basis (rows of ``basis``)."""

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        B = np.array(self.basis, dtype=float, ndmin=2)
        if B.ndim != 2 or B.shape[0] < 1 or B.shape[0] > B.shape[1]:
            raise ValueError(f"basis must have shape (d, n) with 1 <= d <= n, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise ValueError("basis has non-finite entries")
        gram = B @ B.T
        if np.max(np.abs(gram - np.eye(B.shape[0]))) > GRAM_TOL:
            raise ValueError("basis is not orthonormal within 1e-10")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    @classmethod
    def span(cls, vectors) -> "Subspace":
        return cls(orthonormalize(vectors))

    @classmethod
    def coordinate(cls, n: int, axes: Sequence[int]) -> "Subspace":
        return cls(np.eye(n)[list(axes)])

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n))

    def coords(self, x) -> np.ndarray:
        """Coordinates of (the projection of) ``x`` in this basis."""
        return np.asarray(x, dtype=float) @ self.basis.T

    def embed(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.basis

    def project(self, x) -> np.ndarray:
        return self.embed(self.coords(x))

    def contains(self, v, tol: float = 1e-10) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v - self.project(v)) <= tol * max(1.0, np.linalg.norm(v)))

    def contains_subspace(self, other: "Subspace", tol: float = 1e-10) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def same_span(self, other: "Subspace", tol: float = 1e-10) -> bool:
        return self.dim == other.dim and self.contains_subspace(other, tol)

    def complement(self) -> "Subspace | None":
        """Orthogonal complement, or ``None`` when this is the whole space."""
        n, d = self.ambient_dim, self.dim
        if d == n:
            return None
        _, _, vt = np.linalg.svd(self.basis)
        rest = vt[d:]
        return Subspace(orthonormalize(rest))

    def relative_to(self, outer: "Subspace") -> "Subspace":
        """This subspace written in the coordinates of ``outer`` (which must contain it)."""
        if not outer.contains_subspace(self, 1e-8):
            raise ValueError("subspace is not contained in the outer subspace")
        return Subspace(orthonormalize(outer.coords(self.basis)))

    def intersect_orthogonal(self, v) -> "Subspace | None":
        """The subspace ``self ∩ v^⊥`` for a vector ``v`` lying in ``self``."""
        v = np.asarray(v, dtype=float)
        c = self.coords(v)
        c = c / np.linalg.norm(c)
        if self.dim == 1:
            return None
        _, _, vt = np.linalg.svd(c[None, :])
        return Subspace(orthonormalize(vt[1:] @ self.basis))


def random_subspace(n: int, d: int, seed: Seed | int) -> Subspace:
    """Haar-random ``d``-dimensional subspace of R^n."""
    if not (1 <= d <= n):
        raise ValueError(f"need 1 <= d <= n, got n={n}, d={d}")
    rng = as_seed(seed).rng(0)
    return Subspace(orthonormalize(rng.standard_normal((d, n))))


def random_subspace_within(E: Subspace, d: int, seed: Seed | int) -> Subspace:
    """Haar-random ``d``-dimensional subspace of ``E``."""
    if not (1 <= d <= E.dim):
        raise ValueError(f"need 1 <= d <= dim(E) = {E.dim}, got {d}")
    local = random_subspace(E.dim, d, seed)
    return Subspace(orthonormalize(E.embed(local.basis)))


def random_frames(n: int, d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Haar frames, shape (count, d, n)."""
    G = rng.standard_normal((count, d, n))
    if d == 1:
        return G / np.linalg.norm(G, axis=2)[:, :, None]
    return orthonormalize_batch(G)


def random_directions(k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on S^{k-1}, shape (count, k)."""
    G = rng.standard_normal((count, k))
    return G / np.linalg.norm(G, axis=1)[:, None]


# ---------------------------------------------------------------------------
# quadrature

def integrate(
    f: Callable,
    domain,
    tol: float = 1e-10,
    rel_tol: float = 1e-12,
    limit: int = 2000,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive integral of ``f`` over an interval ``(a, b)`` or a rectangle.

    A rectangle is given as ``((a, b), (c, d))`` and ``f(x, y)`` is integrated
    iteratively, ``y`` innermost.  The inner bounds may be callables of ``x``.
    Integrable endpoint singularities are handled by the adaptive bisection.
    Raises :class:`IntegrationError` when the subdivision budget is exhausted
    without meeting ``max(tol, rel_tol * |I|)``.
    """
    if tol <= 0 and rel_tol <= 0:
        raise ValueError("need a positive tolerance")
    dom = list(domain)
    if len(dom) == 2 and np.isscalar(dom[0]):
        return _integrate_1d(f, float(dom[0]), float(dom[1]), tol, rel_tol, limit, points)
    (a, b), (c, d) = dom

    def inner(x):
        lo = c(x) if callable(c) else c
        hi = d(x) if callable(d) else d
        if hi <= lo:
            return 0.0
        return _integrate_1d(lambda y: f(x, y), lo, hi, tol, rel_tol, limit, None)

    return _integrate_1d(inner, float(a), float(b), tol, rel_tol, limit, points)


def _integrate_1d(f, a, b, tol, rel_tol, limit, points):
    if a == b:
        return 0.0
    kw = {}
    if points is not None:
        pts = sorted(p for p in points if min(a, b) < p < max(a, b))
        if pts:
            kw["points"] = pts
    out = _quadpack.quad(
        f, a, b, epsabs=tol, epsrel=rel_tol, limit=limit, full_output=1, **kw
    )
    val, err = out[0], out[1]
    if len(out) > 3:
        # quad only appends a message when ier != 0
        ier_msg = out[3]
        ok = err <= max(tol, rel_tol * abs(val)) * 10.0
        if not ok:
            raise IntegrationError(f"quadrature did not converge on [{a}, {b}]: {ier_msg.splitlines()[0]}",
                                   val, err)
    return float(val)


def beta_moment(n: int, i: int) -> float:
    """First axial moment of the (i-1, n-i) product-cone weight about its centroid.

    Evaluates ``int t^{n-i+1}(1-t)^{i-1} - (n-i+1)/(n+1) int t^{n-i}(1-t)^{i-1}``
    over [0, 1] by quadrature; the result vanishes identically.
    """
    if not (1 <= i <= n):
        raise ValueError(f"need 1 <= i <= n, got n={n}, i={i}")
    first = integrate(lambda t: t ** (n - i + 1) * (1 - t) ** (i - 1), (0.0, 1.0), tol=1e-15, rel_tol=1e-14)
    zeroth = integrate(lambda t: t ** (n - i) * (1 - t) ** (i - 1), (0.0, 1.0), tol=1e-15, rel_tol=1e-14)
    return first - (n - i + 1) / (n + 1) * zeroth
