"""Membership in the space of strictly convex potentials and gradient images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import ScalarField
from .grid import SpaceDomain

__all__ = [
    "PotentialDiagnostics",
    "NotConvexError",
    "validate_potential",
    "gradient_image",
    "images_equal",
    "GradientImage",
    "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-9


class NotConvexError(ValueError):
    pass


@dataclass(frozen=True)
class PotentialDiagnostics:
    min_hessian_eig: float
    argmin: tuple[float, ...]
    max_boundary_abs: float
    member: bool


def space_variables(f: ScalarField, dom: SpaceDomain) -> tuple[str, ...]:
    if "t" in f.free_variables:
        raise ValueError("potential must not depend on t")
    if dom.dim == 1:
        names = ("x",)
    else:
        names = tuple(v for v in f.variables if v != "t")
    if len(names) != dom.dim or not f.free_variables <= set(names):
        raise ValueError(
            f"field over {f.variables} does not match a {dom.dim}-d domain"
        )
    return names


def _eval_at(f: ScalarField, names, pts: np.ndarray) -> np.ndarray:
    kwargs = {n: pts[:, k] for k, n in enumerate(names)}
    if "t" in f.variables and "t" not in kwargs:
        kwargs["t"] = np.zeros(len(pts))
    return np.asarray(f(**kwargs), dtype=float) * np.ones(len(pts))


def hessian_at(f: ScalarField, names, pts: np.ndarray) -> np.ndarray:
    """Exact Hessians at ``pts``, shape ``(m, n, n)``."""
    n = len(names)
    H = np.empty((len(pts), n, n))
    for i, a in enumerate(names):
        fa = f.diff(a)
        for j in range(i, n):
            H[:, i, j] = H[:, j, i] = _eval_at(fa.diff(names[j]), names, pts)
    return H


def gradient_at(f: ScalarField, names, pts: np.ndarray) -> np.ndarray:
    return np.column_stack([_eval_at(f.diff(a), names, pts) for a in names])


def validate_potential(f: ScalarField, dom: SpaceDomain, samples: int = 1281) -> PotentialDiagnostics:
    """Check ``D^2 f > 0`` on a dense sample of the closed domain and ``f = 0`` on its boundary."""
    names = space_variables(f, dom)
    pts = dom.sample(samples)
    H = hessian_at(f, names, pts)
    eig = H[:, 0, 0] if dom.dim == 1 else np.linalg.eigvalsh(H)[:, 0]
    k = int(np.argmin(eig))
    bnd = dom.boundary_samples(max(64, samples // 4))
    bvals = np.abs(_eval_at(f, names, bnd))
    max_b = float(bvals.max())
    min_eig = float(eig[k])
    return PotentialDiagnostics(
        min_hessian_eig=min_eig,
        argmin=tuple(float(c) for c in pts[k]),
        max_boundary_abs=max_b,
        member=bool(min_eig > 0 and max_b <= BOUNDARY_TOL),
    )


@dataclass(frozen=True)
class GradientImage:
    """Open interval ``(lo, hi)`` in 1-d; sampled gradient cloud with hull in n-d."""

    dim: int
    lo: float = float("nan")
    hi: float = float("nan")
    points: np.ndarray | None = None
    hull: np.ndarray | None = None

    def __str__(self) -> str:
        if self.dim == 1:
            return f"({self.lo:.12g},{self.hi:.12g})"
        return f"hull of {len(self.hull)} vertices"

    def to_json(self) -> dict:
        if self.dim == 1:
            return {"dim": 1, "interval": [self.lo, self.hi]}
        return {"dim": self.dim, "hull": self.hull.tolist()}


def gradient_image(f: ScalarField, dom: SpaceDomain, samples: int = 1281) -> GradientImage:
    diag = validate_potential(f, dom, samples) if dom.dim > 1 else None
    names = space_variables(f, dom)
    if dom.dim == 1:
        xs = dom.sample(samples)
        if np.any(hessian_at(f, names, xs)[:, 0, 0] <= 0):
            raise NotConvexError("potential is not strictly convex on the closed interval")
        d = f.diff("x")
        return GradientImage(1, lo=float(d(dom.a)), hi=float(d(dom.b)))
    if diag.min_hessian_eig <= 0:
        raise NotConvexError("potential is not strictly convex on the closed domain")
    if dom.dim != 2:
        raise NotImplementedError("gradient-image hulls implemented for n <= 2")
    pts = gradient_at(f, names, dom.sample(samples))
    return GradientImage(dom.dim, points=pts, hull=convex_hull_2d(pts))


def convex_hull_2d(pts: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices by Andrew's monotone chain."""
    P = sorted(map(tuple, np.asarray(pts, dtype=float)))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in P:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(P):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _point_polygon_distance(p: np.ndarray, poly: np.ndarray) -> float:
    a = poly
    b = np.roll(poly, -1, axis=0)
    e = b - a
    rel = p - a
    if np.all(e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0] >= 0):
        return 0.0
    s = np.clip(np.einsum("ij,ij->i", rel, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    return float(np.min(np.linalg.norm(rel - s[:, None] * e, axis=1)))


def hausdorff_convex(P: np.ndarray, Q: np.ndarray) -> float:
    """Hausdorff distance between two filled convex polygons (attained at vertices)."""
    d1 = max(_point_polygon_distance(p, Q) for p in P)
    d2 = max(_point_polygon_distance(q, P) for q in Q)
    return max(d1, d2)


def images_equal(f: ScalarField, g: ScalarField, dom: SpaceDomain, tol: float = 1e-8,
                 samples: int = 1281) -> bool:
    a = gradient_image(f, dom, samples)
    b = gradient_image(g, dom, samples)
    return image_distance(a, b) <= tol


def image_distance(a: GradientImage, b: GradientImage) -> float:
    if a.dim == 1:
        return max(abs(a.lo - b.lo), abs(a.hi - b.hi))
    return hausdorff_convex(a.hull, b.hull)
