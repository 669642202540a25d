"""Weak geodesics as convex envelopes of the space-time boundary data.

The envelope of the boundary values on ``U x [0, 1]`` is the lower convex
hull of the lifted boundary graph. With ``n = 1`` the lifted samples live in
3-space and the hull facets triangulate the rectangle; for any ``n`` the
value at a query point is a small linear program over convex combinations of
the samples.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .expr import ScalarField
from .grid import GridField, SpaceDomain, SpaceTimeGrid
from .potential import BOUNDARY_TOL, space_variables

__all__ = [
    "EnvelopeError",
    "BoundarySamples",
    "HullEnvelope",
    "ContactSet",
    "Barrier",
    "assemble_boundary",
    "assemble_boundary_nd",
    "solve_envelope_hull",
    "solve_envelope_lp",
    "contact_set",
    "barrier",
    "envelope_grid",
]


class EnvelopeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    """Boundary points ``(x..., t)`` with prescribed values.

    ``face`` labels each sample: 0 for ``t = 0``, 1 for ``t = 1``, 2 for the
    lateral boundary ``dU x (0, 1)``. Corners are stored once, on the lateral
    face, with value 0.
    """

    points: np.ndarray
    values: np.ndarray
    face: np.ndarray

    @property
    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.face == k)) for k, name in enumerate(("t0", "t1", "side"))}

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1


def _check_vanishing(name: str, f: ScalarField, pts: np.ndarray):
    vals = np.abs(np.asarray(f(pts[:, 0]), dtype=float) * np.ones(len(pts)))
    if np.max(vals) > BOUNDARY_TOL:
        raise EnvelopeError(
            f"{name} does not vanish on the space boundary (max |value| {np.max(vals):.3g})"
        )


def assemble_boundary(phi0: ScalarField, phi1: ScalarField, dom: SpaceDomain,
                      grid: SpaceTimeGrid, lateral=None) -> BoundarySamples:
    """Samples on all four faces of ``[a, b] x [0, 1]`` at grid resolution.

    The lateral faces carry 0 unless ``lateral = (ga, gb)`` gives their values
    as functions of ``t``; those must match the potentials at the corners.
    """
    if dom.dim != 1:
        raise EnvelopeError("use assemble_boundary_nd for n >= 2")
    space_variables(phi0, dom)
    space_variables(phi1, dom)
    x, t = grid.x, grid.t
    if lateral is None:
        ends = np.array([[dom.a], [dom.b]])
        _check_vanishing("phi0", phi0, ends)
        _check_vanishing("phi1", phi1, ends)
        side = (np.zeros(t.size), np.zeros(t.size))
    else:
        side = tuple(np.asarray(g(t), dtype=float) * np.ones(t.size) for g in lateral)
        for vals, xe in zip(side, (dom.a, dom.b)):
            if abs(vals[0] - phi0(xe)) > BOUNDARY_TOL or abs(vals[-1] - phi1(xe)) > BOUNDARY_TOL:
                raise EnvelopeError(f"lateral data at x={xe:g} does not match the potentials at the corners")
    xi = x[1:-1]
    pts = [np.column_stack([xi, np.zeros_like(xi)]), np.column_stack([xi, np.ones_like(xi)])]
    vals = [phi0(xi) * np.ones_like(xi), phi1(xi) * np.ones_like(xi)]
    faces = [np.zeros(xi.size, int), np.ones(xi.size, int)]
    for xe, sv in zip((dom.a, dom.b), side):
        pts.append(np.column_stack([np.full(t.size, xe), t]))
        vals.append(sv)
        faces.append(np.full(t.size, 2))
    return BoundarySamples(np.vstack(pts), np.concatenate(vals), np.concatenate(faces))


def assemble_boundary_nd(phi0: ScalarField, phi1: ScalarField, dom: SpaceDomain,
                         space_samples: int, t_levels: int) -> BoundarySamples:
    """Boundary samples for an ``n``-d space domain (ball or polygon)."""
    names = space_variables(phi0, dom)
    space_variables(phi1, dom)
    inner = dom.sample(space_samples)
    bnd = dom.boundary_samples(max(8, int(np.sqrt(space_samples)) * 4))

    def ev(f, pts):
        return np.asarray(f(**{n: pts[:, k] for k, n in enumerate(names)}), float) * np.ones(len(pts))

    for name, f in (("phi0", phi0), ("phi1", phi1)):
        if np.max(np.abs(ev(f, bnd))) > BOUNDARY_TOL:
            raise EnvelopeError(f"{name} does not vanish on the space boundary")
    on_bnd = ~dom.contains(inner, tol=-1e-12)
    inner = inner[~on_bnd]
    ts = np.linspace(0.0, 1.0, t_levels)
    side = np.vstack([np.column_stack([bnd, np.full(len(bnd), tk)]) for tk in ts])
    pts = np.vstack([
        np.column_stack([inner, np.zeros(len(inner))]),
        np.column_stack([inner, np.ones(len(inner))]),
        side,
    ])
    vals = np.concatenate([ev(phi0, inner), ev(phi1, inner), np.zeros(len(side))])
    face = np.concatenate([np.zeros(len(inner), int), np.ones(len(inner), int), np.full(len(side), 2)])
    return BoundarySamples(pts, vals, face)


# ------------------------------------------------------------------- lower hull


@dataclass(frozen=True, eq=False)
class HullEnvelope:
    """Lower hull of lifted samples ``(x, t, g)``.

    ``facets`` holds counter-clockwise vertex triples; ``planes`` holds
    ``(a, b, c)`` with ``g = a*x + b*t + c`` on each facet. The hull is the
    pointwise maximum of its facet planes, which is how it is evaluated.
    """

    points: np.ndarray
    facets: np.ndarray
    planes: np.ndarray
    samples: BoundarySamples | None = None

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast(x, t).shape
        qx = np.ascontiguousarray(np.broadcast_to(x, shape).ravel())
        qt = np.ascontiguousarray(np.broadcast_to(t, shape).ravel())
        self._check_inside(qx, qt)
        best, _ = kernels.max_plane(self.planes[:, 0].copy(), self.planes[:, 1].copy(),
                                    self.planes[:, 2].copy(), qx, qt)
        return best.reshape(shape) if shape else float(best[0])

    def _check_inside(self, qx, qt, tol=1e-12):
        lo = self.points[:, :2].min(axis=0)
        hi = self.points[:, :2].max(axis=0)
        span = np.max(hi - lo)
        if (np.any(qx < lo[0] - tol * span) or np.any(qx > hi[0] + tol * span)
                or np.any(qt < lo[1] - tol * span) or np.any(qt > hi[1] + tol * span)):
            raise EnvelopeError("query outside the sampled domain")

    def to_json(self) -> str:
        return json.dumps({
            "points": [[float(f"{v:.17g}") for v in p] for p in self.points],
            "facets": self.facets.tolist(),
        })

    @classmethod
    def from_json(cls, text: str | Path) -> "HullEnvelope":
        if isinstance(text, Path) or (isinstance(text, str) and not text.lstrip().startswith("{")):
            text = Path(text).read_text()
        data = json.loads(text)
        pts = np.asarray(data["points"], dtype=float)
        facets = np.asarray(data["facets"], dtype=np.intp)
        return cls(pts, facets, _planes(pts, facets))


def _planes(pts: np.ndarray, facets: np.ndarray) -> np.ndarray:
    P0, P1, P2 = pts[facets[:, 0]], pts[facets[:, 1]], pts[facets[:, 2]]
    n = np.cross(P1 - P0, P2 - P0)
    if np.any(n[:, 2] <= 0):
        raise EnvelopeError("degenerate or mis-oriented facet")
    a = -n[:, 0] / n[:, 2]
    b = -n[:, 1] / n[:, 2]
    c = P0[:, 2] - a * P0[:, 0] - b * P0[:, 1]
    return np.column_stack([a, b, c])


def _generic_weights(m: int) -> np.ndarray:
    return np.random.default_rng(20190611).random(m)


def _projected_hull_corners(X: np.ndarray, T: np.ndarray) -> list[int]:
    order = sorted(range(X.size), key=lambda k: (X[k], T[k]))

    def cross(o, a, b):
        return (X[a] - X[o]) * (T[b] - T[o]) - (T[a] - T[o]) * (X[b] - X[o])

    lower, upper = [], []
    for k in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], k) <= 0:
            lower.pop()
        lower.append(k)
    for k in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], k) <= 0:
            upper.pop()
        upper.append(k)
    return lower[:-1] + upper[:-1]


def _seed_edge(X, T, G, Q, W, scale) -> tuple[int, int]:
    """First lower-hull edge along the projected hull, counter-clockwise from the lexicographic minimum."""
    corners = _projected_hull_corners(X, T)
    if len(corners) < 3:
        raise EnvelopeError("boundary samples are affinely degenerate")
    c0, c1 = corners[0], corners[1]
    ex, et = X[c1] - X[c0], T[c1] - T[c0]
    L = np.hypot(ex, et)
    rx, rt = X - X[c0], T - T[c0]
    along = (rx * ex + rt * et) / L
    off = np.abs(ex * rt - et * rx)
    on = np.flatnonzero((off <= 1e-12 * L * scale) & (along > 1e-12 * scale))
    best = None
    for V in (G, Q):
        slope = (V[on] - V[c0]) / along[on]
        tol = 1e-12 * (np.abs(V[on]) + abs(V[c0]) + 1.0) / along[on]
        keep = slope <= slope.min() + tol
        on = on[keep]
        if on.size == 1:
            best = int(on[0])
            break
    if best is None:
        best = int(on[np.argmin((W[on] - W[c0]) / along[on])])
    return c0, best


def solve_envelope_hull(b: BoundarySamples) -> HullEnvelope:
    """Lower convex hull of the lifted boundary samples (space-time dimension 2)."""
    if b.dim != 1:
        raise EnvelopeError("the hull solver handles n = 1; use solve_envelope_lp")
    pts = np.column_stack([b.points, b.values])
    X = np.ascontiguousarray(pts[:, 0])
    T = np.ascontiguousarray(pts[:, 1])
    G = np.ascontiguousarray(pts[:, 2])
    if X.size < 4:
        raise EnvelopeError("need at least four boundary samples")
    Q = X * X + T * T
    W = _generic_weights(X.size)
    scale = float(np.hypot(np.ptp(X), np.ptp(T)))
    if scale == 0.0:
        raise EnvelopeError("boundary samples are affinely degenerate")
    i0, j0 = _seed_edge(X, T, G, Q, W, scale)

    facets = []
    done: set[tuple[int, int]] = set()
    queue = deque([(i0, j0)])
    while queue:
        i, j = queue.popleft()
        if (i, j) in done:
            continue
        k = kernels.pivot(X, T, G, Q, W, i, j, scale)
        if k < 0:
            continue
        facets.append((i, j, k))
        done.update(((i, j), (j, k), (k, i)))
        for e in ((k, j), (i, k)):
            if e not in done:
                queue.append(e)
    F = np.array(facets, dtype=np.intp)
    _check_tiling(X, T, F)
    return HullEnvelope(pts, F, _planes(pts, F), b)


def _check_tiling(X, T, F):
    corners = _projected_hull_corners(X, T)
    cx, ct = X[corners], T[corners]
    area = 0.5 * np.sum(cx * np.roll(ct, -1) - np.roll(cx, -1) * ct)
    a = 0.5 * ((X[F[:, 1]] - X[F[:, 0]]) * (T[F[:, 2]] - T[F[:, 0]])
               - (T[F[:, 1]] - T[F[:, 0]]) * (X[F[:, 2]] - X[F[:, 0]]))
    if np.any(a <= 0) or abs(a.sum() - area) > 1e-9 * area:
        raise EnvelopeError(
            f"hull facets do not tile the domain (area {a.sum():.15g} vs {area:.15g})"
        )


# ---------------------------------------------------------------- LP route


def solve_envelope_lp(b: BoundarySamples, queries) -> np.ndarray:
    """Envelope values by minimising ``sum(l_i g_i)`` over convex combinations hitting each query.

    The LP vertex solution is supported on at most ``n + 2`` samples; the
    barycentric system on that support is re-solved directly so the value is
    accurate to rounding rather than to the LP tolerance.
    """
    P = b.points
    g = b.values
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    if Q.shape[1] != P.shape[1]:
        raise EnvelopeError(f"queries must have {P.shape[1]} coordinates")
    A_eq = np.vstack([P.T, np.ones(len(P))])
    out = np.empty(len(Q))
    for k, q in enumerate(Q):
        res = linprog(g, A_eq=A_eq, b_eq=np.append(q, 1.0), bounds=(0, None), method="highs")
        if res.status == 2:
            raise EnvelopeError(f"query {q.tolist()} lies outside the hull of the samples")
        if res.status != 0:
            raise EnvelopeError(f"LP failed at {q.tolist()}: {res.message}")
        out[k] = _polish(A_eq, g, q, res.x, res.fun)
    return out


def _polish(A_eq, g, q, lam, fallback):
    support = np.flatnonzero(lam > 1e-9)
    if support.size == 0 or support.size > A_eq.shape[0]:
        return float(fallback)
    M = A_eq[:, support]
    rhs = np.append(q, 1.0)
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.any(sol < -1e-9) or np.linalg.norm(M @ sol - rhs) > 1e-12:
        return float(fallback)
    return float(sol @ g[support])


# ----------------------------------------------------------------- contact sets


@dataclass(frozen=True)
class ContactSet:
    """Lifted boundary samples whose convex combination realises the envelope at ``query``."""

    query: tuple[float, float]
    facet: int
    indices: tuple[int, ...]
    points: np.ndarray
    weights: np.ndarray
    value: float
    on_boundary: bool = False

    @property
    def active(self) -> np.ndarray:
        """Samples with positive weight."""
        return self.points[self.weights > 1e-12]


def contact_set(env: HullEnvelope, p) -> ContactSet:
    """Vertices and barycentric weights of the facet containing ``p``; lowest facet index on ties."""
    x, t = float(p[0]), float(p[1])
    P = env.points
    F = env.facets
    A, B, C = P[F[:, 0], :2], P[F[:, 1], :2], P[F[:, 2], :2]
    det = (B[:, 0] - A[:, 0]) * (C[:, 1] - A[:, 1]) - (B[:, 1] - A[:, 1]) * (C[:, 0] - A[:, 0])
    l1 = ((B[:, 0] - x) * (C[:, 1] - t) - (B[:, 1] - t) * (C[:, 0] - x)) / det
    l2 = ((C[:, 0] - x) * (A[:, 1] - t) - (C[:, 1] - t) * (A[:, 0] - x)) / det
    l3 = 1.0 - l1 - l2
    lam = np.column_stack([l1, l2, l3])
    worst = lam.min(axis=1)
    inside = np.flatnonzero(worst >= -1e-12)
    on_boundary = inside.size == 0
    f = int(inside[0]) if inside.size else int(np.argmax(worst))
    w = np.clip(lam[f], 0.0, None)
    w = w / w.sum()
    idx = tuple(int(i) for i in F[f])
    verts = P[list(idx)]
    return ContactSet((x, t), f, idx, verts, w, float(w @ verts[:, 2]), on_boundary)


# --------------------------------------------------------------------- barrier


@dataclass(frozen=True)
class Barrier:
    """Convex minorant ``h`` and chord majorant ``t*phi1 + (1-t)*phi0`` of the boundary data."""

    C: float
    phi0: ScalarField
    phi1: ScalarField

    def lower(self, x, t):
        p0 = np.asarray(self.phi0(x), float)
        p1 = np.asarray(self.phi1(x), float)
        return np.maximum(np.maximum(p0 - self.C * t, p1 - self.C * (1 - t)), p0 + p1)

    def upper(self, x, t):
        return t * np.asarray(self.phi1(x), float) + (1 - t) * np.asarray(self.phi0(x), float)


def barrier(phi0: ScalarField, phi1: ScalarField, dom: SpaceDomain, samples: int = 4097) -> Barrier:
    """``C = sup |phi0 - phi1| + 1`` over a dense sample of the closed interval."""
    xs = dom.sample(samples)[:, 0]
    gap = np.max(np.abs(np.asarray(phi0(xs)) - np.asarray(phi1(xs))))
    return Barrier(float(gap) + 1.0, phi0, phi1)


def envelope_grid(phi0: ScalarField, phi1: ScalarField, dom: SpaceDomain,
                  grid: SpaceTimeGrid, lateral=None) -> tuple[GridField, HullEnvelope]:
    """Envelope sampled at the grid nodes, boundary nodes carrying the exact data."""
    b = assemble_boundary(phi0, phi1, dom, grid, lateral)
    env = solve_envelope_hull(b)
    X, T = grid.mesh()
    U = env(X, T)
    U[0, :] = phi0(grid.x)
    U[-1, :] = phi1(grid.x)
    side = b.face == 2
    U[:, 0] = b.values[side][: grid.nt]
    U[:, -1] = b.values[side][grid.nt:]
    return GridField(grid, U, "envelope"), env
