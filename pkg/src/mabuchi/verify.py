"""Numerical checks on sampled space-time fields.

Every check returns a :class:`CheckResult`; :func:`run_checks` collects a
requested subset in a fixed order into a :class:`VerificationReport`.
Arrays follow the :class:`~mabuchi.grid.GridField` layout ``values[j, i] =
u(x_i, t_j)``; Hessians are ordered ``(x, t)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .expr import ScalarField
from .grid import GridField, SpaceTimeGrid

__all__ = [
    "CheckResult",
    "VerificationReport",
    "CheckRegion",
    "GridMismatch",
    "fd_hessian",
    "fd_hessian4",
    "fd_gradient",
    "directional_min_eig",
    "ma_residual",
    "convexity_check",
    "barrier_check",
    "lipschitz_constant",
    "c11_seminorm",
    "blowup_probe",
    "gluing_check",
    "energy",
    "quadratic_growth_check",
    "run_checks",
    "CHECK_ORDER",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 20190611

# calibrated once against the closed-form real example (see tests)
MA_MEAN_C = 1.0
CONVEXITY_C = 1.0
BARRIER_SLACK_C = 5.0


class GridMismatch(ValueError):
    pass


@dataclass
class CheckResult:
    name: str
    status: str
    measured: float | list | None
    tolerance: float | list | None
    worst_point: tuple[float, float] | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "measured": _jsonable(self.measured),
            "tolerance": _jsonable(self.tolerance),
            "worst_point": None if self.worst_point is None else [float(v) for v in self.worst_point],
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(a) for a in v]
    if isinstance(v, dict):
        return {k: _jsonable(a) for k, a in v.items()}
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    return f if math.isfinite(f) else str(f)


@dataclass
class VerificationReport:
    grid: SpaceTimeGrid
    checks: list[CheckResult]
    seed: int = DEFAULT_SEED
    provenance: str = "file"

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self, path: str | Path | None = None) -> str:
        doc = {
            "grid": {"nx": self.grid.nx, "nt": self.grid.nt, "x": [self.grid.a, self.grid.b]},
            "provenance": self.provenance,
            "checks": [c.to_json() for c in self.checks],
            "seed": self.seed,
        }
        text = json.dumps(doc, indent=2, sort_keys=False)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def summary(self) -> str:
        lines = [f"grid {self.grid.nx}x{self.grid.nt} ({self.provenance})"]
        for c in self.checks:
            m = c.measured
            ms = f"{m:.4g}" if isinstance(m, (float, int)) else str(m)
            lines.append(f"  {c.name:<18} {c.status:<7} measured={ms}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CheckRegion:
    """Nodes at distance at least ``radius`` from every corner, or inside ``box``.

    ``corners`` defaults to the four corners of the space-time rectangle.
    ``box`` is ``(x_lo, x_hi, t_lo, t_hi)``.
    """

    radius: float | None = None
    corners: tuple[tuple[float, float], ...] | None = None
    box: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.radius is None and self.box is None:
            raise ValueError("region needs a corner radius or a box")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("corner-exclusion radius must be positive")

    def corner_points(self, grid: SpaceTimeGrid):
        if self.corners is not None:
            return self.corners
        return ((grid.a, 0.0), (grid.b, 0.0), (grid.a, 1.0), (grid.b, 1.0))

    def contains(self, grid: SpaceTimeGrid, X, T) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        T = np.asarray(T, dtype=float)
        m = np.ones(np.broadcast(X, T).shape, dtype=bool)
        if self.radius is not None:
            for cx, ct in self.corner_points(grid):
                m &= np.hypot(X - cx, T - ct) >= self.radius
        if self.box is not None:
            x0, x1, t0, t1 = self.box
            m &= (X >= x0) & (X <= x1) & (T >= t0) & (T <= t1)
        return m

    def mask(self, grid: SpaceTimeGrid) -> np.ndarray:
        X, T = grid.mesh()
        m = self.contains(grid, X, T)
        if not m.any():
            raise ValueError("region contains no grid nodes")
        return m

    def to_json(self) -> dict:
        return {"radius": self.radius, "corners": self.corners, "box": self.box}


# --------------------------------------------------------------- differences


def fd_hessian(U: np.ndarray, hx: float, ht: float) -> np.ndarray:
    """Centered second differences at interior nodes, shape ``(nt-2, nx-2, 2, 2)``.

    The mixed term uses the four diagonal neighbours.
    """
    c = U[1:-1, 1:-1]
    uxx = (U[1:-1, 2:] - 2 * c + U[1:-1, :-2]) / hx**2
    utt = (U[2:, 1:-1] - 2 * c + U[:-2, 1:-1]) / ht**2
    uxt = (U[2:, 2:] - U[:-2, 2:] - U[2:, :-2] + U[:-2, :-2]) / (4 * hx * ht)
    return _stack(uxx, uxt, utt)


def fd_hessian4(U: np.ndarray, hx: float, ht: float) -> np.ndarray:
    """Fourth-order centered Hessian at nodes two away from the edge, shape ``(nt-4, nx-4, 2, 2)``."""
    def d2(A, axis, h):
        s = [slice(2, -2), slice(2, -2)]

        def sh(k):
            q = list(s)
            q[axis] = slice(2 + k, A.shape[axis] - 2 + k or None)
            return A[tuple(q)]
        return (-sh(-2) + 16 * sh(-1) - 30 * sh(0) + 16 * sh(1) - sh(2)) / (12 * h * h)

    def d1(A, axis, h):
        n = A.shape[axis]

        def sh(k):
            q = [slice(None), slice(None)]
            q[axis] = slice(2 + k, n - 2 + k or None)
            return A[tuple(q)]
        return (sh(-2) - 8 * sh(-1) + 8 * sh(1) - sh(2)) / (12 * h)

    uxx = d2(U, 1, hx)
    utt = d2(U, 0, ht)
    ux = d1(U, 1, hx)  # shape (nt, nx-4)
    uxt = d1(ux, 0, ht)
    return _stack(uxx, uxt, utt)


def _stack(uxx, uxt, utt):
    return np.stack([np.stack([uxx, uxt], -1), np.stack([uxt, utt], -1)], -2)


def fd_gradient(U: np.ndarray, hx: float, ht: float) -> tuple[np.ndarray, np.ndarray]:
    """Centered first differences on the full grid (second-order one-sided at edges)."""
    ux = np.gradient(U, hx, axis=1, edge_order=2)
    ut = np.gradient(U, ht, axis=0, edge_order=2)
    return ux, ut


def _interior(grid: SpaceTimeGrid, mask: np.ndarray | None, margin: int = 1) -> np.ndarray:
    m = np.zeros((grid.nt, grid.nx), dtype=bool)
    m[margin:-margin, margin:-margin] = True
    if mask is not None:
        m &= mask
    return m


def _node(grid: SpaceTimeGrid, j: int, i: int) -> tuple[float, float]:
    return float(grid.x[i]), float(grid.t[j])


def _region_mask(u: GridField, region: CheckRegion | None):
    return None if region is None else region.mask(u.grid)


# -------------------------------------------------------------------- checks


def ma_residual(u: GridField, region: CheckRegion | None = None, c: float = MA_MEAN_C) -> CheckResult:
    """Discrete Monge-Ampere determinant at interior nodes.

    ``measured`` is the mean over checked nodes of ``|det H| / (1 + |H|_F^2)``;
    the raw and normalized maxima are in ``details``. A degenerate solution has
    a mean residual of order ``h`` (interfaces where the Hessian jumps occupy
    an ``O(h)`` band) or smaller, so the check passes when the mean is at most
    ``c * h``.
    """
    g = u.grid
    if g.nx < 5 or g.nt < 5:
        raise ValueError("ma_residual needs at least 5 nodes per direction")
    H = fd_hessian(u.values, g.hx, g.ht)
    det = H[..., 0, 0] * H[..., 1, 1] - H[..., 0, 1] * H[..., 1, 0]
    nrm = np.abs(det) / (1.0 + np.sum(H * H, axis=(-1, -2)))
    m = _interior(g, _region_mask(u, region))[1:-1, 1:-1]
    if not m.any():
        raise ValueError("no interior nodes in the region")
    raw = np.where(m, np.abs(det), -np.inf)
    nv = np.where(m, nrm, -np.inf)
    j, i = np.unravel_index(int(np.argmax(nv)), nv.shape)
    mean = float(np.mean(nrm[m]))
    tol = c * g.h
    return CheckResult(
        "ma_residual", "pass" if mean <= tol else "fail", mean, tol, _node(g, j + 1, i + 1),
        {"max_raw": float(raw.max()), "max_normalized": float(nv.max()), "mean_normalized": mean,
         "nodes": int(m.sum())},
    )


STENCIL_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2))


def directional_min_eig(U: np.ndarray, hx: float, ht: float) -> np.ndarray:
    """Smallest second-difference quotient over a wide stencil of directions.

    ``min_d (u(p+d) + u(p-d) - 2u(p)) / |d|^2`` over :data:`STENCIL_DIRECTIONS`
    approximates the smallest Hessian eigenvalue and, unlike the eigenvalue of
    the centered-difference matrix, is never negative for a convex function.
    Defined on nodes two away from the edge, shape ``(nt-4, nx-4)``.
    """
    nt, nx = U.shape
    c = U[2:-2, 2:-2]
    out = np.full(c.shape, np.inf)
    for di, dj in STENCIL_DIRECTIONS:
        plus = U[2 + dj:nt - 2 + dj, 2 + di:nx - 2 + di]
        minus = U[2 - dj:nt - 2 - dj, 2 - di:nx - 2 - di]
        q = (plus + minus - 2 * c) / ((di * hx) ** 2 + (dj * ht) ** 2)
        np.minimum(out, q, out=out)
    return out


def convexity_check(u: GridField, region: CheckRegion | None = None, c: float = CONVEXITY_C) -> CheckResult:
    """Smallest discrete Hessian eigenvalue (wide-stencil estimate); passes when ``>= -c * h``."""
    g = u.grid
    if g.nx < 5 or g.nt < 5:
        raise ValueError("convexity_check needs at least 5 nodes per direction")
    lam = directional_min_eig(u.values, g.hx, g.ht)
    m = _interior(g, _region_mask(u, region), margin=2)[2:-2, 2:-2]
    vals = np.where(m, lam, np.inf)
    j, i = np.unravel_index(int(np.argmin(vals)), vals.shape)
    worst = float(vals[j, i])
    tol = c * g.h
    return CheckResult("convexity", "pass" if worst >= -tol else "fail", worst, -tol, _node(g, j + 2, i + 2))


def barrier_check(u: GridField, b=None, slack_c: float = BARRIER_SLACK_C) -> CheckResult:
    """Sandwich ``h <= u <= t*phi1 + (1-t)*phi0`` at every node, slack ``1e-9 + slack_c * h``.

    ``b`` is a :class:`~mabuchi.envelope.Barrier`; without one the potentials
    are read off the ``t = 0`` and ``t = 1`` rows and ``C`` is taken from them.
    """
    g = u.grid
    X, T = g.mesh()
    if b is None:
        p0 = np.broadcast_to(u.values[0], X.shape)
        p1 = np.broadcast_to(u.values[-1], X.shape)
        C = float(np.max(np.abs(u.values[0] - u.values[-1]))) + 1.0
    else:
        dom = getattr(b, "dom", None)
        if dom is not None and (abs(dom.a - g.a) > 1e-12 or abs(dom.b - g.b) > 1e-12):
            raise GridMismatch(f"grid spans [{g.a:g},{g.b:g}] but the barrier is for [{dom.a:g},{dom.b:g}]")
        p0 = np.asarray(b.phi0(X), float) * np.ones(X.shape)
        p1 = np.asarray(b.phi1(X), float) * np.ones(X.shape)
        C = b.C
    lower = np.maximum(np.maximum(p0 - C * T, p1 - C * (1 - T)), p0 + p1)
    upper = T * p1 + (1 - T) * p0
    below = lower - u.values
    above = u.values - upper
    viol = np.maximum(below, above)
    j, i = np.unravel_index(int(np.argmax(viol)), viol.shape)
    worst = float(viol[j, i])
    tol = 1e-9 + slack_c * g.h
    return CheckResult(
        "barrier", "pass" if worst <= tol else "fail", worst, tol, _node(g, j, i),
        {"C": C, "max_lower_violation": float(below.max()), "max_upper_violation": float(above.max())},
    )


def lipschitz_constant(u: GridField) -> CheckResult:
    """Largest first-difference quotient along grid edges (x and t separately)."""
    g = u.grid
    qx = np.abs(np.diff(u.values, axis=1)) / g.hx
    qt = np.abs(np.diff(u.values, axis=0)) / g.ht
    jx, ix = np.unravel_index(int(np.argmax(qx)), qx.shape)
    jt, it = np.unravel_index(int(np.argmax(qt)), qt.shape)
    if qx[jx, ix] >= qt[jt, it]:
        L, pt = float(qx[jx, ix]), (float(g.x[ix] + 0.5 * g.hx), float(g.t[jx]))
    else:
        L, pt = float(qt[jt, it]), (float(g.x[it]), float(g.t[jt] + 0.5 * g.ht))
    return CheckResult("lipschitz", "pass" if math.isfinite(L) else "fail", L, None, pt,
                       {"max_dx": float(qx.max()), "max_dt": float(qt.max())})


def _second_quotients(U, hx, ht):
    """Absolute second-difference quotients at interior nodes for the four directions."""
    c = U[1:-1, 1:-1]
    qs = [
        np.abs(U[1:-1, 2:] + U[1:-1, :-2] - 2 * c) / hx**2,
        np.abs(U[2:, 1:-1] + U[:-2, 1:-1] - 2 * c) / ht**2,
        np.abs(U[2:, 2:] + U[:-2, :-2] - 2 * c) / (hx**2 + ht**2),
        np.abs(U[:-2, 2:] + U[2:, :-2] - 2 * c) / (hx**2 + ht**2),
    ]
    return np.max(np.stack(qs), axis=0)


def _c11_on(u: GridField, mask: np.ndarray):
    g = u.grid
    q = _second_quotients(u.values, g.hx, g.ht)
    m = mask[1:-1, 1:-1]
    if not m.any():
        raise ValueError("region has no interior nodes")
    vals = np.where(m, q, -np.inf)
    j, i = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return float(vals[j, i]), _node(g, j + 1, i + 1)


def c11_seminorm(u: GridField, region: CheckRegion | None = None) -> CheckResult:
    """Sup over region nodes of ``|u(p+d) + u(p-d) - 2u(p)| / |d|^2`` (axis and diagonal ``d``)."""
    mask = np.ones((u.grid.nt, u.grid.nx), bool) if region is None else region.mask(u.grid)
    val, pt = _c11_on(u, mask)
    return CheckResult("c11", "pass" if math.isfinite(val) else "fail", val, None, pt)


def blowup_probe(u: GridField, corner: tuple[float, float], radii: Sequence[float],
                 expect: str | None = "blowup") -> CheckResult:
    """Second-difference seminorm over annuli ``r <= |p - corner| <= 2r`` for each radius.

    ``measured`` lists the seminorms; ``details['ratios']`` the successive
    ratios. With ``expect='blowup'`` the check passes when every ratio lies in
    ``[1.6, 2.4]`` (growth like ``1/r``); with ``expect='bounded'`` when every
    ratio lies in ``[0.8, 1.2]``.
    """
    radii = [float(r) for r in radii]
    g = u.grid
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    if radii[-1] < 4 * g.h - 1e-12:
        raise ValueError(f"smallest radius {radii[-1]:g} is below 4h = {4 * g.h:g}")
    X, T = g.mesh()
    d = np.hypot(X - corner[0], T - corner[1])
    vals, pts = [], []
    for r in radii:
        m = (d >= r) & (d <= 2 * r)
        inner = np.zeros_like(m)
        inner[1:-1, 1:-1] = m[1:-1, 1:-1]
        if not inner.any():
            raise ValueError(f"annulus of radius {r:g} contains no interior nodes")
        v, p = _c11_on(u, inner)
        vals.append(v)
        pts.append(p)
    ratios = [b / a for a, b in zip(vals, vals[1:])]
    if expect == "blowup":
        band = (1.6, 2.4)
    elif expect == "bounded":
        band = (0.8, 1.2)
    else:
        band = None
    if band is None:
        status = "pass"
    else:
        status = "pass" if all(band[0] <= q <= band[1] for q in ratios) else "fail"
    return CheckResult("blowup", status, vals, list(band) if band else None, pts[-1],
                       {"radii": radii, "ratios": ratios, "corner": list(corner)})


def gluing_check(piece_a: ScalarField, piece_b: ScalarField, xs, ts, tol: float = 1e-12) -> CheckResult:
    """Values and symbolic gradients of two pieces agree at interface samples ``(xs, ts)``."""
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)

    def ev(f):
        return np.asarray(f(xs, ts), float) * np.ones(xs.shape)

    dv = np.abs(ev(piece_a) - ev(piece_b))
    ga = np.column_stack([ev(d) for d in piece_a.gradient()])
    gb = np.column_stack([ev(d) for d in piece_b.gradient()])
    dg = np.max(np.abs(ga - gb), axis=1)
    err = np.maximum(dv, dg)
    k = int(np.argmax(err))
    worst = float(err[k])
    return CheckResult(
        "gluing", "pass" if worst <= tol else "fail", worst, tol, (float(xs[k]), float(ts[k])),
        {"max_value_gap": float(dv.max()), "max_gradient_gap": float(dg.max()),
         "gradient_a": ga[k].tolist(), "gradient_b": gb[k].tolist()},
    )


def _uxx_full(U, hx):
    """Second x-differences on the full grid; second-order one-sided at the ends."""
    out = np.empty_like(U)
    out[:, 1:-1] = (U[:, 2:] - 2 * U[:, 1:-1] + U[:, :-2]) / hx**2
    out[:, 0] = (2 * U[:, 0] - 5 * U[:, 1] + 4 * U[:, 2] - U[:, 3]) / hx**2
    out[:, -1] = (2 * U[:, -1] - 5 * U[:, -2] + 4 * U[:, -3] - U[:, -4]) / hx**2
    return out


def energy_value(path: GridField, metric: GridField | None = None) -> float:
    """``1/2 * int_0^1 int_U (d_t u)^2 det(D_x^2 u) dx dt`` by the trapezoid rule."""
    g = path.grid
    if metric is None:
        metric = path
    elif metric.grid != g:
        raise GridMismatch("metric potential must live on the path's grid")
    ut = np.gradient(path.values, g.ht, axis=0, edge_order=2)
    w = _uxx_full(metric.values, g.hx)
    integrand = 0.5 * ut * ut * w
    return float(np.trapezoid(np.trapezoid(integrand, dx=g.hx, axis=1), dx=g.ht))


def energy(path: GridField, metric: GridField | None = None) -> CheckResult:
    """Energy of a path of potentials; informational, passes when finite."""
    e = energy_value(path, metric)
    return CheckResult("energy", "pass" if math.isfinite(e) else "fail", e, None)


def quadratic_growth_check(u: GridField, region: CheckRegion | None = None, pairs: int = 2000,
                           seed: int = DEFAULT_SEED, min_separation: float | None = None) -> CheckResult:
    """Largest ratio ``|u(q) - u(p) - (q - p).Du(p)| / |q - p|^2`` over random node pairs.

    Points are drawn uniformly in the rectangle (or the region's box) from
    ``seed`` and kept when they lie in ``region``; each is then snapped to the nearest interior node. The
    continuous draws do not depend on the grid, so the same pairs are used on
    every resolution. Pairs closer than ``min_separation`` (default: a quarter of
    the exclusion radius, or 0.05) are skipped, which keeps the centered-difference
    gradient error from dominating.
    """
    g = u.grid
    if min_separation is None:
        min_separation = 0.25 * region.radius if region is not None and region.radius else 0.05
    rng = np.random.default_rng(seed)
    xlo, xhi, tlo, thi = g.a, g.b, g.t0, g.t1
    if region is not None and region.box is not None:
        xlo, xhi = max(xlo, region.box[0]), min(xhi, region.box[1])
        tlo, thi = max(tlo, region.box[2]), min(thi, region.box[3])
    ux, ut = fd_gradient(u.values, g.hx, g.ht)
    best, where = 0.0, None
    found = 0
    attempts = 0
    while found < pairs:
        attempts += 1
        if attempts > 200 * pairs:
            raise ValueError("region too small to draw the requested pairs")
        P = np.column_stack([rng.uniform(xlo, xhi, 2), rng.uniform(tlo, thi, 2)])
        if region is not None and not np.all(region.contains(g, P[:, 0], P[:, 1])):
            continue
        if np.hypot(*(P[1] - P[0])) < min_separation:
            continue
        found += 1
        i = np.clip(np.rint((P[:, 0] - g.a) / g.hx).astype(int), 1, g.nx - 2)
        j = np.clip(np.rint((P[:, 1] - g.t0) / g.ht).astype(int), 1, g.nt - 2)
        dx = g.x[i[1]] - g.x[i[0]]
        dt = g.t[j[1]] - g.t[j[0]]
        d2 = dx * dx + dt * dt
        if d2 == 0:
            continue
        rem = u.values[j[1], i[1]] - u.values[j[0], i[0]] - dx * ux[j[0], i[0]] - dt * ut[j[0], i[0]]
        q = abs(rem) / d2
        if q > best:
            best, where = q, _node(g, int(j[0]), int(i[0]))
    return CheckResult("quadratic_growth", "pass" if math.isfinite(best) else "fail", float(best), None,
                       where, {"pairs": pairs, "seed": seed, "min_separation": min_separation})


# -------------------------------------------------------------------- report

CHECK_ORDER = ("ma_residual", "convexity", "barrier", "lipschitz", "c11", "quadratic_growth", "energy", "blowup")


def run_checks(u: GridField, checks: Sequence[str], region: CheckRegion | None = None, barrier=None,
               seed: int = DEFAULT_SEED, corner: tuple[float, float] | None = None,
               radii: Sequence[float] = (0.4, 0.2, 0.1), expect: str | None = "blowup",
               metric: GridField | None = None) -> VerificationReport:
    """Run the named checks in :data:`CHECK_ORDER` order; unknown names raise ``ValueError``."""
    unknown = [c for c in checks if c not in CHECK_ORDER]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; available: {', '.join(CHECK_ORDER)}")
    if len(set(checks)) != len(checks):
        raise ValueError("each check may be requested once")
    runners: dict[str, Callable[[], CheckResult]] = {
        "ma_residual": lambda: ma_residual(u, region),
        "convexity": lambda: convexity_check(u, region),
        "barrier": lambda: barrier_check(u, barrier),
        "lipschitz": lambda: lipschitz_constant(u),
        "c11": lambda: c11_seminorm(u, region),
        "quadratic_growth": lambda: quadratic_growth_check(u, region, seed=seed),
        "energy": lambda: energy(u, metric),
        "blowup": lambda: blowup_probe(u, corner if corner is not None else (u.grid.a, 1.0), radii, expect),
    }
    results = [runners[name]() for name in CHECK_ORDER if name in checks]
    return VerificationReport(u.grid, results, seed, u.provenance)
