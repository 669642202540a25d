"""Smooth geodesics by the line-segment foliation (one space dimension).

When ``phi'`` and ``psi'`` have the same image, every ``(x, t)`` lies on a
unique segment joining ``(xi, 0)`` to ``(eta, 1)`` with ``phi'(xi) = psi'(eta)``,
and the geodesic is affine along it::

    (1 - t) xi + t eta = x,      u = t psi(eta) + (1 - t) phi(xi).

``xi`` solves ``F(xi) = (1 - t) xi + t eta(xi) - x = 0`` where
``eta = (psi')^{-1} o phi'``. ``F`` is increasing with ``F' = (1-t) + t phi''/psi''``,
so a bracketed Newton iteration converges from any start in the interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import ScalarField
from .grid import GridField, SpaceDomain, SpaceTimeGrid
from .potential import gradient_image, image_distance, space_variables

__all__ = [
    "NotInImage",
    "ConvergenceFailure",
    "NotSmoothlyConnectable",
    "FoliationMap",
    "SmoothGeodesic",
    "eta_from_xi",
    "newton_xi",
    "jacobian_det",
    "smooth_geodesic",
    "space_hessian",
]

MAX_ITER = 100
RESIDUAL_TOL = 1e-12


class NotInImage(ValueError):
    """The target gradient lies outside the gradient image of the potential."""


class ConvergenceFailure(RuntimeError):
    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class NotSmoothlyConnectable(ValueError):
    """Endpoints with different gradient images admit no smooth geodesic."""


class _Pair:
    """Cached derivatives of a potential pair on an interval."""

    def __init__(self, phi: ScalarField, psi: ScalarField, dom: SpaceDomain | None = None):
        if dom is None:
            dom = SpaceDomain.interval(-1.0, 1.0)
        if dom.dim != 1:
            raise NotImplementedError("segment foliation is implemented for one space dimension")
        for f in (phi, psi):
            space_variables(f, dom)
        self.dom = dom
        self.a, self.b = float(dom.a), float(dom.b)
        self.phi, self.psi = phi, psi
        self.d1 = phi.diff("x"), psi.diff("x")
        self.d2 = self.d1[0].diff("x"), self.d1[1].diff("x")
        self.d3 = self.d2[0].diff("x"), self.d2[1].diff("x")


def _ev(f: ScalarField, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.asarray(f(x), dtype=float) * np.ones(x.shape)


def _monotone_solve(g, dg, target, lo, hi, y0, tol):
    """Solve ``g(y) = target`` for increasing ``g`` with bracket ``[lo, hi]``, elementwise.

    Newton steps falling outside the current bracket are replaced by bisection.
    Each entry iterates independently; returns ``(y, iterations, residual)``.
    """
    target = np.asarray(target, dtype=float)
    shape = target.shape
    c = target.ravel()
    n = c.size
    lo = np.broadcast_to(np.asarray(lo, dtype=float), shape).ravel().copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), shape).ravel().copy()
    y = np.clip(np.broadcast_to(np.asarray(y0, dtype=float), shape).ravel(), lo, hi)
    iters = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        yi = y[idx]
        r = g(yi) - c[idx]
        lo_i = np.where(r < 0, yi, lo[idx])
        hi_i = np.where(r > 0, yi, hi[idx])
        lo[idx], hi[idx] = lo_i, hi_i
        done = np.abs(r) <= tol(idx)
        yn = yi - r / dg(yi)
        bad = ~((yn > lo_i) & (yn < hi_i)) | ~np.isfinite(yn)
        yn = np.where(bad, 0.5 * (lo_i + hi_i), yn)
        stalled = np.abs(yn - yi) <= 4 * eps * np.maximum(1.0, np.abs(yi))
        y[idx] = np.where(done, yi, yn)
        iters[idx] += np.where(done, 0, 1)
        active[idx] = ~(done | stalled)
    if np.any(active):
        k = int(np.flatnonzero(active)[0])
        raise ConvergenceFailure(f"no convergence after {MAX_ITER} iterations", k)
    res = np.abs(g(y) - c)
    return y.reshape(shape), iters.reshape(shape), res.reshape(shape)


def _eta(P: _Pair, xi, tol_image: float = 1e-9):
    """Vectorized ``eta = (psi')^{-1}(phi'(xi))`` with iteration counts."""
    xi = np.asarray(xi, dtype=float)
    c = _ev(P.d1[0], xi)
    pa, pb = float(P.d1[1](P.a)), float(P.d1[1](P.b))
    scale = 1.0 + max(abs(pa), abs(pb))
    out = (c < pa - tol_image * scale) | (c > pb + tol_image * scale)
    if np.any(out):
        k = int(np.flatnonzero(out.ravel())[0])
        raise NotInImage(
            f"gradient {c.ravel()[k]:.12g} at xi={xi.ravel()[k]:.12g} is outside the "
            f"image ({pa:.12g},{pb:.12g}) of the target potential"
        )
    c = np.clip(c, pa, pb)
    f1, f2 = P.d1[1], P.d2[1]
    flat_c = c.ravel()
    tol = lambda idx: 2 * np.finfo(float).eps * (1.0 + np.abs(flat_c[idx]))  # noqa: E731
    eta, it, res = _monotone_solve(
        lambda y: _ev(f1, y), lambda y: _ev(f2, y), c, P.a, P.b, xi, tol
    )
    # exact endpoints when the gradient sits at an end of the image
    eta = np.where(c == pa, P.a, np.where(c == pb, P.b, eta))
    return eta, it


def eta_from_xi(phi: ScalarField, psi: ScalarField, xi, dom: SpaceDomain | None = None):
    """Point ``eta`` with ``psi'(eta) = phi'(xi)``; raises :class:`NotInImage`."""
    P = _Pair(phi, psi, dom)
    xi_arr = np.asarray(xi, dtype=float)
    if np.any((xi_arr < P.a) | (xi_arr > P.b)):
        raise NotInImage("xi lies outside the domain")
    eta, _ = _eta(P, xi_arr)
    return float(eta) if eta.ndim == 0 else eta


def _solve_xi(P: _Pair, x, t, xi0):
    """Vectorized outer Newton; ``x``, ``t``, ``xi0`` broadcast together."""
    x, t, xi0 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, t, xi0)))
    shape = x.shape
    x, t, xi0 = x.ravel(), t.ravel(), xi0.ravel()
    xi = np.empty_like(x)
    eta = np.empty_like(x)
    iters = np.zeros(x.shape, dtype=int)

    m0 = t == 0.0
    xi[m0], eta[m0] = x[m0], _eta(P, x[m0])[0]
    # at t = 1 the segment ends at eta = x; solve phi'(xi) = psi'(x) instead
    m1 = t == 1.0
    if np.any(m1):
        Q = _Pair(P.psi, P.phi, P.dom)
        e1, it1 = _eta(Q, x[m1])
        xi[m1], eta[m1], iters[m1] = e1, x[m1], it1
    mid = ~(m0 | m1)
    if np.any(mid):
        xm, tm = x[mid], t[mid]
        xs, its = _solve_indexed(P, xm, tm, xi0[mid])
        xi[mid], iters[mid] = xs, its
        eta[mid] = _eta(P, xs)[0]
    return xi.reshape(shape), eta.reshape(shape), iters.reshape(shape)


def _solve_indexed(P: _Pair, x, t, xi0):
    """Bracketed Newton on ``F`` with per-node ``t``; nodes iterate independently."""
    n = x.size
    lo = np.full(n, P.a)
    hi = np.full(n, P.b)
    y = np.clip(xi0.copy(), lo, hi)
    iters = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        yi, ti, xi_ = y[idx], t[idx], x[idx]
        e, _ = _eta(P, yi)
        r = (1 - ti) * yi + ti * e - xi_
        lo_i = np.where(r < 0, yi, lo[idx])
        hi_i = np.where(r > 0, yi, hi[idx])
        lo[idx], hi[idx] = lo_i, hi_i
        done = np.abs(r) <= 0.25 * RESIDUAL_TOL
        dF = (1 - ti) + ti * _ev(P.d2[0], yi) / _ev(P.d2[1], e)
        yn = yi - r / dF
        bad = ~((yn > lo_i) & (yn < hi_i)) | ~np.isfinite(yn)
        yn = np.where(bad, 0.5 * (lo_i + hi_i), yn)
        stalled = np.abs(yn - yi) <= 2 * eps * np.maximum(1.0, np.abs(yi))
        y[idx] = np.where(done, yi, yn)
        iters[idx] += np.where(done, 0, 1)
        active[idx] = ~(done | stalled)
    if np.any(active):
        k = int(np.flatnonzero(active)[0])
        raise ConvergenceFailure(
            f"Newton for xi did not converge at x={x[k]:.12g}, t={t[k]:.12g}", (float(x[k]), float(t[k]))
        )
    return y, iters


def newton_xi(phi: ScalarField, psi: ScalarField, x, t, xi0=None, dom: SpaceDomain | None = None):
    """Solve ``(1 - t) xi + t eta(xi) = x`` for ``xi``; vectorized over ``x``."""
    P = _Pair(phi, psi, dom)
    x_arr = np.asarray(x, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0) | (t_arr > 1)):
        raise ValueError("t must lie in [0, 1]")
    if np.any((x_arr < P.a) | (x_arr > P.b)):
        raise ValueError("x must lie in the closed domain")
    if xi0 is None:
        xi0 = x_arr
    xi, _, _ = _solve_xi(P, x_arr, t_arr, xi0)
    return float(xi) if xi.ndim == 0 else xi


def jacobian_det(phi: ScalarField, psi: ScalarField, xi, t, dom: SpaceDomain | None = None):
    """``(1 - t) + t phi''(xi) / psi''(eta)``; the one-dimensional form of the determinant."""
    P = _Pair(phi, psi, dom)
    xi = np.asarray(xi, dtype=float)
    eta, _ = _eta(P, xi)
    J = (1 - np.asarray(t, float)) + np.asarray(t, float) * _ev(P.d2[0], xi) / _ev(P.d2[1], eta)
    return float(J) if np.ndim(J) == 0 else J


@dataclass
class FoliationMap:
    grid: SpaceTimeGrid
    xi: np.ndarray
    eta: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    gradient_mismatch: np.ndarray

    def to_json(self, path: str | Path | None = None) -> str:
        X, T = self.grid.mesh()
        nodes = [
            {"x": float(x), "t": float(t), "xi": float(a), "eta": float(b), "iters": int(k), "residual": float(r)}
            for x, t, a, b, k, r in zip(
                X.ravel(), T.ravel(), self.xi.ravel(), self.eta.ravel(), self.iterations.ravel(), self.residual.ravel()
            )
        ]
        text = json.dumps({"grid": {"nx": self.grid.nx, "nt": self.grid.nt}, "nodes": nodes}, indent=None)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text


@dataclass
class SmoothGeodesic:
    phi: ScalarField
    psi: ScalarField
    dom: SpaceDomain
    foliation: FoliationMap
    field: GridField
    space_hessian: np.ndarray = field(repr=False)

    @property
    def min_space_hessian(self) -> float:
        return float(self.space_hessian.min())

    def evaluate(self, x, t):
        """Geodesic value at arbitrary points (fresh Newton solve)."""
        P = _Pair(self.phi, self.psi, self.dom)
        xi, eta, _ = _solve_xi(P, x, t, x)
        t = np.asarray(t, dtype=float)
        u = t * _ev(self.psi, eta) + (1 - t) * _ev(self.phi, xi)
        return float(u) if np.ndim(u) == 0 else u

    def segment(self, x, t):
        """Endpoints ``(xi, eta)`` of the segment through ``(x, t)``."""
        P = _Pair(self.phi, self.psi, self.dom)
        xi, eta, _ = _solve_xi(P, x, t, x)
        return xi, eta


def _derivatives(P: _Pair, xi, eta, t):
    """First and second x-derivatives of ``xi`` and ``eta`` by implicit differentiation."""
    p2, q2 = _ev(P.d2[0], xi), _ev(P.d2[1], eta)
    p3, q3 = _ev(P.d3[0], xi), _ev(P.d3[1], eta)
    G1 = p2 / q2
    G2 = (p3 - q3 * G1**2) / q2
    J = (1 - t) + t * G1
    xi_x = 1.0 / J
    eta_x = G1 * xi_x
    xi_xx = -t * G2 * xi_x**2 / J
    eta_xx = G2 * xi_x**2 + G1 * xi_xx
    return p2, q2, xi_x, eta_x, xi_xx, eta_xx


def _hessian_parts(P: _Pair, xi, eta, t):
    p2, q2, xi_x, eta_x, xi_xx, eta_xx = _derivatives(P, xi, eta, t)
    main = t * q2 * eta_x**2 + (1 - t) * p2 * xi_x**2
    cross = t * _ev(P.d1[1], eta) * eta_xx + (1 - t) * _ev(P.d1[0], xi) * xi_xx
    return main, cross


def space_hessian(g: SmoothGeodesic, x, t, T: float = 1.0, return_cross: bool = False):
    """Second derivative of the geodesic in the space direction ``T`` at ``(x, t)``.

    Computed from the segment endpoints and their implicit derivatives. With
    ``return_cross`` the first-derivative terms (which vanish identically) are
    returned alongside.
    """
    P = _Pair(g.phi, g.psi, g.dom)
    xi, eta, _ = _solve_xi(P, x, t, x)
    t = np.asarray(t, dtype=float)
    main, cross = _hessian_parts(P, xi, eta, t)
    main = main * T * T
    cross = cross * T * T
    if np.ndim(main) == 0:
        main, cross = float(main), float(cross)
    return (main, cross) if return_cross else main


def smooth_geodesic(phi: ScalarField, psi: ScalarField, dom: SpaceDomain, grid: SpaceTimeGrid,
                    tol: float = 1e-8) -> SmoothGeodesic:
    """Build the smooth geodesic on ``grid`` or raise :class:`NotSmoothlyConnectable`.

    Time levels are swept upward from ``t = 0`` (where ``xi = x``), each level
    warm-started from the previous one.
    """
    P = _Pair(phi, psi, dom)
    ia, ib = gradient_image(phi, dom), gradient_image(psi, dom)
    if image_distance(ia, ib) > tol:
        raise NotSmoothlyConnectable(
            f"gradient images differ: {ia} vs {ib}; no smooth geodesic joins the endpoints"
        )
    xs, ts = grid.x, grid.t
    nt, nx = grid.nt, grid.nx
    XI = np.empty((nt, nx))
    ETA = np.empty((nt, nx))
    IT = np.zeros((nt, nx), dtype=int)
    prev = xs.copy()
    for j, tj in enumerate(ts):
        xi, eta, it = _solve_xi(P, xs, np.full(nx, tj), prev)
        XI[j], ETA[j], IT[j] = xi, eta, it
        prev = xi
    T = ts[:, None]
    X = np.broadcast_to(xs[None, :], (nt, nx))
    residual = np.abs((1 - T) * XI + T * ETA - X)
    mismatch = np.abs(_ev(P.d1[0], XI) - _ev(P.d1[1], ETA))
    U = T * _ev(psi, ETA) + (1 - T) * _ev(phi, XI)
    # endpoint rows are the data themselves
    U[0] = _ev(phi, xs)
    U[-1] = _ev(psi, xs)
    H, _ = _hessian_parts(P, XI, ETA, np.broadcast_to(T, (nt, nx)))
    fmap = FoliationMap(grid, XI, ETA, IT, residual, mismatch)
    return SmoothGeodesic(phi, psi, dom, fmap, GridField(grid, U, "foliation"), H)
