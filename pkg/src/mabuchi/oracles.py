"""Closed-form piecewise weak geodesics used as ground truth.

``example3``: the real geodesic on (-1, 1) between ``2(x^2-1)`` and ``x^2-1``,
three regions, second derivatives unbounded at the corners ``(+-1, 1)``.

``example4``: the toric geodesic on the unit disc between ``2(|w|^2-1)`` and
``|w|^2-1`` written in log coordinates ``x = log|w|``, ``t = log|z|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expr import ScalarField, parse_expression
from .grid import GridField, SpaceTimeGrid

__all__ = [
    "PiecewiseSolution",
    "EXAMPLE3",
    "EXAMPLE4",
    "example3",
    "example3_hessian",
    "example3_hessian_printed",
    "example3_interface_gradients",
    "example3_region",
    "example4",
    "example4_region",
    "example4_interface",
    "example4_hessian_printed",
    "example4_complex_hessian_printed",
    "oracle_grid",
    "DomainError",
]

LOG2 = math.log(2.0)


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseSolution:
    name: str
    pieces: tuple[ScalarField, ...]

    @property
    def region_count(self) -> int:
        return len(self.pieces)


EXAMPLE3 = PiecewiseSolution(
    "example3",
    (
        parse_expression("2*(1-t)*(((x+t)/(1-t))^2-1)"),
        parse_expression("2*x^2/(1+t)+t-2"),
        parse_expression("2*(1-t)*(((x-t)/(1-t))^2-1)"),
    ),
)

EXAMPLE4 = PiecewiseSolution(
    "example4",
    (
        parse_expression("2*exp(2*x)/exp(log(2)*t)+t-2"),
        parse_expression("2*(1-t)*(exp(2*x/(1-t))-1)"),
    ),
)


# ------------------------------------------------------------------ example 3


def example3_region(x, t):
    """Region ids 1, 2, 3 by the printed inequalities (continuous extension at t = 1)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s1 = (x + t) / (1 - t)
        s3 = (x - t) / (1 - t)
    region = np.where(s1 < -0.5, 1, np.where(s3 >= 0.5, 3, 2))
    # at t = 1 only the endpoints x = -1, 1 belong to the outer regions
    region = np.where(t >= 1, np.where(x <= -1, 1, np.where(x >= 1, 3, 2)), region)
    return region


def example3(x, t):
    """Value and region id of the closed form at ``(x, t)``; broadcasts."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((x < -1) | (x > 1) | (t < 0) | (t > 1)):
        raise DomainError("example3 is defined on [-1, 1] x [0, 1]")
    region = example3_region(x, t)
    shape = np.broadcast(x, t).shape
    # outer pieces are singular at t = 1; evaluate them at a dummy time there
    tt = np.where(t < 1, t, 0.0)
    u1 = np.asarray(EXAMPLE3.pieces[0](x, tt), float) * np.ones(shape)
    u2 = np.asarray(EXAMPLE3.pieces[1](x, t), float) * np.ones(shape)
    u3 = np.asarray(EXAMPLE3.pieces[2](x, tt), float) * np.ones(shape)
    u = np.where(region == 1, u1, np.where(region == 3, u3, u2))
    u = np.where(t < 1, u, x * x - 1.0)
    if u.ndim == 0:
        return float(u), int(region)
    return u, region


def example3_hessian_printed(x, t, region: int) -> np.ndarray:
    """Hessian blocks as displayed for each region, shape ``(..., 2, 2)``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if region == 1:
        hxx, hxt, htt = 4 / (1 - t), 4 * (1 + x) / (1 - t) ** 2, 4 * (1 + x) ** 2 / (1 - t) ** 3
    elif region == 2:
        hxx, hxt, htt = 4 / (1 + t), -4 * x / (1 + t) ** 2, 4 * x**2 / (1 + t) ** 3
    elif region == 3:
        hxx, hxt, htt = 4 / (1 - t), 4 * (x - 1) / (1 - t) ** 2, 4 * (x - 1) ** 2 / (1 - t) ** 3
    else:
        raise ValueError(f"example3 has regions 1..3, got {region}")
    hxx, hxt, htt = np.broadcast_arrays(hxx, hxt, htt)
    return np.stack([np.stack([hxx, hxt], -1), np.stack([hxt, htt], -1)], -2)


def _symbolic_hessian(f: ScalarField, x, t) -> np.ndarray:
    H = f.hessian()
    vals = [[np.asarray(H[i][j](x, t), float) * np.ones(np.broadcast(x, t).shape) for j in range(2)]
            for i in range(2)]
    return np.stack([np.stack(vals[0], -1), np.stack(vals[1], -1)], -2)


def example3_hessian(x, t, region: int | None = None):
    """Hessian from symbolic differentiation of the region's piece.

    Returns ``(H, on_interface)``; on an interface the matrix is the one-sided
    Hessian of ``region`` (or of the region the point is assigned to).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    reg = example3_region(x, t)
    s1 = (x + t) / (1 - t)
    s3 = (x - t) / (1 - t)
    on_interface = np.isclose(s1, -0.5, atol=1e-12) | np.isclose(s3, 0.5, atol=1e-12)
    if region is None:
        if reg.ndim:
            out = np.empty(reg.shape + (2, 2))
            for r in (1, 2, 3):
                m = reg == r
                if np.any(m):
                    out[m] = _symbolic_hessian(EXAMPLE3.pieces[r - 1], x[m] if x.ndim else x,
                                               t[m] if t.ndim else t)
            return out, on_interface
        region = int(reg)
    return _symbolic_hessian(EXAMPLE3.pieces[region - 1], x, t), on_interface


def example3_interface_gradients(samples: int = 50):
    """Values and symbolic gradients of adjacent pieces along both interfaces.

    The 1|2 interface is ``x = -(1+t)/2`` and the 2|3 interface ``x = (1+t)/2``.
    Returns a dict keyed ``"1|2"`` and ``"2|3"`` with sample points, both
    pieces' values, both gradients (``(d/dx, d/dt)`` order) and the printed
    common gradient.
    """
    t = np.linspace(0.0, 0.95, samples)
    out = {}
    for key, (ia, ib), xs, printed in (
        ("1|2", (0, 1), -(1 + t) / 2, (-2.0, 0.5)),
        ("2|3", (1, 2), (1 + t) / 2, (2.0, 0.5)),
    ):
        fa, fb = EXAMPLE3.pieces[ia], EXAMPLE3.pieces[ib]
        out[key] = {
            "x": xs,
            "t": t,
            "value_a": fa(xs, t),
            "value_b": fb(xs, t),
            "printed_value": 3 * (t - 1) / 2,
            "grad_a": np.column_stack([g(xs, t) * np.ones_like(t) for g in fa.gradient()]),
            "grad_b": np.column_stack([g(xs, t) * np.ones_like(t) for g in fb.gradient()]),
            "printed_grad": printed,
        }
    return out


# ------------------------------------------------------------------ example 4


def example4_interface(t):
    """``x = log(sqrt 2) t - log(sqrt 2)``."""
    return 0.5 * LOG2 * (np.asarray(t, dtype=float) - 1.0)


def example4_region(x, t):
    x = np.asarray(x, dtype=float)
    return np.where(x < example4_interface(t), 1, 2)


def example4(x, t):
    """Value and region id of the log-coordinate closed form; ``x <= 0``, ``0 <= t <= 1``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((x > 0) | (t < 0) | (t > 1)):
        raise DomainError("example4 is defined for x <= 0 and t in [0, 1]")
    region = example4_region(x, t)
    shape = np.broadcast(x, t).shape
    v1 = np.asarray(EXAMPLE4.pieces[0](x, t), float) * np.ones(shape)
    tt = np.where(t < 1, t, 0.0)
    with np.errstate(over="ignore", under="ignore"):
        v2 = np.asarray(EXAMPLE4.pieces[1](x, tt), float) * np.ones(shape)
    # region 2 collapses onto x = 0 at t = 1, where the value is 0
    v2 = np.where(t < 1, v2, 0.0)
    v = np.where(region == 1, v1, v2)
    if v.ndim == 0:
        return float(v), int(region)
    return v, region


def example4_complex_hessian_printed(w, z, region: int) -> np.ndarray:
    """Complex Hessian of ``u(w, z)`` as displayed, variables ordered ``(z, w)``."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    aw, az = np.abs(w), np.abs(z)
    if region == 1:
        den = az ** (LOG2 + 2)
        h11 = LOG2**2 * aw**2 / (2 * den)
        h12 = -z * np.conj(w) * LOG2 / den
        h21 = -w * np.conj(z) * LOG2 / den
        h22 = 2 / az**LOG2
    elif region == 2:
        L = np.log(az)
        lw = np.log(aw**2)
        A = np.exp(lw / (1 - L))
        h11 = lw**2 / (2 * (1 - L) ** 3 * az**2) * A
        h12 = lw * z * np.conj(w) / ((1 - L) ** 2 * az**2 * aw**2) * A
        h21 = lw * w * np.conj(z) / ((1 - L) ** 2 * az**2 * aw**2) * A
        h22 = 2 / (aw**2 * (1 - L)) * A
    else:
        raise ValueError(f"example4 has regions 1..2, got {region}")
    h11, h12, h21, h22 = np.broadcast_arrays(*(np.asarray(h, dtype=complex) for h in (h11, h12, h21, h22)))
    return np.stack([np.stack([h11, h12], -1), np.stack([h21, h22], -1)], -2)


def example4_hessian_printed(x, t, region: int) -> np.ndarray:
    """Real ``(x, t)`` Hessian of each log-coordinate piece, written out by hand."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if region == 1:
        E = np.exp(2 * x - LOG2 * t)
        hxx, hxt, htt = 8 * E, -4 * LOG2 * E, 2 * LOG2**2 * E
    elif region == 2:
        tau = 1 - t
        E = np.exp(2 * x / tau)
        hxx, hxt, htt = 8 * E / tau, 8 * x * E / tau**2, 8 * x**2 * E / tau**3
    else:
        raise ValueError(f"example4 has regions 1..2, got {region}")
    hxx, hxt, htt = np.broadcast_arrays(hxx, hxt, htt)
    return np.stack([np.stack([hxx, hxt], -1), np.stack([hxt, htt], -1)], -2)


# -------------------------------------------------------------------- sampling


def oracle_grid(name: str, nx: int, nt: int, truncation: float = -4.0) -> GridField:
    """Sample ``example3`` on ``[-1, 1] x [0, 1]`` or ``example4`` on ``[truncation, 0] x [0, 1]``."""
    if name == "example3":
        grid = SpaceTimeGrid(-1.0, 1.0, nx, nt)
        X, T = grid.mesh()
        u, reg = example3(X, T)
    elif name == "example4":
        grid = SpaceTimeGrid(float(truncation), 0.0, nx, nt)
        X, T = grid.mesh()
        u, reg = example4(X, T)
    else:
        raise ValueError(f"unknown oracle {name!r}; expected example3 or example4")
    return GridField(grid, u, "oracle", reg)
