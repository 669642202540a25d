"""Space domains, tensor space-time grids and sampled fields with CSV I/O."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = [
    "SpaceDomain",
    "SpaceTimeGrid",
    "GridField",
    "GridFormatError",
    "read_grid_csv",
]

PROVENANCES = ("envelope", "foliation", "oracle", "file", "analytic")


class GridFormatError(ValueError):
    """Malformed GridField CSV; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SpaceDomain:
    """Interval ``(a, b)``, ball, or convex polygon.

    ``kind`` is ``"interval"``, ``"ball"`` or ``"polytope"``. Balls carry
    ``center``/``radius``; polytopes carry a counter-clockwise ``vertices``
    array (2-d only).
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    center: tuple[float, ...] = ()
    radius: float = 0.0
    vertices: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind == "interval":
            if not self.a < self.b:
                raise ValueError(f"interval needs a < b, got ({self.a}, {self.b})")
        elif self.kind == "ball":
            if self.radius <= 0 or len(self.center) < 2:
                raise ValueError("ball needs a positive radius and a center of dimension >= 2")
        elif self.kind == "polytope":
            v = np.asarray(self.vertices, dtype=float)
            if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
                raise ValueError("polytope needs at least three 2-d vertices")
            e = np.roll(v, -1, axis=0) - v
            f = np.roll(e, -1, axis=0)
            cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
            if np.any(cross <= 0):
                raise ValueError("polytope vertices must be strictly convex and counter-clockwise")
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def interval(cls, a: float, b: float) -> "SpaceDomain":
        return cls("interval", a=float(a), b=float(b))

    @classmethod
    def ball(cls, center, radius: float) -> "SpaceDomain":
        return cls("ball", center=tuple(float(c) for c in center), radius=float(radius))

    @classmethod
    def polytope(cls, vertices) -> "SpaceDomain":
        return cls("polytope", vertices=tuple((float(x), float(y)) for x, y in vertices))

    @classmethod
    def from_text(cls, text: str) -> "SpaceDomain":
        """``"-1,1"`` for an interval."""
        try:
            a, b = (float(s) for s in text.split(","))
        except ValueError:
            raise ValueError(f"domain must look like 'a,b', got {text!r}") from None
        return cls.interval(a, b)

    @property
    def dim(self) -> int:
        if self.kind == "interval":
            return 1
        if self.kind == "ball":
            return len(self.center)
        return 2

    def boundary_samples(self, count: int) -> np.ndarray:
        """Ordered boundary points, shape ``(m, dim)``."""
        if self.kind == "interval":
            return np.array([[self.a], [self.b]])
        if self.kind == "ball":
            if self.dim != 2:
                raise NotImplementedError("boundary sampling implemented for 2-d balls only")
            th = 2 * np.pi * np.arange(count) / count
            c = np.asarray(self.center)
            return c + self.radius * np.column_stack([np.cos(th), np.sin(th)])
        v = np.asarray(self.vertices)
        per_edge = max(1, count // len(v))
        s = np.arange(per_edge) / per_edge
        pts = [v[i] + s[:, None] * (v[(i + 1) % len(v)] - v[i]) for i in range(len(v))]
        return np.vstack(pts)

    def contains(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "interval":
            x = pts[:, 0]
            return (x >= self.a - tol) & (x <= self.b + tol)
        if self.kind == "ball":
            return np.linalg.norm(pts - np.asarray(self.center), axis=1) <= self.radius + tol
        v = np.asarray(self.vertices)
        e = np.roll(v, -1, axis=0) - v
        rel = pts[:, None, :] - v[None, :, :]
        cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
        return np.all(cross >= -tol, axis=1)

    def sample(self, count: int) -> np.ndarray:
        """Roughly ``count`` points covering the closure, boundary included."""
        if self.kind == "interval":
            return np.linspace(self.a, self.b, count)[:, None]
        lo, hi = self.bounding_box()
        k = max(3, int(np.sqrt(count)))
        g = np.stack(np.meshgrid(*[np.linspace(l, h, k) for l, h in zip(lo, hi)], indexing="ij"), -1)
        g = g.reshape(-1, self.dim)
        inside = g[self.contains(g, tol=0.0)]
        return np.vstack([inside, self.boundary_samples(4 * k)])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "interval":
            return np.array([self.a]), np.array([self.b])
        if self.kind == "ball":
            c = np.asarray(self.center)
            return c - self.radius, c + self.radius
        v = np.asarray(self.vertices)
        return v.min(axis=0), v.max(axis=0)


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform tensor grid over ``[a, b] x [t0, t1]`` with endpoints included."""

    a: float
    b: float
    nx: int
    nt: int
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        if self.nx < 3 or self.nt < 3:
            raise ValueError(f"grid needs nx, nt >= 3, got {self.nx}, {self.nt}")
        if not (self.a < self.b and self.t0 < self.t1):
            raise ValueError("grid extents must be increasing")

    @classmethod
    def over(cls, dom: SpaceDomain, nx: int, nt: int) -> "SpaceTimeGrid":
        if dom.kind != "interval":
            raise ValueError("space-time grids are one-dimensional in space")
        return cls(dom.a, dom.b, int(nx), int(nt))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.nx)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)

    @property
    def hx(self) -> float:
        return (self.b - self.a) / (self.nx - 1)

    @property
    def ht(self) -> float:
        return (self.t1 - self.t0) / (self.nt - 1)

    @property
    def h(self) -> float:
        return max(self.hx, self.ht)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, T)`` arrays of shape ``(nt, nx)``: row j is time level ``t[j]``."""
        X, T = np.meshgrid(self.x, self.t)
        return X, T

    def refine(self) -> "SpaceTimeGrid":
        return SpaceTimeGrid(self.a, self.b, 2 * self.nx - 1, 2 * self.nt - 1, self.t0, self.t1)


@dataclass(frozen=True, eq=False)
class GridField:
    """Values ``u(x_i, t_j)`` stored as an ``(nt, nx)`` array."""

    grid: SpaceTimeGrid
    values: np.ndarray
    provenance: str = "file"
    region: np.ndarray | None = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nt, self.grid.nx):
            raise ValueError(f"values shape {v.shape} does not match grid ({self.grid.nt}, {self.grid.nx})")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: SpaceTimeGrid, fn, provenance: str = "analytic") -> "GridField":
        X, T = grid.mesh()
        return cls(grid, np.asarray(fn(X, T), dtype=float) * np.ones_like(X), provenance)

    def to_csv(self, path: str | Path | None = None) -> str:
        """Header ``x,t,u[,region]``, rows ordered by t then x, 17 significant digits."""
        buf = io.StringIO()
        X, T = self.grid.mesh()
        has_region = self.region is not None
        buf.write("x,t,u,region\n" if has_region else "x,t,u\n")
        xs, ts, us = X.ravel(), T.ravel(), self.values.ravel()
        rs = np.asarray(self.region).ravel() if has_region else None
        for k in range(xs.size):
            row = f"{xs[k]:.17g},{ts[k]:.17g},{us[k]:.17g}"
            if has_region:
                row += f",{int(rs[k])}"
            buf.write(row + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def read_grid_csv(source: str | Path | Iterable[str], provenance: str = "file") -> GridField:
    """Parse a GridField CSV; node coordinates must form a uniform tensor grid."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        lines = Path(source).read_text().splitlines()
    elif isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = list(source)
    if not lines:
        raise GridFormatError("empty file", 1)
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if header[:3] != ["x", "t", "u"] or len(header) > 4 or (len(header) == 4 and header[3] != "region"):
        raise GridFormatError(f"header must be x,t,u[,region], got {','.join(header)}", 1)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise GridFormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise GridFormatError(f"non-numeric field in {','.join(row)!r}", lineno) from None
    if not rows:
        raise GridFormatError("no data rows", 2)
    data = np.array(rows)
    xs = np.unique(data[:, 0])
    ts = np.unique(data[:, 1])
    nx, nt = xs.size, ts.size
    if nx * nt != len(data):
        raise GridFormatError(f"{len(data)} rows do not form a {nx}x{nt} tensor grid")
    grid = SpaceTimeGrid(float(xs[0]), float(xs[-1]), nx, nt, float(ts[0]), float(ts[-1]))
    if not (np.allclose(xs, grid.x, atol=1e-9) and np.allclose(ts, grid.t, atol=1e-9)):
        raise GridFormatError("node coordinates are not uniformly spaced")
    for k, (x, t) in enumerate(data[:, :2]):
        j, i = divmod(k, nx)
        if abs(x - grid.x[i]) > 1e-9 or abs(t - grid.t[j]) > 1e-9:
            raise GridFormatError("rows must be ordered by t, then x", k + 2)
    values = data[:, 2].reshape(nt, nx)
    region = data[:, 3].reshape(nt, nx).astype(int) if len(header) == 4 else None
    return GridField(grid, values, provenance, region)
