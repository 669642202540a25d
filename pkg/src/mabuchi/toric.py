"""Toric potentials in logarithmic coordinates.

A function of the moduli ``|w|``, ``|z|`` is plurisubharmonic exactly when
``v(x, t) = u(e^x, e^t)`` is convex, and its complex Monge-Ampere measure
vanishes exactly when ``det D^2 v`` does. Radial expressions are written with
``|w|`` and ``|z|`` as variables, e.g. ``"2*|w|^2/exp(log(2)*log(|z|))"``;
non-integer powers go through ``exp``/``log`` since the grammar only admits
integer exponents.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .envelope import envelope_grid
from .expr import Const, ExpressionError, Func, Mul, Neg, Pow, ScalarField, Var, parse_expression
from .grid import GridField, SpaceDomain, SpaceTimeGrid
from .oracles import example4_complex_hessian_printed, example4_region
from .verify import directional_min_eig, fd_hessian4

__all__ = [
    "NonToricError",
    "AxisSetError",
    "ToricProblem",
    "ComplexHessianSample",
    "PshReport",
    "parse_radial",
    "log_pullback",
    "exp_pushforward",
    "toric_psh_check",
    "complex_hessian",
    "complex_hessian_from_log",
    "sample_bidisc_annulus",
]

_MODULI = {"|w|": "W", "|z|": "Z"}


class NonToricError(ValueError):
    """Expression depends on more than the coordinate moduli."""


class AxisSetError(ValueError):
    """Point on the axis set ``w = 0``."""


def parse_radial(text: str) -> ScalarField:
    """Parse an expression in ``|w|`` and ``|z|``; bare ``w`` or ``z`` is rejected."""
    body = text
    for k, v in _MODULI.items():
        body = body.replace(k, v)
    bare = re.search(r"(?<![A-Za-z])[wz](?![A-Za-z])", body)
    if bare:
        raise NonToricError(f"'{bare.group()}' appears outside a modulus at offset {bare.start()}; "
                            "toric input must depend on |w| and |z| only")
    try:
        return parse_expression(body, variables=("W", "Z"))
    except ExpressionError as exc:
        raise NonToricError(f"cannot read radial expression: {exc}") from exc


def _simplify_logexp(n):
    """Rewrite ``log(exp(a))`` to ``a`` and ``exp(a)^k`` to ``exp(k*a)`` bottom-up."""
    if isinstance(n, (Const, Var)):
        return n
    if isinstance(n, Neg):
        return Neg(_simplify_logexp(n.arg))
    if isinstance(n, Pow):
        base = _simplify_logexp(n.base)
        if isinstance(base, Func) and base.name == "exp":
            return Func("exp", Mul(Const(float(n.exponent)), base.arg))
        return Pow(base, n.exponent)
    if isinstance(n, Func):
        a = _simplify_logexp(n.arg)
        if n.name == "log" and isinstance(a, Func) and a.name == "exp":
            return a.arg
        return Func(n.name, a)
    return type(n)(_simplify_logexp(n.left), _simplify_logexp(n.right))


def log_pullback(field: ScalarField | str) -> ScalarField:
    """Substitute ``|w| = e^x``, ``|z| = e^t`` symbolically; result is a field in ``(x, t)``."""
    if isinstance(field, str):
        field = parse_radial(field)
    extra = field.free_variables - {"W", "Z"}
    if extra:
        raise NonToricError(f"variables {sorted(extra)} are not coordinate moduli")
    x = parse_expression("exp(x)")
    t = parse_expression("exp(t)")
    sub = field.with_variables(("W", "Z", "x", "t")).substitute(W=x, Z=t)
    return ScalarField(_simplify_logexp(sub.ast), ("x", "t"))


def exp_pushforward(v: ScalarField, w_abs, z_abs):
    """Evaluate a log-coordinate field at moduli ``(|w|, |z|)``."""
    return v(np.log(np.asarray(w_abs, float)), np.log(np.asarray(z_abs, float)))


@dataclass(frozen=True)
class ToricProblem:
    """Toric geodesic problem on a truncated log image ``[truncation, 0] x [0, 1]``.

    At the truncation edge the data is the affine interpolation of the
    endpoint values, which is what the geodesic restricted to the axis
    ``w = 0`` is; the edge sits ``e^{2*truncation}``-close to it for the
    potentials used here.
    """

    phi0: ScalarField
    phi1: ScalarField
    truncation: float = -4.0

    def __post_init__(self):
        if not np.isfinite(self.truncation) or self.truncation >= 0:
            raise ValueError("truncation bound must be finite and negative")

    @classmethod
    def from_json(cls, data: dict | str) -> "ToricProblem":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(parse_expression(data["phi0"]), parse_expression(data["phi1"]),
                   float(data.get("truncation", -4.0)))

    @property
    def domain(self) -> SpaceDomain:
        return SpaceDomain.interval(self.truncation, 0.0)

    def lateral(self):
        L = self.truncation
        a0, a1 = float(self.phi0(L)), float(self.phi1(L))
        b0, b1 = float(self.phi0(0.0)), float(self.phi1(0.0))
        return (lambda t: (1 - t) * a0 + t * a1, lambda t: (1 - t) * b0 + t * b1)

    def grid(self, nx: int, nt: int) -> SpaceTimeGrid:
        return SpaceTimeGrid(self.truncation, 0.0, nx, nt)

    def solve(self, nx: int, nt: int) -> GridField:
        """Weak geodesic in log coordinates by the convex envelope."""
        u, _ = envelope_grid(self.phi0, self.phi1, self.domain, self.grid(nx, nt), self.lateral())
        return u


# ------------------------------------------------------------------ psh check


@dataclass
class PshReport:
    convex: bool
    min_eigenvalue: float
    convexity_tolerance: float
    max_normalized_det: float
    det_tolerance: float
    det_ok: bool
    worst_point: tuple[float, float]
    nodes_checked: int

    @property
    def passed(self) -> bool:
        return self.convex and self.det_ok

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"passed": self.passed}


def toric_psh_check(v: GridField, interface=None, band: float = 0.05,
                    det_tol: float = 1e-6, convexity_c: float = 1.0) -> PshReport:
    """Discrete convexity of ``v`` and vanishing of its normalized Hessian determinant.

    Convexity uses wide-stencil directional second differences everywhere
    (tolerance ``convexity_c * h``). The determinant uses fourth-order differences at
    nodes whose stencil stays inside the grid and at distance more than
    ``band`` from ``interface`` (a function ``t -> x``, or a list of them)
    where the field is only C^1. The determinant is normalized by
    ``1 + |D^2 v|_F^2``.
    """
    g = v.grid
    X, T = g.mesh()
    eig = directional_min_eig(v.values, g.hx, g.ht)
    h = g.h
    ctol = convexity_c * h
    min_eig = float(np.min(eig))

    H4 = fd_hessian4(v.values, g.hx, g.ht)
    Xi, Ti = X[2:-2, 2:-2], T[2:-2, 2:-2]
    keep = np.ones(Xi.shape, dtype=bool)
    curves = [] if interface is None else (interface if isinstance(interface, (list, tuple)) else [interface])
    for c in curves:
        keep &= _distance_to_curve(c, Xi, Ti) > band
    det = H4[..., 0, 0] * H4[..., 1, 1] - H4[..., 0, 1] ** 2
    nrm = det / (1.0 + np.sum(H4**2, axis=(-1, -2)))
    vals = np.where(keep, np.abs(nrm), -np.inf)
    k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    worst = float(vals[k]) if keep.any() else 0.0
    return PshReport(
        convex=bool(min_eig >= -ctol),
        min_eigenvalue=min_eig,
        convexity_tolerance=ctol,
        max_normalized_det=worst,
        det_tolerance=det_tol,
        det_ok=bool(worst <= det_tol),
        worst_point=(float(Xi[k]), float(Ti[k])),
        nodes_checked=int(keep.sum()),
    )


def _distance_to_curve(curve, X, T, samples: int = 2001):
    ts = np.linspace(0.0, 1.0, samples)
    cx = np.asarray(curve(ts), dtype=float)
    pts = np.column_stack([cx, ts])
    # nearest sample distance; refined by projecting onto the neighbouring chords
    best = np.full(X.shape, np.inf)
    for k in range(samples - 1):
        p, q = pts[k], pts[k + 1]
        e = q - p
        s = np.clip(((X - p[0]) * e[0] + (T - p[1]) * e[1]) / (e @ e), 0.0, 1.0)
        d = np.hypot(X - p[0] - s * e[0], T - p[1] - s * e[1])
        np.minimum(best, d, out=best)
    return best


# ------------------------------------------------------------- complex Hessian


@dataclass(frozen=True)
class ComplexHessianSample:
    """Complex Hessian at ``(w, z)``; rows and columns ordered ``(z, w)``."""

    w: complex
    z: complex
    region: int
    matrix: np.ndarray

    @property
    def det(self) -> float:
        M = self.matrix
        return float((M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]).real)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @property
    def hermitian_defect(self) -> float:
        M = self.matrix
        return float(np.max(np.abs(M - M.conj().T)))


def _check_point(w: complex, z: complex):
    if w == 0:
        raise AxisSetError("w = 0 lies on the axis set, where the Hessian is not considered")
    if not abs(w) < 1:
        raise ValueError("|w| must be below 1")
    if not (1 < abs(z) < math.e):
        raise ValueError("|z| must lie strictly between 1 and e")


def _region(w: complex, z: complex) -> int:
    return int(example4_region(math.log(abs(w)), math.log(abs(z))))


def complex_hessian(w: complex, z: complex, region: int | None = None) -> ComplexHessianSample:
    """Transcribed closed-form complex Hessian of the toric example at ``(w, z)``."""
    w, z = complex(w), complex(z)
    _check_point(w, z)
    r = _region(w, z) if region is None else region
    M = example4_complex_hessian_printed(w, z, r)
    return ComplexHessianSample(w, z, r, np.asarray(M, dtype=complex))


def complex_hessian_from_log(v: ScalarField, w: complex, z: complex) -> np.ndarray:
    """Complex Hessian of ``u(w, z) = v(log|w|, log|z|)`` from the real Hessian of ``v``.

    With ``x = log|w|``, ``t = log|z|``: ``u_{z zbar} = v_tt / (4|z|^2)``,
    ``u_{w wbar} = v_xx / (4|w|^2)`` and ``u_{z wbar} = v_xt / (4 z wbar)``.
    Entry ``(i, j)`` is ``d^2 u / d zeta_j d conj(zeta_i)`` with ``zeta = (z, w)``.
    """
    w, z = complex(w), complex(z)
    _check_point(w, z)
    x, t = math.log(abs(w)), math.log(abs(z))
    vxx = float(v.diff("x").diff("x")(x, t))
    vxt = float(v.diff("x").diff("t")(x, t))
    vtt = float(v.diff("t").diff("t")(x, t))
    zz = vtt / (4 * abs(z) ** 2)
    ww = vxx / (4 * abs(w) ** 2)
    wz = vxt / (4 * z * w.conjugate())  # d/dz d/dwbar
    return np.array([[zz, wz.conjugate()], [wz, ww]], dtype=complex)


def sample_bidisc_annulus(count: int, region: int, seed: int = 0) -> list[tuple[complex, complex]]:
    """Random ``(w, z)`` in the unit disc times the annulus ``1 < |z| < e``, within one region.

    Points are drawn with ``log|w|`` uniform on ``[-4, 0)``, ``log|z|`` uniform on
    ``(0, 1)`` and uniform arguments, then kept if they fall in ``region``.
    """
    rng = np.random.default_rng(seed)
    out: list[tuple[complex, complex]] = []
    while len(out) < count:
        x = rng.uniform(-4.0, 0.0)
        t = rng.uniform(0.0, 1.0)
        if x >= 0.0 or t <= 0.0:
            continue
        a, b = rng.uniform(0, 2 * np.pi, 2)
        if int(example4_region(x, t)) != region:
            continue
        out.append((complex(math.exp(x) * np.exp(1j * a)), complex(math.exp(t) * np.exp(1j * b))))
    return out
