"""Disk-masked Cartesian fields, finite-difference Hessians, and rotation ops.

Fields live on a uniform node grid over the square [-1, 1]^2 (axis 0 is x,
axis 1 is y).  Validity is tracked by a radius: a node belongs to the mask
iff |x| <= valid_radius, so the mask is radially symmetric by construction.
Fields lifted from globally evaluable formulas also carry values outside
the disk (``extends=True``); those values never enter integrals or
comparisons but keep the rotation interpolant free of an artificial jump
at the mask rim.

All operations are pure functions over immutable data; rotation samples are
accumulated in a fixed angle order so results are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import GridMismatch, NonFiniteValue, ResolutionTooCoarse
from .interp import DEFAULT_ORDER, GridInterpolator, GridInterpolator3
from .radial import RadialProfile

DEFAULT_H = 2.0 / 512
DEFAULT_MARGIN = 0.05
DEFAULT_ANGLES = 256

_SQRT2 = math.sqrt(2.0)

#: rim buffer (in cells) when spline-interpolating a field that stops at its mask
_NONEXTEND_BUFFER = {1: 2.0, 3: 10.0}

_coord_cache: dict = {}


def _coords(n: int):
    got = _coord_cache.get(n)
    if got is None:
        x = -1.0 + (2.0 / (n - 1)) * np.arange(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        R = np.hypot(X, Y)
        got = (x, X, Y, R)
        _coord_cache[n] = got
    return got


def _n_from_h(h: float) -> int:
    n = int(round(2.0 / h)) + 1
    if abs((n - 1) * h - 2.0) > 1e-12:
        raise ResolutionTooCoarse(f"spacing {h} does not tile [-1, 1]")
    if n - 1 < 64:
        raise ResolutionTooCoarse("need at least 64 nodes across the diameter")
    return n


@dataclass(frozen=True)
class RotationAngle:
    """Angle of a counter-clockwise rotation, reduced to [0, 2*pi)."""

    radians: float

    def __post_init__(self):
        object.__setattr__(self, "radians", float(self.radians) % (2.0 * math.pi))

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.radians), math.sin(self.radians)
        return np.array([[c, -s], [s, c]])


def _as_angle(phi) -> RotationAngle:
    return phi if isinstance(phi, RotationAngle) else RotationAngle(float(phi))


@dataclass(frozen=True)
class ScalarField2D:
    values: np.ndarray
    h: float
    valid_radius: float
    extends: bool
    name: str = ""

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def mask(self) -> np.ndarray:
        return _coords(self.n)[3] <= self.valid_radius

    def covered_fraction(self) -> float:
        """Fraction of the unit disk covered by the valid nodes."""
        return float(np.count_nonzero(self.mask()) * self.h * self.h / math.pi)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values[self.mask()])))

    def restrict(self, radius: float) -> "ScalarField2D":
        return replace(self, valid_radius=min(self.valid_radius, radius))


@dataclass(frozen=True)
class SymMatrixField2D:
    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    h: float
    valid_radius: float
    extends: bool
    name: str = ""

    @property
    def n(self) -> int:
        return self.a11.shape[0]

    def mask(self) -> np.ndarray:
        return _coords(self.n)[3] <= self.valid_radius

    def max_abs(self) -> float:
        m = self.mask()
        return float(max(np.max(np.abs(self.a11[m])), np.max(np.abs(self.a12[m])),
                         np.max(np.abs(self.a22[m]))))

    def restrict(self, radius: float) -> "SymMatrixField2D":
        return replace(self, valid_radius=min(self.valid_radius, radius))


def _check_compat(a, b):
    if a.n != b.n or abs(a.h - b.h) > 1e-15:
        raise GridMismatch("fields live on different grids")


# -- constructors ---------------------------------------------------------

def field_from_function(fn: Callable, h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN,
                        name: str = "", extends: bool = True) -> ScalarField2D:
    """Sample fn(x, y) on the node grid; fn must accept arrays."""
    n = _n_from_h(h)
    if margin < 2 * h:
        raise ResolutionTooCoarse("margin must be at least two cells wide")
    _, X, Y, R = _coords(n)
    if extends:
        vals = np.asarray(fn(X, Y), dtype=float)
    else:
        vals = np.zeros((n, n))
        m = R <= 1.0 - margin
        vals[m] = np.asarray(fn(X[m], Y[m]), dtype=float)
    return ScalarField2D(vals, h, 1.0 - margin, extends, name)


def lift_radial(v: RadialProfile, h: float = DEFAULT_H,
                margin: float = DEFAULT_MARGIN) -> ScalarField2D:
    """Lift a radial profile to the plane: node value v(|x|)."""
    n = _n_from_h(h)
    if margin < 2 * h:
        raise ResolutionTooCoarse("margin must be at least two cells wide")
    _, X, Y, R = _coords(n)
    if v.kind == "analytic" and v.extendable:
        vals = v.eval(R, 0)
        return ScalarField2D(vals, h, 1.0 - margin, True, v.name)
    vals = np.zeros((n, n))
    m = R <= 1.0 - margin
    vals[m] = v.eval(R[m], 0)
    return ScalarField2D(vals, h, 1.0 - margin, False, v.name)


def lift_radial_hessian(v: RadialProfile, h: float = DEFAULT_H,
                        margin: float = DEFAULT_MARGIN) -> SymMatrixField2D:
    """Exact Hessian of the lifted profile from the polar closed form.

    Hess V(x) = v''(r) u u^T + (v'(r)/r) (I - u u^T) with u = x/r; the value
    at the origin node is v''(0) I.  The result is rotation-equivariant up
    to roundoff, which the averaging identities rely on.
    """
    n = _n_from_h(h)
    _, X, Y, R = _coords(n)
    safe = np.where(R > 0, R, 1.0)
    if v.kind == "analytic" and v.extendable:
        d1 = v.eval(R, 1)
        d2 = v.eval(R, 2)
        tang = d1 / safe
        sel = np.ones_like(R, dtype=bool)
    else:
        sel = R <= 1.0 - margin
        d1 = np.zeros((n, n))
        d2 = np.zeros((n, n))
        d1[sel] = v.eval(R[sel], 1)
        d2[sel] = v.eval(R[sel], 2)
        tang = np.zeros((n, n))
        tang[sel] = d1[sel] / safe[sel]
    origin = R == 0.0
    if np.any(origin):
        lim = float(np.asarray(v.eval(np.array([0.0]), 2)).ravel()[0]) if v.kind == "analytic" \
            else float(d2[~origin].flat[0]) if np.any(~origin) else 0.0
        tang = np.where(origin, lim, tang)
        d2 = np.where(origin, lim, d2)
    ux = np.where(R > 0, X / safe, 0.0)
    uy = np.where(R > 0, Y / safe, 0.0)
    diff = d2 - tang
    a11 = tang + diff * ux * ux
    a12 = diff * ux * uy
    a22 = tang + diff * uy * uy
    ext = v.kind == "analytic" and v.extendable
    return SymMatrixField2D(a11, a12, a22, h, 1.0 - margin, ext, f"hess({v.name})")


# -- finite differences ---------------------------------------------------

def hessian_fd(f: ScalarField2D) -> SymMatrixField2D:
    """Second-order central differences; the cross term uses the 4-point stencil.

    Nodes whose stencil would leave the valid disk are dropped from the mask
    (the valid radius shrinks by sqrt(2) h); fields with square-wide data
    keep their radius since the stencil never starves.
    """
    v = f.values
    h = f.h
    n = f.n
    h2 = h * h
    fxx = np.zeros_like(v)
    fyy = np.zeros_like(v)
    fxy = np.zeros_like(v)
    fxx[1:-1, :] = (v[2:, :] - 2.0 * v[1:-1, :] + v[:-2, :]) / h2
    fyy[:, 1:-1] = (v[:, 2:] - 2.0 * v[:, 1:-1] + v[:, :-2]) / h2
    fxy[1:-1, 1:-1] = (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (4.0 * h2)
    for arr in (fxx, fyy, fxy):
        arr[0, :] = arr[1, :]
        arr[-1, :] = arr[-2, :]
        arr[:, 0] = arr[:, 1]
        arr[:, -1] = arr[:, -2]
    radius = f.valid_radius if f.extends else f.valid_radius - _SQRT2 * h
    return SymMatrixField2D(fxx, fxy, fyy, h, radius, f.extends, f"hess({f.name})")


# -- rotation and averaging ----------------------------------------------

def _rotation_targets(field, order):
    """Output radius and masked target coordinates for rotation sampling."""
    n = field.n
    h = field.h
    _, X, Y, R = _coords(n)
    if field.extends:
        out_radius = 1.0 - 3.0 * h
    else:
        out_radius = field.valid_radius - _NONEXTEND_BUFFER[order] * h
    if out_radius <= 0:
        raise ResolutionTooCoarse("valid region vanished after interpolation buffer")
    sel = R <= out_radius
    return out_radius, sel, X[sel], Y[sel]


def rotate_pullback_scalar(f: ScalarField2D, phi, order: int = DEFAULT_ORDER) -> ScalarField2D:
    """f composed with the rotation by phi, sampled by grid interpolation."""
    ang = _as_angle(phi)
    out_radius, sel, xs, ys = _rotation_targets(f, order)
    interp = GridInterpolator(f.values, order)
    c, s = math.cos(ang.radians), math.sin(ang.radians)
    px = (c * xs - s * ys + 1.0) / f.h
    py = (s * xs + c * ys + 1.0) / f.h
    vals = np.zeros_like(f.values)
    vals[sel] = interp.sample(px, py)
    return ScalarField2D(vals, f.h, out_radius, False, f"rot({f.name})")


def _conjugate(c, s, m11, m12, m22):
    """R(phi)^T M R(phi) for M sampled at the rotated points."""
    b11 = c * c * m11 + 2.0 * c * s * m12 + s * s * m22
    b12 = (c * c - s * s) * m12 + c * s * (m22 - m11)
    b22 = s * s * m11 - 2.0 * c * s * m12 + c * c * m22
    return b11, b12, b22


def rotate_pullback_matrix(F: SymMatrixField2D, phi, order: int = DEFAULT_ORDER) -> SymMatrixField2D:
    """Pullback of a symmetric-matrix field: conjugate the rotated samples."""
    ang = _as_angle(phi)
    out_radius, sel, xs, ys = _rotation_targets(F, order)
    interp = GridInterpolator3(F.a11, F.a12, F.a22, order)
    c, s = math.cos(ang.radians), math.sin(ang.radians)
    px = (c * xs - s * ys + 1.0) / F.h
    py = (s * xs + c * ys + 1.0) / F.h
    m11, m12, m22 = interp.sample(px, py)
    b11, b12, b22 = _conjugate(c, s, m11, m12, m22)
    a11 = np.zeros_like(F.a11)
    a12 = np.zeros_like(F.a12)
    a22 = np.zeros_like(F.a22)
    a11[sel] = b11
    a12[sel] = b12
    a22[sel] = b22
    return SymMatrixField2D(a11, a12, a22, F.h, out_radius, False, f"rot({F.name})")


def angular_average_scalar(f: ScalarField2D, m: int = DEFAULT_ANGLES,
                           order: int = DEFAULT_ORDER) -> ScalarField2D:
    """Trapezoidal average of the rotation pullbacks over m uniform angles.

    Fewer than 8 angles under-resolves the average; the result is still
    computed so that corrupted configurations fail on tolerance, not upfront.
    """
    if m < 1:
        raise ValueError("need at least one angular sample")
    out_radius, sel, xs, ys = _rotation_targets(f, order)
    interp = GridInterpolator(f.values, order)
    acc = np.zeros(xs.shape)
    for k in range(m):
        phi = 2.0 * math.pi * k / m
        c, s = math.cos(phi), math.sin(phi)
        px = (c * xs - s * ys + 1.0) / f.h
        py = (s * xs + c * ys + 1.0) / f.h
        acc += interp.sample(px, py)
    vals = np.zeros_like(f.values)
    vals[sel] = acc / m
    return ScalarField2D(vals, f.h, out_radius, False, f"avg({f.name})")


def angular_average_matrix(F: SymMatrixField2D, m: int = DEFAULT_ANGLES,
                           order: int = DEFAULT_ORDER) -> SymMatrixField2D:
    """Trapezoidal average of the matrix pullbacks over m uniform angles."""
    if m < 1:
        raise ValueError("need at least one angular sample")
    out_radius, sel, xs, ys = _rotation_targets(F, order)
    interp = GridInterpolator3(F.a11, F.a12, F.a22, order)
    acc11 = np.zeros(xs.shape)
    acc12 = np.zeros(xs.shape)
    acc22 = np.zeros(xs.shape)
    for k in range(m):
        phi = 2.0 * math.pi * k / m
        c, s = math.cos(phi), math.sin(phi)
        px = (c * xs - s * ys + 1.0) / F.h
        py = (s * xs + c * ys + 1.0) / F.h
        m11, m12, m22 = interp.sample(px, py)
        b11, b12, b22 = _conjugate(c, s, m11, m12, m22)
        acc11 += b11
        acc12 += b12
        acc22 += b22
    a11 = np.zeros_like(F.a11)
    a12 = np.zeros_like(F.a12)
    a22 = np.zeros_like(F.a22)
    a11[sel] = acc11 / m
    a12[sel] = acc12 / m
    a22[sel] = acc22 / m
    return SymMatrixField2D(a11, a12, a22, F.h, out_radius, False, f"avg({F.name})")


# -- pointwise algebra ----------------------------------------------------

def pairing_2d(A: SymMatrixField2D, B: SymMatrixField2D) -> ScalarField2D:
    """Frobenius product a11 b11 + 2 a12 b12 + a22 b22, node by node."""
    _check_compat(A, B)
    vals = A.a11 * B.a11 + 2.0 * A.a12 * B.a12 + A.a22 * B.a22
    return ScalarField2D(vals, A.h, min(A.valid_radius, B.valid_radius),
                         A.extends and B.extends, f"({A.name}:{B.name})")


def cof_2d(A: SymMatrixField2D) -> SymMatrixField2D:
    """Cofactor of a 2x2 symmetric field: cof [[a,b],[b,c]] = [[c,-b],[-b,a]]."""
    return SymMatrixField2D(A.a22.copy(), -A.a12, A.a11.copy(), A.h,
                            A.valid_radius, A.extends, f"cof({A.name})")


def det_2d(A: SymMatrixField2D) -> ScalarField2D:
    vals = A.a11 * A.a22 - A.a12 * A.a12
    return ScalarField2D(vals, A.h, A.valid_radius, A.extends, f"det({A.name})")


class Integral2D(NamedTuple):
    value: float
    covered_fraction: float


def integral_2d(g: ScalarField2D) -> Integral2D:
    """Sum over valid nodes times h^2, with the covered disk fraction."""
    m = g.mask()
    vals = g.values[m]
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue(f"non-finite samples in field {g.name!r}")
    area = float(np.count_nonzero(m)) * g.h * g.h
    return Integral2D(float(np.sum(vals) * g.h * g.h), area / math.pi)


def l2_norm_2d(g: ScalarField2D) -> float:
    m = g.mask()
    return float(math.sqrt(max(np.sum(g.values[m] ** 2) * g.h * g.h, 0.0)))


def matrix_l2_norm(A: SymMatrixField2D) -> float:
    """L2 norm of a symmetric matrix field, sqrt of the integrated |A|^2."""
    m = A.mask()
    dens = A.a11[m] ** 2 + 2.0 * A.a12[m] ** 2 + A.a22[m] ** 2
    return float(math.sqrt(max(np.sum(dens) * A.h * A.h, 0.0)))


def max_diff_scalar(a: ScalarField2D, b: ScalarField2D, radius: Optional[float] = None,
                    inner: float = 0.0) -> float:
    """Max |a - b| over the common valid nodes (optionally an annulus)."""
    _check_compat(a, b)
    r = min(a.valid_radius, b.valid_radius)
    if radius is not None:
        r = min(r, radius)
    R = _coords(a.n)[3]
    m = (R <= r) & (R >= inner)
    return float(np.max(np.abs(a.values[m] - b.values[m])))


def max_diff_matrix(A: SymMatrixField2D, B: SymMatrixField2D, radius: Optional[float] = None,
                    inner: float = 0.0) -> float:
    _check_compat(A, B)
    r = min(A.valid_radius, B.valid_radius)
    if radius is not None:
        r = min(r, radius)
    R = _coords(A.n)[3]
    m = (R <= r) & (R >= inner)
    return float(max(np.max(np.abs(A.a11[m] - B.a11[m])),
                     np.max(np.abs(A.a12[m] - B.a12[m])),
                     np.max(np.abs(A.a22[m] - B.a22[m]))))


# -- serialization --------------------------------------------------------

def field_to_csv(f: ScalarField2D, path):
    """Write valid nodes as x,y,value rows."""
    x, X, Y, R = _coords(f.n)
    m = f.mask()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,value\n")
        for xv, yv, vv in zip(X[m], Y[m], f.values[m]):
            fh.write(f"{xv:.17g},{yv:.17g},{vv:.17g}\n")


def field_to_binary(f: ScalarField2D, path):
    """Little-endian dump: two int32 dims then row-major float64 node values."""
    with open(path, "wb") as fh:
        np.asarray(f.values.shape, dtype="<i4").tofile(fh)
        np.ascontiguousarray(f.values, dtype="<f8").tofile(fh)


def field_from_binary(path, valid_radius: float = 1.0 - DEFAULT_MARGIN,
                      extends: bool = False, name: str = "") -> ScalarField2D:
    with open(path, "rb") as fh:
        dims = np.fromfile(fh, dtype="<i4", count=2)
        vals = np.fromfile(fh, dtype="<f8").reshape(int(dims[0]), int(dims[1]))
    if dims[0] != dims[1]:
        raise GridMismatch("binary dump is not a square grid")
    h = 2.0 / (int(dims[0]) - 1)
    return ScalarField2D(vals, h, valid_radius, extends, name)
