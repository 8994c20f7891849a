"""Radial profiles on the unit disk and their closed-form Hessian operators.

A radially symmetric function V(x) = v(|x|) has polar Hessian eigenvalues
v''(t) (radial) and v'(t)/t (tangential).  Every operator here is a closed
form in (v, v', v''): Hessian determinant, cofactor pairing, Frobenius
pairing, bending-energy density, and weighted disk integrals.

Profiles are immutable after construction and all operations are pure
functions, so everything in this module is safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import GridMismatch, InvalidProfile, NonFiniteValue

DEFAULT_J = 4096

#: tolerance for the v'(0+) = 0 membership check
TOL_ORIGIN = 1e-6


def quadrature_grid(j: int = DEFAULT_J) -> np.ndarray:
    """Cell-centered grid t_k = (k + 1/2)/j on (0, 1); never touches t = 0."""
    if j < 2:
        raise ValueError("need at least 2 quadrature cells")
    return (np.arange(j) + 0.5) / j


@dataclass(frozen=True)
class RadialField:
    """Samples of a scalar function of the radius on a profile's grid."""

    grid: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.grid.shape != self.values.shape:
            raise GridMismatch("grid and values must have the same shape")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _require_same_grid(a, b):
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise GridMismatch("operands live on different radial grids")


def _fd_derivatives(t: np.ndarray, v: np.ndarray):
    """Order-2 finite differences on a (possibly nonuniform) increasing grid.

    Central 3-point formulas in the interior; one-sided 4-point stencils at
    both ends (weights from a local Vandermonde solve, exact on cubics).
    """
    n = t.size
    if n < 4:
        raise InvalidProfile("sampled profiles need at least 4 points")
    d1 = np.empty(n)
    d2 = np.empty(n)
    a = t[1:-1] - t[:-2]
    b = t[2:] - t[1:-1]
    d1[1:-1] = (-b / (a * (a + b))) * v[:-2] + ((b - a) / (a * b)) * v[1:-1] + (a / (b * (a + b))) * v[2:]
    d2[1:-1] = 2.0 * (v[:-2] / (a * (a + b)) - v[1:-1] / (a * b) + v[2:] / (b * (a + b)))

    def end_weights(dt, order):
        m = np.vander(dt, 4, increasing=True).T  # m[k, i] = dt_i^k
        rhs = np.zeros(4)
        rhs[order] = math.factorial(order)
        return np.linalg.solve(m, rhs)

    head = np.arange(4)
    tail = np.arange(n - 4, n)
    d1[0] = end_weights(t[head] - t[0], 1) @ v[head]
    d2[0] = end_weights(t[head] - t[0], 2) @ v[head]
    d1[-1] = end_weights(t[tail] - t[-1], 1) @ v[tail]
    d2[-1] = end_weights(t[tail] - t[-1], 2) @ v[tail]
    return d1, d2


class RadialProfile:
    """A scalar profile v on [0, 1) with first and second derivatives.

    kind "analytic": closed-form evaluators for v, v', v'' cached on the
    quadrature grid.  kind "sampled": values on a strictly increasing grid
    in (0, 1), derivatives from the module's finite-difference rule unless
    supplied explicitly (e.g. read back from CSV).
    """

    def __init__(self, kind, name, grid, v, v1, v2, evaluators=None, extendable=False):
        self.kind = kind
        self.name = name
        self.grid = grid
        self.v = v
        self.v1 = v1
        self.v2 = v2
        self._evaluators = evaluators
        self.extendable = extendable

    # -- constructors -------------------------------------------------

    @staticmethod
    def analytic(name: str, e0: Callable, e1: Callable, e2: Callable,
                 j: int = DEFAULT_J, extendable: bool = True, validate: bool = True):
        grid = quadrature_grid(j)
        v = np.asarray(e0(grid), dtype=float)
        v1 = np.asarray(e1(grid), dtype=float)
        v2 = np.asarray(e2(grid), dtype=float)
        p = RadialProfile("analytic", name, grid, v, v1, v2, (e0, e1, e2), extendable)
        if validate:
            p.validate()
        return p

    @staticmethod
    def sampled(t, v, name: str = "sampled", v1=None, v2=None, validate: bool = True):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.ndim != 1 or t.size != v.size:
            raise InvalidProfile("need matching 1D sample arrays")
        if not np.all(np.diff(t) > 0):
            raise InvalidProfile("sample grid must be strictly increasing")
        if t[0] <= 0.0 or t[-1] >= 1.0:
            raise InvalidProfile("sample points must lie in the open interval (0, 1)")
        if v1 is None or v2 is None:
            v1, v2 = _fd_derivatives(t, v)
        else:
            v1 = np.asarray(v1, dtype=float)
            v2 = np.asarray(v2, dtype=float)
        p = RadialProfile("sampled", name, t, v, v1, v2, None, False)
        if validate:
            p.validate()
        return p

    # -- evaluation ----------------------------------------------------

    def eval(self, t, deriv: int = 0):
        """Evaluate v (deriv=0), v' (1) or v'' (2) at arbitrary radii."""
        t = np.asarray(t, dtype=float)
        if self.kind == "analytic":
            return np.asarray(self._evaluators[deriv](t), dtype=float)
        from scipy.interpolate import CubicSpline

        if not hasattr(self, "_spline"):
            self._spline = CubicSpline(self.grid, self.v, bc_type="natural")
        return self._spline(np.clip(t, self.grid[0], self.grid[-1]), nu=deriv)

    # -- invariants ----------------------------------------------------

    def validate(self):
        for arr, label in ((self.v, "v"), (self.v1, "v'"), (self.v2, "v''")):
            if not np.all(np.isfinite(arr)):
                raise InvalidProfile(f"non-finite {label} samples in profile {self.name!r}")
        sup_v2 = float(np.max(np.abs(self.v2))) if self.v2.size else 0.0
        if self.kind == "analytic":
            slope0 = float(np.asarray(self._evaluators[1](np.array([0.0]))).ravel()[0])
            if abs(slope0) > TOL_ORIGIN * (1.0 + sup_v2):
                raise InvalidProfile(
                    f"profile {self.name!r} has v'(0) = {slope0:.3e}; "
                    "membership in the finite-energy class requires v'(0+) = 0"
                )
        else:
            # |v'(t0)| <= tol*(1 + sup|v''|) + t0*sup|v''| since v'(0+) = 0
            t0 = self.grid[0]
            bound = TOL_ORIGIN * (1.0 + sup_v2) + t0 * sup_v2
            if abs(self.v1[0]) > bound:
                raise InvalidProfile(
                    f"profile {self.name!r}: |v'({t0:.3g})| = {abs(self.v1[0]):.3e} "
                    f"exceeds the origin bound {bound:.3e}"
                )
        if not np.isfinite(energy(self, validate=False)):
            raise InvalidProfile(f"profile {self.name!r} has non-finite bending energy")

    def scaled(self, factor: float, name: Optional[str] = None):
        name = name if name is not None else f"{factor}*{self.name}"
        if self.kind == "analytic":
            e0, e1, e2 = self._evaluators
            return RadialProfile(
                "analytic", name, self.grid, factor * self.v, factor * self.v1, factor * self.v2,
                (lambda t: factor * e0(t), lambda t: factor * e1(t), lambda t: factor * e2(t)),
                self.extendable,
            )
        return RadialProfile("sampled", name, self.grid, factor * self.v,
                             factor * self.v1, factor * self.v2, None, False)


def combine(coeffs, profiles, name: str = "combination") -> RadialProfile:
    """Linear combination of analytic profiles on a shared grid."""
    base = profiles[0]
    for p in profiles[1:]:
        _require_same_grid(base, p)
    v = sum(c * p.v for c, p in zip(coeffs, profiles))
    v1 = sum(c * p.v1 for c, p in zip(coeffs, profiles))
    v2 = sum(c * p.v2 for c, p in zip(coeffs, profiles))
    evs = None
    if all(p.kind == "analytic" for p in profiles):
        pairs = [(c, p._evaluators) for c, p in zip(coeffs, profiles)]

        def make(k):
            return lambda t: sum(c * e[k](t) for c, e in pairs)

        evs = (make(0), make(1), make(2))
        return RadialProfile("analytic", name, base.grid, v, v1, v2, evs,
                             all(p.extendable for p in profiles))
    return RadialProfile("sampled", name, base.grid, v, v1, v2, None, False)


# -- builtin profiles ---------------------------------------------------

def paraboloid(j: int = DEFAULT_J) -> RadialProfile:
    """v(t) = t^2/2, the lift of |x|^2/2 with identity Hessian."""
    return RadialProfile.analytic(
        "paraboloid",
        lambda t: 0.5 * np.asarray(t, dtype=float) ** 2,
        lambda t: np.asarray(t, dtype=float),
        lambda t: np.ones_like(np.asarray(t, dtype=float)),
        j=j,
    )


def quartic(j: int = DEFAULT_J) -> RadialProfile:
    """v(t) = t^4/4."""
    return RadialProfile.analytic(
        "quartic",
        lambda t: 0.25 * np.asarray(t, dtype=float) ** 4,
        lambda t: np.asarray(t, dtype=float) ** 3,
        lambda t: 3.0 * np.asarray(t, dtype=float) ** 2,
        j=j,
    )


def constant(c: float = 1.0, j: int = DEFAULT_J) -> RadialProfile:
    return RadialProfile.analytic(
        "constant",
        lambda t: np.full_like(np.asarray(t, dtype=float), c),
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        j=j,
    )


# -- operators ----------------------------------------------------------

def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue(f"non-finite samples in {what}")


def det_hessian_radial(v: RadialProfile) -> RadialField:
    """Hessian determinant k(t) = v''(t) v'(t) / t on the profile's grid.

    Sampled profiles get a one-sided linear extrapolation at the innermost
    point, where the 1/t weight amplifies finite-difference noise.
    """
    t = v.grid
    k = v.v2 * v.v1 / t
    if v.kind == "sampled" and k.size >= 3:
        k = k.copy()
        r = (t[0] - t[1]) / (t[2] - t[1])
        k[0] = k[1] + r * (k[2] - k[1])
    _check_finite(k, f"det of {v.name!r}")
    return RadialField(t, k, f"det({v.name})")


def det_hessian_at(v: RadialProfile, t) -> np.ndarray:
    """Hessian determinant at arbitrary radii via the profile evaluators."""
    t = np.asarray(t, dtype=float)
    return v.eval(t, 2) * v.eval(t, 1) / t


def det_hessian_slope_form(v: RadialProfile) -> RadialField:
    """Same determinant via (2t)^{-1} d/dt[(v')^2], the independent route.

    Analytic profiles differentiate the square by the product rule; sampled
    profiles difference the sampled (v')^2 with the module's FD rule.
    """
    t = v.grid
    if v.kind == "analytic":
        vals = (2.0 * v.v1 * v.v2) / (2.0 * t)
    else:
        d1, _ = _fd_derivatives(t, v.v1 * v.v1)
        vals = d1 / (2.0 * t)
    _check_finite(vals, f"slope-form det of {v.name!r}")
    return RadialField(t, vals, f"det-slope({v.name})")


def cof_pairing_radial(v: RadialProfile, f: RadialProfile) -> RadialField:
    """cof(Hess V) : Hess F for radial V, F: v'' f'/t + f'' v'/t."""
    _require_same_grid(v, f)
    t = v.grid
    vals = v.v2 * f.v1 / t + f.v2 * v.v1 / t
    return RadialField(t, vals, f"cof({v.name}):{f.name}")


def cof_pairing_product_form(v: RadialProfile, f: RadialProfile) -> RadialField:
    """Algebraically equal route (v' f')'(t)/t used for cross-checks."""
    _require_same_grid(v, f)
    t = v.grid
    if v.kind == "analytic" and f.kind == "analytic":
        vals = (v.v2 * f.v1 + v.v1 * f.v2) / t
    else:
        d1, _ = _fd_derivatives(t, v.v1 * f.v1)
        vals = d1 / t
    return RadialField(t, vals, f"cof-product({v.name}:{f.name})")


def frobenius_pairing_radial(v: RadialProfile, f: RadialProfile) -> RadialField:
    """Hess V : Hess F for radial profiles: v'' f'' + v' f' / t^2."""
    _require_same_grid(v, f)
    t = v.grid
    vals = v.v2 * f.v2 + v.v1 * f.v1 / (t * t)
    return RadialField(t, vals, f"frob({v.name}:{f.name})")


def energy_density_radial(v: RadialProfile) -> RadialField:
    """|Hess V|^2 as a function of the radius: (v'')^2 + (v'/t)^2."""
    t = v.grid
    vals = v.v2 * v.v2 + (v.v1 / t) ** 2
    _check_finite(vals, f"energy density of {v.name!r}")
    return RadialField(t, vals, f"density({v.name})")


def disk_integral(g: RadialField) -> float:
    """2*pi * integral of g(t) t dt over (0, 1) by the midpoint-type rule.

    Cell weights come from the half-distance cell edges clamped to [0, 1];
    on the canonical cell-centered grid this is exactly the midpoint rule.
    """
    _check_finite(g.values, f"integrand {g.name!r}")
    t = g.grid
    edges = np.concatenate([[0.0], 0.5 * (t[1:] + t[:-1]), [1.0]])
    w = np.diff(edges)
    return float(2.0 * np.pi * np.sum(g.values * t * w))


def energy(v: RadialProfile, validate: bool = True) -> float:
    """Bending energy: integral of |Hess V|^2 over the unit disk."""
    t = v.grid
    vals = v.v2 * v.v2 + (v.v1 / t) ** 2
    if validate:
        _check_finite(vals, f"energy density of {v.name!r}")
    edges = np.concatenate([[0.0], 0.5 * (t[1:] + t[:-1]), [1.0]])
    w = np.diff(edges)
    return float(2.0 * np.pi * np.sum(vals * t * w))


def hessian_l2_norm(v: RadialProfile) -> float:
    """L2 norm of the Hessian over the disk, sqrt of the bending energy."""
    return float(np.sqrt(max(energy(v, validate=False), 0.0)))


# -- CSV serialization ---------------------------------------------------

CSV_HEADER = "t,v,v1,v2"


def profile_to_csv(v: RadialProfile, path):
    rows = [CSV_HEADER]
    for t, a, b, c in zip(v.grid, v.v, v.v1, v.v2):
        rows.append(f"{t:.17g},{a:.17g},{b:.17g},{c:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def profile_from_csv(path, name: Optional[str] = None) -> RadialProfile:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise InvalidProfile(f"expected header {CSV_HEADER!r}, got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != 4:
        raise InvalidProfile("profile CSV must have 4 columns")
    label = name if name is not None else str(path)
    return RadialProfile.sampled(data[:, 0], data[:, 1], label, v1=data[:, 2], v2=data[:, 3])
