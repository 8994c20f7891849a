"""The standard smooth bump supported in (-1/2, 1/2) and helpers built on it.

eta(s) = exp(1 - 1/(1 - 4 s^2)) for |s| < 1/2, else 0.  Nonnegative, C-infinity,
max value 1 at s = 0, all derivatives vanish at the support endpoints.
First and second derivatives are supplied in closed form; the antiderivative
(which has no elementary closed form) is tabulated once on a dense grid.
"""

from __future__ import annotations

import numpy as np

_TABLE_N = 1 << 16


def eta(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 0.5
    g = np.ones_like(s)
    np.divide(1.0, 1.0 - 4.0 * s * s, out=g, where=inside)
    with np.errstate(over="ignore", under="ignore"):
        val = np.where(inside, np.exp(1.0 - g), 0.0)
    return val


def eta_d1(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 0.5
    g = np.ones_like(s)
    np.divide(1.0, 1.0 - 4.0 * s * s, out=g, where=inside)
    with np.errstate(over="ignore", under="ignore"):
        val = np.where(inside, -8.0 * s * g * g * np.exp(1.0 - g), 0.0)
    return val


def eta_d2(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 0.5
    g = np.ones_like(s)
    np.divide(1.0, 1.0 - 4.0 * s * s, out=g, where=inside)
    g2 = g * g
    # eta'' = (g'^2 - g'') eta with g' = 8 s g^2, g'' = 8 g^2 + 128 s^2 g^3
    poly = 64.0 * s * s * g2 * g2 - 8.0 * g2 - 128.0 * s * s * g2 * g
    with np.errstate(over="ignore", under="ignore"):
        val = np.where(inside, poly * np.exp(1.0 - g), 0.0)
    return val


def _build_table():
    s = np.linspace(-0.5, 0.5, _TABLE_N + 1)
    v = eta(s)
    cum = np.concatenate([[0.0], np.cumsum((v[1:] + v[:-1]) * 0.5 * (1.0 / _TABLE_N))])
    return s, cum


_TAB_S, _TAB_CUM = _build_table()

#: total mass of eta over its support
ETA_MASS = float(_TAB_CUM[-1])

#: sup-norms of the derivatives, used for relative thresholds
ETA_D1_MAX = float(np.max(np.abs(eta_d1(np.linspace(-0.5, 0.5, 20001)))))
ETA_D2_MAX = float(np.max(np.abs(eta_d2(np.linspace(-0.5, 0.5, 20001)))))


def eta_antiderivative(s):
    """Integral of eta from -1/2 to s (clamped outside the support)."""
    s = np.asarray(s, dtype=float)
    return np.interp(s, _TAB_S, _TAB_CUM, left=0.0, right=ETA_MASS)


class RadialBump:
    """Radial test direction whose slope is a scaled bump.

    f'(t) = amplitude * eta((t - center)/width), so f' is supported in
    (center - width/2, center + width/2) and f is its antiderivative.
    """

    def __init__(self, center: float, width: float, amplitude: float = 1.0):
        if width <= 0:
            raise ValueError("width must be positive")
        self.center = center
        self.width = width
        self.amplitude = amplitude

    def slope(self, t):
        return self.amplitude * eta((np.asarray(t, dtype=float) - self.center) / self.width)

    def slope_d1(self, t):
        return self.amplitude * eta_d1((np.asarray(t, dtype=float) - self.center) / self.width) / self.width

    def value(self, t):
        s = (np.asarray(t, dtype=float) - self.center) / self.width
        return self.amplitude * self.width * eta_antiderivative(s)


class ProductBump2D:
    """2D bump g(x, y) = eta((x-cx)/wx) * eta((y-cy)/wy), support a wx-by-wy box."""

    def __init__(self, cx: float, cy: float, wx: float, wy: float, amplitude: float = 1.0):
        self.cx, self.cy, self.wx, self.wy = cx, cy, wx, wy
        self.amplitude = amplitude

    def __call__(self, x, y):
        sx = (np.asarray(x, dtype=float) - self.cx) / self.wx
        sy = (np.asarray(y, dtype=float) - self.cy) / self.wy
        return self.amplitude * eta(sx) * eta(sy)

    def hessian(self, x, y):
        sx = (np.asarray(x, dtype=float) - self.cx) / self.wx
        sy = (np.asarray(y, dtype=float) - self.cy) / self.wy
        a = self.amplitude
        gxx = a * eta_d2(sx) * eta(sy) / self.wx**2
        gxy = a * eta_d1(sx) * eta_d1(sy) / (self.wx * self.wy)
        gyy = a * eta(sx) * eta_d2(sy) / self.wy**2
        return gxx, gxy, gyy

    def support_radius_bounds(self):
        """Min and max distance from the origin over the support box."""
        hx, hy = self.wx / 2.0, self.wy / 2.0
        corners = [(self.cx + sx * hx, self.cy + sy * hy) for sx in (-1, 1) for sy in (-1, 1)]
        rads = [np.hypot(px, py) for px, py in corners]
        # nearest point of the box to the origin
        nx = min(max(self.cx - hx, min(self.cx + hx, 0.0)), self.cx + hx)
        ny = min(max(self.cy - hy, min(self.cy + hy, 0.0)), self.cy + hy)
        return float(np.hypot(nx, ny)), float(max(rads))
