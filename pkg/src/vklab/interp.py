"""Fast deterministic grid interpolation used by the rotation operators.

Two interpolants are supported: bilinear (order 1) and cubic B-spline
(order 3, coefficients from scipy's separable prefilter).  The evaluation
kernels are single-threaded numba loops with a fixed summation order, so
results are bit-reproducible and match scipy.ndimage.map_coordinates to
roundoff.

Order 3 is the default everywhere.  Differencing bilinear-interpolated
data amplifies the O(h^2) interpolation error by 1/h^2, which destroys
second-order convergence of any identity that takes a Hessian after a
rotation average; the cubic spline keeps the composite error at O(h^2).
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy import ndimage

DEFAULT_ORDER = 3


@njit(cache=True, fastmath=False)
def _eval_cubic(coeff, px, py, out):
    n0, n1 = coeff.shape
    for k in range(px.size):
        x = px[k]
        y = py[k]
        ix = int(np.floor(x))
        iy = int(np.floor(y))
        if ix < 1:
            ix = 1
        if ix > n0 - 3:
            ix = n0 - 3
        if iy < 1:
            iy = 1
        if iy > n1 - 3:
            iy = n1 - 3
        fx = x - ix
        fy = y - iy
        wx0 = (1.0 - fx) ** 3 / 6.0
        wx1 = (4.0 - 6.0 * fx * fx + 3.0 * fx ** 3) / 6.0
        wx2 = (1.0 + 3.0 * fx + 3.0 * fx * fx - 3.0 * fx ** 3) / 6.0
        wx3 = fx ** 3 / 6.0
        wy0 = (1.0 - fy) ** 3 / 6.0
        wy1 = (4.0 - 6.0 * fy * fy + 3.0 * fy ** 3) / 6.0
        wy2 = (1.0 + 3.0 * fy + 3.0 * fy * fy - 3.0 * fy ** 3) / 6.0
        wy3 = fy ** 3 / 6.0
        s = 0.0
        s += wx0 * (wy0 * coeff[ix - 1, iy - 1] + wy1 * coeff[ix - 1, iy]
                    + wy2 * coeff[ix - 1, iy + 1] + wy3 * coeff[ix - 1, iy + 2])
        s += wx1 * (wy0 * coeff[ix, iy - 1] + wy1 * coeff[ix, iy]
                    + wy2 * coeff[ix, iy + 1] + wy3 * coeff[ix, iy + 2])
        s += wx2 * (wy0 * coeff[ix + 1, iy - 1] + wy1 * coeff[ix + 1, iy]
                    + wy2 * coeff[ix + 1, iy + 1] + wy3 * coeff[ix + 1, iy + 2])
        s += wx3 * (wy0 * coeff[ix + 2, iy - 1] + wy1 * coeff[ix + 2, iy]
                    + wy2 * coeff[ix + 2, iy + 1] + wy3 * coeff[ix + 2, iy + 2])
        out[k] = s


@njit(cache=True, fastmath=False)
def _eval_cubic3(c0, c1, c2, px, py, o0, o1, o2):
    n0, n1 = c0.shape
    for k in range(px.size):
        x = px[k]
        y = py[k]
        ix = int(np.floor(x))
        iy = int(np.floor(y))
        if ix < 1:
            ix = 1
        if ix > n0 - 3:
            ix = n0 - 3
        if iy < 1:
            iy = 1
        if iy > n1 - 3:
            iy = n1 - 3
        fx = x - ix
        fy = y - iy
        wx0 = (1.0 - fx) ** 3 / 6.0
        wx1 = (4.0 - 6.0 * fx * fx + 3.0 * fx ** 3) / 6.0
        wx2 = (1.0 + 3.0 * fx + 3.0 * fx * fx - 3.0 * fx ** 3) / 6.0
        wx3 = fx ** 3 / 6.0
        wy0 = (1.0 - fy) ** 3 / 6.0
        wy1 = (4.0 - 6.0 * fy * fy + 3.0 * fy ** 3) / 6.0
        wy2 = (1.0 + 3.0 * fy + 3.0 * fy * fy - 3.0 * fy ** 3) / 6.0
        wy3 = fy ** 3 / 6.0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for a in range(4):
            i = ix - 1 + a
            if a == 0:
                wa = wx0
            elif a == 1:
                wa = wx1
            elif a == 2:
                wa = wx2
            else:
                wa = wx3
            j = iy - 1
            s0 += wa * (wy0 * c0[i, j] + wy1 * c0[i, j + 1] + wy2 * c0[i, j + 2] + wy3 * c0[i, j + 3])
            s1 += wa * (wy0 * c1[i, j] + wy1 * c1[i, j + 1] + wy2 * c1[i, j + 2] + wy3 * c1[i, j + 3])
            s2 += wa * (wy0 * c2[i, j] + wy1 * c2[i, j + 1] + wy2 * c2[i, j + 2] + wy3 * c2[i, j + 3])
        o0[k] = s0
        o1[k] = s1
        o2[k] = s2


@njit(cache=True, fastmath=False)
def _eval_linear(values, px, py, out):
    n0, n1 = values.shape
    for k in range(px.size):
        x = px[k]
        y = py[k]
        ix = int(np.floor(x))
        iy = int(np.floor(y))
        if ix < 0:
            ix = 0
        if ix > n0 - 2:
            ix = n0 - 2
        if iy < 0:
            iy = 0
        if iy > n1 - 2:
            iy = n1 - 2
        fx = x - ix
        fy = y - iy
        out[k] = ((1.0 - fx) * ((1.0 - fy) * values[ix, iy] + fy * values[ix, iy + 1])
                  + fx * ((1.0 - fy) * values[ix + 1, iy] + fy * values[ix + 1, iy + 1]))


class GridInterpolator:
    """Interpolator over one node array; prefilters once, samples many times."""

    def __init__(self, values: np.ndarray, order: int = DEFAULT_ORDER):
        if order not in (1, 3):
            raise ValueError("interpolation order must be 1 or 3")
        self.order = order
        values = np.ascontiguousarray(values, dtype=np.float64)
        if order == 3:
            self.coeff = ndimage.spline_filter(values, order=3, mode="mirror", output=np.float64)
        else:
            self.coeff = values

    def sample(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        out = np.empty(px.shape, dtype=np.float64)
        if self.order == 3:
            _eval_cubic(self.coeff, px.ravel(), py.ravel(), out.ravel())
        else:
            _eval_linear(self.coeff, px.ravel(), py.ravel(), out.ravel())
        return out


class GridInterpolator3:
    """Three channels sharing the same sample coordinates (matrix fields)."""

    def __init__(self, v0, v1, v2, order: int = DEFAULT_ORDER):
        if order not in (1, 3):
            raise ValueError("interpolation order must be 1 or 3")
        self.order = order
        if order == 3:
            self.c0 = ndimage.spline_filter(np.ascontiguousarray(v0, dtype=np.float64),
                                            order=3, mode="mirror", output=np.float64)
            self.c1 = ndimage.spline_filter(np.ascontiguousarray(v1, dtype=np.float64),
                                            order=3, mode="mirror", output=np.float64)
            self.c2 = ndimage.spline_filter(np.ascontiguousarray(v2, dtype=np.float64),
                                            order=3, mode="mirror", output=np.float64)
        else:
            self.c0 = np.ascontiguousarray(v0, dtype=np.float64)
            self.c1 = np.ascontiguousarray(v1, dtype=np.float64)
            self.c2 = np.ascontiguousarray(v2, dtype=np.float64)

    def sample(self, px, py):
        o0 = np.empty(px.shape, dtype=np.float64)
        o1 = np.empty(px.shape, dtype=np.float64)
        o2 = np.empty(px.shape, dtype=np.float64)
        if self.order == 3:
            _eval_cubic3(self.c0, self.c1, self.c2, px.ravel(), py.ravel(),
                         o0.ravel(), o1.ravel(), o2.ravel())
        else:
            _eval_linear(self.c0, px.ravel(), py.ravel(), o0.ravel())
            _eval_linear(self.c1, px.ravel(), py.ravel(), o1.ravel())
            _eval_linear(self.c2, px.ravel(), py.ravel(), o2.ravel())
        return o0, o1, o2
