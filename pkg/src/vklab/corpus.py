"""Built-in 2D test functions with exact Hessians and averaging oracles.

Every entry is a globally evaluable formula, so lifted fields carry data on
the whole square and the rotation interpolant never sees the mask rim.
``avg`` is the closed-form angular average where one exists (None otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .field2d import DEFAULT_H, DEFAULT_MARGIN, ScalarField2D, SymMatrixField2D, _coords, _n_from_h


@dataclass(frozen=True)
class CorpusFunction:
    name: str
    f: Callable
    hess: Callable  # (x, y) -> (fxx, fxy, fyy)
    avg: Optional[Callable] = None  # (r,) -> angular average, if closed-form

    def lift(self, h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> ScalarField2D:
        n = _n_from_h(h)
        _, X, Y, _ = _coords(n)
        return ScalarField2D(np.asarray(self.f(X, Y), dtype=float), h, 1.0 - margin, True, self.name)

    def lift_hessian(self, h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> SymMatrixField2D:
        n = _n_from_h(h)
        _, X, Y, _ = _coords(n)
        fxx, fxy, fyy = self.hess(X, Y)
        z = np.zeros((n, n))
        return SymMatrixField2D(np.asarray(fxx, dtype=float) + z, np.asarray(fxy, dtype=float) + z,
                                np.asarray(fyy, dtype=float) + z, h, 1.0 - margin, True,
                                f"hess({self.name})")


def _gauss(x, y, a=0.25, b=0.15, sig=0.35):
    return np.exp(-((x - a) ** 2 + (y - b) ** 2) / (2.0 * sig * sig))


def _gauss_hess(x, y, a=0.25, b=0.15, sig=0.35):
    g = _gauss(x, y, a, b, sig)
    s2 = sig * sig
    u = (x - a) / s2
    w = (y - b) / s2
    return (u * u - 1.0 / s2) * g, u * w * g, (w * w - 1.0 / s2) * g


_K1, _K2, _PH = 1.5, 0.8, 0.3


def _wave(x, y):
    return np.sin(_K1 * x + _K2 * y + _PH)


def _wave_hess(x, y):
    s = -np.sin(_K1 * x + _K2 * y + _PH)
    return _K1 * _K1 * s, _K1 * _K2 * s, _K2 * _K2 * s


CORPUS = (
    CorpusFunction(
        "x_squared",
        lambda x, y: x * x,
        lambda x, y: (2.0 + 0 * x, 0 * x, 0 * x),
        avg=lambda r: r * r / 2.0,
    ),
    CorpusFunction(
        "xy",
        lambda x, y: x * y,
        lambda x, y: (0 * x, 1.0 + 0 * x, 0 * x),
        avg=lambda r: 0.0 * r,
    ),
    CorpusFunction(
        "linear_x",
        lambda x, y: x,
        lambda x, y: (0 * x, 0 * x, 0 * x),
        avg=lambda r: 0.0 * r,
    ),
    CorpusFunction(
        "harmonic_cubic",
        lambda x, y: x ** 3 - 3.0 * x * y * y,
        lambda x, y: (6.0 * x, -6.0 * y, -6.0 * x),
        avg=lambda r: 0.0 * r,
    ),
    CorpusFunction(
        "radial_quartic",
        lambda x, y: 0.25 * (x * x + y * y) ** 2,
        lambda x, y: (3.0 * x * x + y * y, 2.0 * x * y, x * x + 3.0 * y * y),
        avg=lambda r: 0.25 * r ** 4,
    ),
    CorpusFunction(
        "x_fourth",
        lambda x, y: x ** 4,
        lambda x, y: (12.0 * x * x, 0 * x, 0 * x),
        avg=lambda r: 0.375 * r ** 4,
    ),
    CorpusFunction("gaussian", _gauss, _gauss_hess),
    CorpusFunction("wave", _wave, _wave_hess),
)

CORPUS_BY_NAME = {c.name: c for c in CORPUS}
