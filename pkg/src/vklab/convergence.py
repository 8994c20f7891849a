"""Grid refinement studies backing every tolerance used by the lab.

Two families of checks: the weighted radial quadrature against a closed-form
integral, and the 2D finite-difference pipeline against the radial closed
forms (determinant and energy density) for lifted profiles.  Each check is
run on a refinement ladder and must show observed order >= 1.9, except when
the scheme is exact on the profile (errors at the roundoff floor).
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .field2d import _coords, det_2d, hessian_fd, lift_radial, pairing_2d
from .radial import (RadialField, RadialProfile, det_hessian_at, disk_integral,
                     energy_density_radial, quadrature_grid)

MIN_ORDER = 1.9

#: errors below this scale count as exact (scheme reproduces the profile)
EXACT_FLOOR = 1e-9

#: pointwise radial/2D comparisons exclude this disk: 1/t weights amplify FD noise
EXCLUSION_RADIUS = 0.05


def _orders(errors: Sequence[float]) -> List[Optional[float]]:
    out = []
    for a, b in zip(errors, errors[1:]):
        if a <= EXACT_FLOOR or b <= EXACT_FLOOR:
            out.append(None)
        else:
            out.append(math.log2(a / b))
    return out


def _passes(errors, orders) -> bool:
    if all(e <= EXACT_FLOOR for e in errors):
        return True
    return all(o is None or o >= MIN_ORDER for o in orders) and any(o is not None for o in orders)


def quadrature_study(j_finest: int = 4096, refinements: int = 3) -> dict:
    """Midpoint-rule error on the closed-form integrand 10 t^4 (exact 10 pi / 3)."""
    if refinements < 2:
        raise ConfigError("a convergence study needs at least two resolutions")
    exact = 10.0 * math.pi / 3.0
    js = [j_finest >> (refinements - 1 - k) for k in range(refinements)]
    if js[0] < 8:
        raise ConfigError("coarsest quadrature grid is degenerate")
    errors = []
    for j in js:
        t = quadrature_grid(j)
        errors.append(abs(disk_integral(RadialField(t, 10.0 * t**4)) - exact))
    orders = _orders(errors)
    return {"grids": js, "errors": errors, "orders": orders,
            "pass": _passes(errors, orders)}


def _consistency_errors(profile: RadialProfile, h: float, margin: float) -> Dict[str, float]:
    lifted = lift_radial(profile, h, margin)
    hess = hessian_fd(lifted)
    det = det_2d(hess)
    dens = pairing_2d(hess, hess)
    R = _coords(lifted.n)[3]
    rim = min(det.valid_radius, 1.0 - margin)
    sel = (R >= EXCLUSION_RADIUS) & (R <= rim)
    r = R[sel]
    det_exact = profile.eval(r, 2) * profile.eval(r, 1) / r
    dens_exact = profile.eval(r, 2) ** 2 + (profile.eval(r, 1) / r) ** 2
    return {
        "det": float(np.max(np.abs(det.values[sel] - det_exact))),
        "density": float(np.max(np.abs(dens.values[sel] - dens_exact))),
    }


def radial_2d_consistency_study(profile: RadialProfile, h_finest: float,
                                refinements: int = 3, margin: float = 0.05) -> dict:
    """FD determinant and density against the radial closed forms on a ladder."""
    if refinements < 2:
        raise ConfigError("a convergence study needs at least two resolutions")
    hs = [h_finest * (1 << (refinements - 1 - k)) for k in range(refinements)]
    det_errors = []
    dens_errors = []
    for h in hs:
        errs = _consistency_errors(profile, h, margin)
        det_errors.append(errs["det"])
        dens_errors.append(errs["density"])
    det_orders = _orders(det_errors)
    dens_orders = _orders(dens_errors)
    return {
        "profile": profile.name,
        "spacings": hs,
        "det_errors": det_errors,
        "det_orders": det_orders,
        "det_pass": _passes(det_errors, det_orders),
        "density_errors": dens_errors,
        "density_orders": dens_orders,
        "density_pass": _passes(dens_errors, dens_orders),
    }


def run_convergence_study(profiles: Sequence[RadialProfile], j_finest: int = 4096,
                          h_finest: float = 2.0 / 512, refinements: int = 3,
                          margin: float = 0.05) -> dict:
    quad = quadrature_study(j_finest, refinements)
    consistency = [radial_2d_consistency_study(p, h_finest, refinements, margin)
                   for p in profiles]
    ok = quad["pass"] and all(c["det_pass"] and c["density_pass"] for c in consistency)
    return {
        "quadrature": quad,
        "radial_2d": consistency,
        "verdict": "PASS" if ok else "FAIL",
    }
