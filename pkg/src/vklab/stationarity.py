"""Admissible variations and the stationarity verdict for radial profiles.

A test direction f is admissible at V when the linearized constraint
cof(Hess V) : Hess f vanishes; V is (formally) stationary when the energy
pairing int Hess V : Hess f vanishes for every admissible f.  This module
generates admissible directions, measures both defects for arbitrary
candidates, and packages the result as a reproducible report.

Generated variation kinds:

* ``radial-plateau``    radial bumps whose slope lives where V' vanishes
* ``zero-hessian-2d``   2D bumps supported in an annulus where Hess V = 0
* ``rotated``           rotation pullbacks of zero-Hessian bumps
* ``symmetrized``       angular averages of zero-Hessian bumps
* ``harmonic``          Re/Im of (x + iy)^m; admissible iff cof Hess V ~ identity
* ``custom``            user-supplied candidates (kept even when inadmissible,
                        to support negative controls; they never affect the verdict)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .averaging import FD_HESSIAN_COEFF
from .bump import ProductBump2D, RadialBump
from .errors import NoPlateau, NotAdmissible
from .field2d import (DEFAULT_ANGLES, DEFAULT_H, DEFAULT_MARGIN, ScalarField2D,
                      SymMatrixField2D, angular_average_scalar, cof_2d,
                      field_from_function, hessian_fd, integral_2d, l2_norm_2d,
                      lift_radial, lift_radial_hessian, matrix_l2_norm, pairing_2d,
                      rotate_pullback_scalar)
from .interp import DEFAULT_ORDER
from .radial import (RadialField, RadialProfile, cof_pairing_radial, disk_integral,
                     energy, frobenius_pairing_radial, hessian_l2_norm)
from .rng import SplitMix64

#: relative tolerance for defects on the all-analytic radial path
RADIAL_TOL = 1e-8

#: relative plateau-detection thresholds per profile kind
EPS_PLATEAU = {"analytic": 1e-9, "sampled": 1e-6}

MIN_PLATEAU_CELLS = 8

#: variations with Hessian norm below this scale are trivial (constant-like)
TRIVIAL_NORM = 1e-12


def fd_tolerance(h: float) -> float:
    """Relative defect tolerance on any path involving 2D finite differences."""
    return 5.0 * FD_HESSIAN_COEFF * h * h


@dataclass
class VerifyConfig:
    seed: int = 12345
    j: int = 4096
    h: float = DEFAULT_H
    angles_m: int = DEFAULT_ANGLES
    margin: float = DEFAULT_MARGIN
    tol_adm: float = RADIAL_TOL
    tol_stat: float = RADIAL_TOL
    interp_order: int = DEFAULT_ORDER
    n_plateau: int = 24
    n_zero_hessian: int = 8
    n_rotated: int = 4
    n_symmetrized: int = 4
    n_harmonic: int = 4


@dataclass
class Variation:
    kind: str
    payload: Union[RadialProfile, ScalarField2D]
    adm_defect: float = math.nan
    stat_defect: float = math.nan
    norm_f: float = math.nan
    note: str = ""

    def is_radial(self) -> bool:
        return isinstance(self.payload, RadialProfile)


@dataclass
class VariationRecord:
    kind: str
    adm_defect: float
    stat_defect: float
    norm_f: float
    normalized: float
    admissible: bool
    passed: Optional[bool]  # None when excluded from the verdict


@dataclass
class StationarityReport:
    profile: str
    seed: int
    tol_adm: float
    tol_stat: float
    records: List[VariationRecord]
    verdict: str
    norm_v: float
    notes: List[str] = field(default_factory=list)

    def admissible_count(self) -> int:
        return sum(1 for r in self.records if r.admissible)

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "seed": self.seed,
            "tolerances": {"adm": self.tol_adm, "stat": self.tol_stat},
            "variations": [
                {
                    "kind": r.kind,
                    "adm_defect": r.adm_defect,
                    "stat_defect": r.stat_defect,
                    "norm_f": r.norm_f,
                    "normalized": r.normalized,
                    "pass": r.passed,
                }
                for r in self.records
            ],
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- defect measurements ---------------------------------------------------

def _radial_defects(v: RadialProfile, f: RadialProfile) -> Tuple[float, float, float]:
    pair = cof_pairing_radial(v, f)
    adm = math.sqrt(max(disk_integral(RadialField(pair.grid, pair.values**2)), 0.0))
    stat = disk_integral(frobenius_pairing_radial(v, f))
    norm_f = math.sqrt(max(energy(f, validate=False), 0.0))
    return adm, stat, norm_f


def _hessian_of(V: Union[RadialProfile, ScalarField2D], h: float, margin: float) -> SymMatrixField2D:
    if isinstance(V, RadialProfile):
        return lift_radial_hessian(V, h, margin)
    return hessian_fd(V)


def _field_defects(hv: SymMatrixField2D, cof_hv: SymMatrixField2D,
                   f: ScalarField2D) -> Tuple[float, float, float]:
    hf = hessian_fd(f)
    adm = l2_norm_2d(pairing_2d(cof_hv, hf))
    stat = integral_2d(pairing_2d(hv, hf)).value
    norm_f = matrix_l2_norm(hf)
    return adm, stat, norm_f


def admissibility_defect(V, f, h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> float:
    """L2 norm of cof(Hess V) : Hess f over the working domain."""
    if isinstance(V, RadialProfile) and isinstance(f, RadialProfile):
        return _radial_defects(V, f)[0]
    hv = _hessian_of(V, h, margin)
    f2 = f if isinstance(f, ScalarField2D) else lift_radial(f, h, margin)
    return _field_defects(hv, cof_2d(hv), f2)[0]


def is_admissible(V, f, tol_adm: Optional[float] = None,
                  h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> Tuple[bool, float]:
    """Admissibility test: defect <= tol * |Hess V| * |Hess f| (L2 norms).

    Returns the verdict together with the measured defect.
    """
    radial_pair = isinstance(V, RadialProfile) and isinstance(f, RadialProfile)
    if tol_adm is None:
        tol_adm = RADIAL_TOL if radial_pair else fd_tolerance(h)
    if radial_pair:
        adm, _, norm_f = _radial_defects(V, f)
        norm_v = hessian_l2_norm(V)
    else:
        hv = _hessian_of(V, h, margin)
        f2 = f if isinstance(f, ScalarField2D) else lift_radial(f, h, margin)
        adm, _, norm_f = _field_defects(hv, cof_2d(hv), f2)
        norm_v = hessian_l2_norm(V) if isinstance(V, RadialProfile) else matrix_l2_norm(hv)
    return adm <= tol_adm * norm_v * norm_f, adm


def stationarity_defect(V, f, h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> float:
    """Energy pairing int Hess V : Hess f over the working domain.

    The value is meaningful for the stationarity verdict only when f is
    admissible; callers enforce that (see checked_stationarity_defect).
    """
    if isinstance(V, RadialProfile) and isinstance(f, RadialProfile):
        return _radial_defects(V, f)[1]
    hv = _hessian_of(V, h, margin)
    f2 = f if isinstance(f, ScalarField2D) else lift_radial(f, h, margin)
    return _field_defects(hv, cof_2d(hv), f2)[1]


def checked_stationarity_defect(V, f, tol_adm: Optional[float] = None,
                                h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> float:
    """Stationarity defect guarded by the admissibility precondition."""
    ok, adm = is_admissible(V, f, tol_adm, h, margin)
    if not ok:
        raise NotAdmissible(f"admissibility defect {adm:.3e} exceeds the tolerance")
    return stationarity_defect(V, f, h, margin)


# -- plateau detection -----------------------------------------------------

def detect_plateaus(v: RadialProfile, eps: Optional[float] = None,
                    min_cells: int = MIN_PLATEAU_CELLS) -> List[Tuple[float, float]]:
    """Maximal grid intervals where both v' and v'' vanish relative to their sups.

    Requiring v'' to vanish as well rejects isolated zeros of v' (bump crests),
    which are not plateaus.
    """
    if eps is None:
        eps = EPS_PLATEAU[v.kind]
    s1 = float(np.max(np.abs(v.v1)))
    s2 = float(np.max(np.abs(v.v2)))
    ok = (np.abs(v.v1) <= eps * s1) & (np.abs(v.v2) <= eps * s2)
    out = []
    i = 0
    n = ok.size
    while i < n:
        if ok[i]:
            j = i
            while j + 1 < n and ok[j + 1]:
                j += 1
            if j - i + 1 >= min_cells:
                out.append((float(v.grid[i]), float(v.grid[j])))
            i = j + 1
        else:
            i += 1
    return out


# -- generators ------------------------------------------------------------

def _bump_profile(bump: RadialBump, j: int, name: str) -> RadialProfile:
    return RadialProfile.analytic(name, bump.value, bump.slope, bump.slope_d1,
                                  j=j, extendable=True, validate=False)


def gen_plateau_variations(V: RadialProfile, count: int, rng: SplitMix64,
                           j: Optional[int] = None) -> Tuple[List[Variation], List[str]]:
    """Radial bumps with slope compactly supported on plateaus of V'.

    Falls back to a single constant (zero-Hessian) variation when V' never
    vanishes on an interval; the report then carries an explanatory note.
    """
    j = j if j is not None else V.grid.size
    plateaus = detect_plateaus(V)
    hq = 1.0 / j
    plateaus = [(a, b) for a, b in plateaus if (b - a) > 30 * hq]
    if not plateaus:
        flat = RadialProfile.analytic(
            "constant-direction",
            lambda t: np.ones_like(np.asarray(t, dtype=float)),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            j=j, validate=False)
        note = ("no nontrivial radial admissible directions: V' has no plateau, "
                "only constant directions remain")
        return [Variation("radial-plateau", flat, note="constant direction")], [note]
    out = []
    for k in range(count):
        a, b = plateaus[k % len(plateaus)]
        r = rng.spawn(k)
        width_avail = b - a
        pad = 0.05 * width_avail
        w = r.uniform(max(20 * hq, 0.15 * width_avail), 0.5 * (width_avail - 2 * pad))
        c = r.uniform(a + pad + 0.5 * w, b - pad - 0.5 * w)
        bump = RadialBump(c, w)
        out.append(Variation("radial-plateau", _bump_profile(bump, j, f"plateau-bump-{k}")))
    return out, []


def _annuli_for_2d(V: RadialProfile, h: float, margin: float) -> List[Tuple[float, float]]:
    r_max = (1.0 - margin) - (math.sqrt(2.0) + 2.0) * h
    annuli = []
    for a, b in detect_plateaus(V):
        lo, hi = max(a, 4 * h), min(b, r_max)
        if hi - lo > 14 * h:
            annuli.append((lo, hi))
    return annuli


def gen_zero_hessian_variations(V: RadialProfile, count: int, rng: SplitMix64,
                                h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> List[Variation]:
    """2D product bumps supported where Hess V vanishes; admissible by construction.

    Raises NoPlateau when no plateau annulus intersects the working disk with
    room for a resolvable bump.
    """
    annuli = _annuli_for_2d(V, h, margin)
    if not annuli:
        raise NoPlateau(
            f"profile {V.name!r} has no plateau annulus inside the working disk")
    out = []
    for k in range(count):
        r0, r1 = annuli[k % len(annuli)]
        r = rng.spawn(1000 + k)
        width = r1 - r0
        hw = r.uniform(max(3 * h, 0.10 * width), 0.18 * width)
        d = hw * math.sqrt(2.0)
        rc = r.uniform(r0 + d + 0.02 * width, r1 - d - 0.02 * width)
        theta = r.uniform(0.0, 2.0 * math.pi)
        bump = ProductBump2D(rc * math.cos(theta), rc * math.sin(theta), 2 * hw, 2 * hw)
        fld = field_from_function(bump, h, margin, name=f"bump2d-{k}", extends=True)
        out.append(Variation("zero-hessian-2d", fld))
    return out


def gen_harmonic_variations(V: RadialProfile, count: int,
                            h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> List[Variation]:
    """Real and imaginary parts of (x + i y)^m, m = 2..6.

    These solve the constraint exactly when cof Hess V is a multiple of the
    identity (then the pairing is a Laplacian); for other profiles they are
    kept as measured, typically inadmissible, candidates.
    """
    out = []
    specs = []
    for m in range(2, 7):
        specs.append((m, True))
        specs.append((m, False))
    for m, real in specs[:count]:
        def fn(x, y, m=m, real=real):
            z = (np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)) ** m
            return np.real(z) if real else np.imag(z)

        name = f"{'re' if real else 'im'}-z^{m}"
        out.append(Variation("harmonic", field_from_function(fn, h, margin, name=name)))
    return out


def symmetrize_variation(V: RadialProfile, f: ScalarField2D,
                         m: int = DEFAULT_ANGLES, order: int = DEFAULT_ORDER,
                         h: float = DEFAULT_H, margin: float = DEFAULT_MARGIN) -> Variation:
    """Angular average of f, measured as a variation of V.

    Admissibility survives averaging (the cofactor pairing commutes with the
    average for radial V), which this measures rather than assumes.
    """
    favg = angular_average_scalar(f, m, order)
    var = Variation("symmetrized", favg)
    _measure(_context_for(V, h, margin), var)
    return var


# -- proposition verification ----------------------------------------------

class _VContext:
    def __init__(self, V: RadialProfile, h: float, margin: float):
        self.V = V
        self.h = h
        self.margin = margin
        self.norm_v = hessian_l2_norm(V)
        self.hv = lift_radial_hessian(V, h, margin)
        self.cof_hv = cof_2d(self.hv)


_ctx_cache: dict = {}


def _context_for(V: RadialProfile, h: float, margin: float) -> _VContext:
    key = (id(V), h, margin)
    ctx = _ctx_cache.get(key)
    if ctx is None or ctx.V is not V:
        ctx = _VContext(V, h, margin)
        _ctx_cache[key] = ctx
    return ctx


def _measure(ctx: _VContext, var: Variation) -> Variation:
    if var.is_radial():
        var.adm_defect, var.stat_defect, var.norm_f = _radial_defects(ctx.V, var.payload)
    else:
        var.adm_defect, var.stat_defect, var.norm_f = _field_defects(ctx.hv, ctx.cof_hv, var.payload)
    return var


def _judge(ctx: _VContext, var: Variation, tol_adm_r: float, tol_stat_r: float,
           tol_2d: float) -> VariationRecord:
    tol_adm = tol_adm_r if var.is_radial() else max(tol_adm_r, tol_2d)
    tol_stat = tol_stat_r if var.is_radial() else max(tol_stat_r, tol_2d)
    denom = ctx.norm_v * var.norm_f
    if var.norm_f <= TRIVIAL_NORM * (1.0 + ctx.norm_v):
        # constant-like direction: defects must vanish outright
        normalized = 0.0 if var.stat_defect == 0.0 else math.inf
        admissible = var.adm_defect <= tol_adm * max(ctx.norm_v, 1.0) * TRIVIAL_NORM
        passed: Optional[bool] = bool(admissible and abs(var.stat_defect) <= tol_stat * max(ctx.norm_v, 1.0) * TRIVIAL_NORM)
    else:
        admissible = var.adm_defect <= tol_adm * denom
        normalized = abs(var.stat_defect) / denom if denom > 0 else (
            0.0 if var.stat_defect == 0.0 else math.inf)
        passed = bool(normalized <= tol_stat) if admissible else None
    return VariationRecord(var.kind, var.adm_defect, var.stat_defect, var.norm_f,
                           normalized, bool(admissible), passed)


def verify_proposition(V: RadialProfile, config: Optional[VerifyConfig] = None,
                       user_variations: Sequence[Variation] = ()) -> StationarityReport:
    """Assemble admissible variations, measure both defects, and give a verdict.

    The verdict is PASS when every admissible variation has normalized
    stationarity defect within tolerance.  Inadmissible candidates (e.g.
    negative controls passed through ``user_variations``) are reported with
    their defects but never counted.
    """
    cfg = config if config is not None else VerifyConfig()
    ctx = _context_for(V, cfg.h, cfg.margin)
    rng = SplitMix64(cfg.seed)
    notes: List[str] = []
    if V.kind == "sampled":
        notes.append("profile is sampled: tolerances are calibrated for analytic inputs")

    variations: List[Variation] = []
    plats, plat_notes = gen_plateau_variations(V, cfg.n_plateau, rng.spawn(1), j=V.grid.size)
    notes.extend(plat_notes)
    variations.extend(plats)

    bumps2d: List[Variation] = []
    if cfg.n_zero_hessian > 0:
        try:
            bumps2d = gen_zero_hessian_variations(V, cfg.n_zero_hessian, rng.spawn(2),
                                                  cfg.h, cfg.margin)
            variations.extend(bumps2d)
        except NoPlateau as exc:
            notes.append(f"zero-hessian class skipped: {exc}")

    if cfg.n_rotated > 0 and bumps2d:
        rrot = rng.spawn(3)
        for k in range(cfg.n_rotated):
            src = bumps2d[k % len(bumps2d)]
            phi = rrot.spawn(k).uniform(0.0, 2.0 * math.pi)
            rotated = rotate_pullback_scalar(src.payload, phi, cfg.interp_order)
            variations.append(Variation("rotated", rotated))

    if cfg.n_symmetrized > 0 and bumps2d:
        for k in range(cfg.n_symmetrized):
            src = bumps2d[k % len(bumps2d)]
            favg = angular_average_scalar(src.payload, cfg.angles_m, cfg.interp_order)
            variations.append(Variation("symmetrized", favg))
    elif cfg.n_symmetrized > 0:
        notes.append("symmetrized class skipped: no 2D bump sources")

    if cfg.n_harmonic > 0:
        variations.extend(gen_harmonic_variations(V, cfg.n_harmonic, cfg.h, cfg.margin))

    for vu in user_variations:
        variations.append(Variation("custom", vu.payload if isinstance(vu, Variation) else vu))

    tol_2d = fd_tolerance(cfg.h)
    records = []
    for var in variations:
        _measure(ctx, var)
        records.append(_judge(ctx, var, cfg.tol_adm, cfg.tol_stat, tol_2d))

    judged = [r.passed for r in records if r.passed is not None]
    verdict = "PASS" if all(judged) else "FAIL"
    n_inadm = sum(1 for r in records if not r.admissible)
    if n_inadm:
        notes.append(f"{n_inadm} inadmissible candidate(s) reported but excluded from the verdict")
    return StationarityReport(V.name, cfg.seed, cfg.tol_adm, cfg.tol_stat, records,
                              verdict, ctx.norm_v, notes)
