"""The bump family: one constraint field, infinitely many stationary profiles.

The base profile stacks scaled copies of a smooth bump on a strictly
increasing sequence of intervals (t_n, t_{n+1}) accumulating at R, the n-th
copy scaled by (t_{n+1} - t_n)^n.  Sign-flipping the profile on any single
interval preserves |v'|, hence the Hessian determinant and the energy
density, while producing a genuinely different profile - so the constraint
field det Hess V admits as many radially symmetric solutions as there are
intervals, all of them stationary.

The series is truncated where the C^2 norm of a term, which scales like
(t_{n+1} - t_n)^(n-2), falls below double-precision resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .bump import eta, eta_d1, eta_d2
from .errors import IndexOutOfRange, PreconditionNotVerified, SpecInvalid
from .radial import (RadialProfile, det_hessian_radial, energy, energy_density_radial)
from .stationarity import StationarityReport, VerifyConfig, verify_proposition

DEFAULT_R = 0.75
TRUNCATION_EPS = 1e-14
MAX_DEPTH = 24

TOL_DET = 1e-10
TOL_SLOPE = 1e-12
TOL_ENERGY = 1e-10

#: sup-norm scale below which two grids of profile values are "the same"
GRID_TOL = 1e-12


@dataclass(frozen=True)
class FamilySpec:
    """Shape of the construction: interval sequence, bump, truncation depth."""

    R: float = DEFAULT_R
    sequence: str = "geometric"  # or "custom"
    t: Optional[Tuple[float, ...]] = None  # custom breakpoints, starting at 0
    N: Optional[int] = None  # truncation depth; None picks the default rule
    name: str = "family-default"
    eta: Callable = eta
    eta_d1: Callable = eta_d1
    eta_d2: Callable = eta_d2

    def validate(self) -> None:
        if not (0.0 < self.R <= 1.0):
            raise SpecInvalid(f"R must lie in (0, 1], got {self.R}")
        if self.sequence not in ("geometric", "custom"):
            raise SpecInvalid(f"unknown sequence rule {self.sequence!r}")
        if self.sequence == "custom":
            if self.t is None or len(self.t) < 3:
                raise SpecInvalid("custom sequences need at least 3 breakpoints")
            ts = np.asarray(self.t, dtype=float)
            if ts[0] != 0.0:
                raise SpecInvalid("custom sequences must start at t_0 = 0")
            if not np.all(np.diff(ts) > 0):
                raise SpecInvalid("breakpoints must be strictly increasing")
            if ts[-1] > self.R:
                raise SpecInvalid("breakpoints must not exceed R")
        if self.N is not None and self.N < 2:
            raise SpecInvalid("truncation depth must be at least 2")
        # bump must vanish with its tested derivatives at the support endpoints
        edge = np.array([-0.5, 0.5])
        for d, fn in enumerate((self.eta, self.eta_d1, self.eta_d2)):
            if np.max(np.abs(np.asarray(fn(edge)))) > 1e-12:
                raise SpecInvalid(f"bump derivative {d} does not vanish at the support edge")
        if float(np.max(np.asarray(self.eta(np.linspace(-0.5, 0.5, 1001))))) <= 0.0:
            raise SpecInvalid("bump must not be identically zero")

    def depth(self) -> int:
        """Truncation depth: first n >= 2 with gap^(n-2) below resolution."""
        if self.sequence == "custom":
            n_avail = len(self.t) - 1
            return min(self.N, n_avail) if self.N is not None else n_avail
        if self.N is not None:
            return self.N
        for n in range(2, MAX_DEPTH + 1):
            gap = self.R * 2.0 ** -(n + 1)
            if gap ** (n - 2) < TRUNCATION_EPS:
                return n
        return MAX_DEPTH

    def breakpoints(self) -> np.ndarray:
        """t_0 = 0 < t_1 < ... < t_N, the supports of the stacked bumps."""
        self.validate()
        n = self.depth()
        if self.sequence == "custom":
            return np.asarray(self.t, dtype=float)[: n + 1]
        k = np.arange(n + 1, dtype=float)
        return self.R * (1.0 - 2.0 ** -k)

    def amplitudes(self) -> np.ndarray:
        ts = self.breakpoints()
        gaps = np.diff(ts)
        return gaps ** np.arange(gaps.size)

    def eta_max(self) -> float:
        return float(np.max(np.asarray(self.eta(np.linspace(-0.5, 0.5, 4001)))))


@dataclass(frozen=True)
class FamilyMember:
    index: int
    profile: RadialProfile
    flip_interval: Tuple[float, float]


def _family_evaluator(spec: FamilySpec, breaks: np.ndarray, amps: np.ndarray,
                      deriv: int, signs: Optional[np.ndarray] = None) -> Callable:
    fns = (spec.eta, spec.eta_d1, spec.eta_d2)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        idx = np.searchsorted(breaks, flat, side="right") - 1
        idx = np.clip(idx, 0, breaks.size - 2)
        lo = breaks[idx]
        hi = breaks[idx + 1]
        gap = hi - lo
        s = (2.0 * flat - lo - hi) / (2.0 * gap)
        vals = amps[idx] * np.asarray(fns[deriv](s)) / gap**deriv
        valid = (flat >= breaks[0]) & (flat < breaks[-1])
        vals = np.where(valid, vals, 0.0)
        if signs is not None:
            vals = vals * signs[np.clip(idx, 0, signs.size - 1)]
        return vals.reshape(t.shape) if t.ndim else vals[0]

    return evaluate


def build_base_profile(spec: FamilySpec, j: int = 4096) -> RadialProfile:
    """Finite truncation of the stacked-bump series as an analytic profile.

    The terms have pairwise disjoint supports, so truncation only zeroes the
    profile on (t_N, R); the profile vanishes identically on [R, 1) and
    beyond, which makes it extendable to the whole plane.
    """
    breaks = spec.breakpoints()
    amps = spec.amplitudes()
    e0 = _family_evaluator(spec, breaks, amps, 0)
    e1 = _family_evaluator(spec, breaks, amps, 1)
    e2 = _family_evaluator(spec, breaks, amps, 2)
    return RadialProfile.analytic(spec.name, e0, e1, e2, j=j, extendable=True)


def flip(base: RadialProfile, spec: FamilySpec, n: int, j: Optional[int] = None) -> FamilyMember:
    """Member U_n: the base with sign flipped on (t_n, t_{n+1}).

    Smoothness across the endpoints holds because the profile and all its
    derivatives vanish there.
    """
    breaks = spec.breakpoints()
    depth = breaks.size - 1
    if not (1 <= n < depth):
        raise IndexOutOfRange(f"flip index must satisfy 1 <= n < {depth}, got {n}")
    return _flip_pattern(base, spec, (n,), f"U_{n}", j)[0]


def flip_pattern(base: RadialProfile, spec: FamilySpec, indices: Sequence[int],
                 name: Optional[str] = None, j: Optional[int] = None) -> RadialProfile:
    """Sign-flip the base on any union of intervals (t_n, t_{n+1})."""
    breaks = spec.breakpoints()
    depth = breaks.size - 1
    for n in indices:
        if not (0 <= n < depth):
            raise IndexOutOfRange(f"pattern index {n} outside [0, {depth})")
    label = name if name is not None else "flip(" + ",".join(map(str, sorted(indices))) + ")"
    return _flip_pattern(base, spec, tuple(sorted(set(indices))), label, j)[1]


def _flip_pattern(base, spec, indices, label, j):
    breaks = spec.breakpoints()
    amps = spec.amplitudes()
    signs = np.ones(breaks.size - 1)
    for n in indices:
        signs[n] = -1.0
    jj = j if j is not None else base.grid.size
    e0 = _family_evaluator(spec, breaks, amps, 0, signs)
    e1 = _family_evaluator(spec, breaks, amps, 1, signs)
    e2 = _family_evaluator(spec, breaks, amps, 2, signs)
    prof = RadialProfile.analytic(label, e0, e1, e2, j=jj, extendable=True)
    n0 = indices[0] if indices else 0
    member = FamilyMember(n0, prof, (float(breaks[n0]), float(breaks[n0 + 1])))
    return member, prof


# -- pairwise checks -------------------------------------------------------

@dataclass(frozen=True)
class DetCheck:
    same: bool
    max_det_diff: float
    max_slope_diff: float
    det_pass: bool
    slope_pass: bool
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "max_det_diff": self.max_det_diff,
            "max_slope_diff": self.max_slope_diff,
            "pass": self.same,
            "consistent": self.consistent,
        }


def check_same_det(u: RadialProfile, v: RadialProfile,
                   tol_det: float = TOL_DET, tol_slope: float = TOL_SLOPE) -> DetCheck:
    """Evaluate both sides of the characterization independently.

    Same Hessian determinant iff same |slope|: the two discrepancies must
    pass or fail together, and the check reports whether they did.
    """
    det_u = det_hessian_radial(u)
    det_v = det_hessian_radial(v)
    d_det = float(np.max(np.abs(det_u.values - det_v.values)))
    d_slope = float(np.max(np.abs(np.abs(u.v1) - np.abs(v.v1))))
    det_pass = d_det <= tol_det
    slope_pass = d_slope <= tol_slope
    return DetCheck(det_pass and slope_pass, d_det, d_slope, det_pass, slope_pass,
                    det_pass == slope_pass)


@dataclass(frozen=True)
class EnergyCheck:
    equal: bool
    max_density_diff: float
    rel_energy_diff: float
    energy_u: float
    energy_v: float

    def to_dict(self) -> dict:
        return {
            "max_density_diff": self.max_density_diff,
            "rel_energy_diff": self.rel_energy_diff,
            "energy_u": self.energy_u,
            "energy_v": self.energy_v,
            "pass": self.equal,
        }


def check_energy_equality(u: RadialProfile, v: RadialProfile,
                          det_check: Optional[DetCheck] = None,
                          tol_density: float = TOL_ENERGY,
                          tol_energy: float = TOL_ENERGY) -> EnergyCheck:
    """Pointwise density equality and total-energy equality, both reported.

    Requires the slope equality to have been checked first (pass or fail);
    call check_same_det and hand in its result.
    """
    if det_check is None:
        raise PreconditionNotVerified(
            "check_same_det must run before the energy comparison")
    dens_u = energy_density_radial(u)
    dens_v = energy_density_radial(v)
    d_density = float(np.max(np.abs(dens_u.values - dens_v.values)))
    e_u = energy(u)
    e_v = energy(v)
    rel = abs(e_u - e_v) / max(abs(e_u), abs(e_v), 1e-300)
    equal = d_density <= tol_density and rel <= tol_energy
    return EnergyCheck(equal, d_density, rel, e_u, e_v)


@dataclass(frozen=True)
class DistinctCheck:
    distinct: bool
    min_separation: float


def pairwise_distinct(profiles: Sequence[RadialProfile],
                      grid_tol: float = GRID_TOL) -> DistinctCheck:
    """Min over pairs of the sup-norm difference; distinct iff above 10x grid_tol."""
    if len(profiles) < 2:
        return DistinctCheck(True, math.inf)
    sep = math.inf
    for i in range(len(profiles)):
        for k in range(i + 1, len(profiles)):
            sep = min(sep, float(np.max(np.abs(profiles[i].v - profiles[k].v))))
    return DistinctCheck(sep > 10.0 * grid_tol, sep)


# -- the experiment ---------------------------------------------------------

def run_multiplicity_experiment(spec: FamilySpec, n_members: int = 5,
                                verify_cfg: Optional[VerifyConfig] = None,
                                j: int = 4096) -> dict:
    """Build the base and n sign-flipped members, then verify everything.

    Per member: determinant characterization against the base, energy
    equality, and the stationarity verdict.  The report records the minimal
    pairwise separation next to its closed-form prediction
    2 * (t_{n+1} - t_n)^n * max(eta) for the deepest member.
    """
    spec.validate()
    cfg = verify_cfg if verify_cfg is not None else VerifyConfig()
    if n_members < 0:
        raise SpecInvalid("member count must be nonnegative")
    depth = spec.depth()
    if n_members > depth - 1:
        raise SpecInvalid(f"at most {depth - 1} members exist at truncation depth {depth}")
    base = build_base_profile(spec, j)
    members = [flip(base, spec, n, j) for n in range(1, n_members + 1)]

    member_reports = []
    all_pass = True
    base_station = verify_proposition(base, cfg)
    all_pass &= base_station.verdict == "PASS"
    member_reports.append({
        "index": 0,
        "profile": base.name,
        "det_check": None,
        "energy_check": None,
        "stationarity": base_station.to_dict(),
    })
    for mem in members:
        det = check_same_det(mem.profile, base)
        en = check_energy_equality(mem.profile, base, det)
        station = verify_proposition(mem.profile, cfg)
        all_pass &= det.same and en.equal and station.verdict == "PASS"
        member_reports.append({
            "index": mem.index,
            "profile": mem.profile.name,
            "flip_interval": list(mem.flip_interval),
            "det_check": det.to_dict(),
            "energy_check": en.to_dict(),
            "stationarity": station.to_dict(),
        })

    profiles = [base] + [m.profile for m in members]
    dist = pairwise_distinct(profiles)
    all_pass &= dist.distinct or len(profiles) < 2

    breaks = spec.breakpoints()
    if members:
        deepest = members[-1].index
        gap = float(breaks[deepest + 1] - breaks[deepest])
        predicted = 2.0 * gap**deepest * spec.eta_max()
    else:
        predicted = None

    report = {
        "family": {
            "name": spec.name,
            "R": spec.R,
            "sequence": spec.sequence,
            "N": depth,
            "breakpoints": [float(b) for b in breaks],
        },
        "seed": cfg.seed,
        "tolerances": {
            "adm": cfg.tol_adm,
            "stat": cfg.tol_stat,
            "det": TOL_DET,
            "slope": TOL_SLOPE,
            "energy": TOL_ENERGY,
        },
        "members": member_reports,
        "min_separation": None if len(profiles) < 2 else dist.min_separation,
        "predicted_min_separation": predicted,
        "pairwise_distinct": dist.distinct,
        "verdict": "PASS" if all_pass else "FAIL",
    }
    return report


# -- config files ------------------------------------------------------------

def parse_family_config(text: str) -> Tuple[FamilySpec, Optional[int]]:
    """key = value format with R, sequence, t (bracketed list), N, members."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecInvalid(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        fields[key] = val
    kwargs = {}
    members = None
    try:
        if "R" in fields:
            kwargs["R"] = float(fields["R"])
        if "sequence" in fields:
            kwargs["sequence"] = fields["sequence"]
        if "t" in fields:
            body = fields["t"].strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise SpecInvalid("t must be a bracketed list, e.g. t = [0, 0.4, 0.6]")
            kwargs["t"] = tuple(float(x) for x in body[1:-1].split(",") if x.strip())
        if "N" in fields:
            kwargs["N"] = int(fields["N"])
        if "members" in fields:
            members = int(fields["members"])
    except ValueError as exc:
        raise SpecInvalid(f"malformed family config: {exc}") from exc
    spec = FamilySpec(name="family-custom", **kwargs) if kwargs else FamilySpec()
    spec.validate()
    return spec, members


def load_family_config(path) -> Tuple[FamilySpec, Optional[int]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_family_config(fh.read())
