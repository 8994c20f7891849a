"""Command-line front end: stationarity, averaging, multiplicity, convergence.

Exit codes: 0 verdict PASS, 1 verdict FAIL, 2 configuration error,
3 numerical failure.  Reports are deterministic JSON: identical
configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import multiplicity as mp
from .averaging import AveragingLevel, run_averaging_suite
from .convergence import run_convergence_study
from .errors import ConfigError, SpecInvalid, VkLabError
from .field2d import DEFAULT_ANGLES, DEFAULT_H, DEFAULT_MARGIN
from .radial import (DEFAULT_J, RadialProfile, constant, det_hessian_radial,
                     energy_density_radial, paraboloid, profile_from_csv,
                     profile_to_csv, quartic)
from .stationarity import RADIAL_TOL, VerifyConfig, verify_proposition

OUT_ENV = "VKLAB_OUT"
DEFAULT_OUT = "vklab-out"

BUILTIN_PROFILES = ("paraboloid", "quartic", "constant", "family-default")


@dataclass
class RunConfig:
    profile: str = "family-default"
    config_path: Optional[str] = None
    out: Optional[str] = None
    grid_j: int = DEFAULT_J
    grid_h: float = DEFAULT_H
    angles_m: int = DEFAULT_ANGLES
    margin: float = DEFAULT_MARGIN
    seed: int = 12345
    tol_adm: float = RADIAL_TOL
    tol_stat: float = RADIAL_TOL
    members: int = 5
    members_explicit: bool = False
    refinements: int = 3
    n_plateau: int = 24
    n_zero_hessian: int = 8
    n_rotated: int = 4
    n_symmetrized: int = 4
    n_harmonic: int = 4

    def validate(self):
        if self.tol_adm <= 0 or self.tol_stat <= 0:
            raise ConfigError("tolerances must be positive")
        if self.grid_j < 8 or (self.grid_j & (self.grid_j - 1)) != 0:
            raise ConfigError("grid-j must be a power of two (clean refinement studies)")
        denom = 2.0 / self.grid_h
        if abs(denom - round(denom)) > 1e-9 or (int(round(denom)) & (int(round(denom)) - 1)) != 0:
            raise ConfigError("grid-h must be 2/2^k")
        if self.angles_m < 1:
            raise ConfigError("angles-m must be at least 1")
        if self.angles_m & (self.angles_m - 1):
            print(f"warning: angles-m = {self.angles_m} is not a power of two; "
                  "refinement ladders will be ragged", file=sys.stderr)
        if self.members < 0:
            raise ConfigError("members must be nonnegative")

    def out_dir(self) -> Path:
        root = self.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
        p = Path(root)
        p.mkdir(parents=True, exist_ok=True)
        return p

    def verify_config(self) -> VerifyConfig:
        return VerifyConfig(
            seed=self.seed, j=self.grid_j, h=self.grid_h, angles_m=self.angles_m,
            margin=self.margin, tol_adm=self.tol_adm, tol_stat=self.tol_stat,
            n_plateau=self.n_plateau, n_zero_hessian=self.n_zero_hessian,
            n_rotated=self.n_rotated, n_symmetrized=self.n_symmetrized,
            n_harmonic=self.n_harmonic)


def _parse_h(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    val = float(text)
    if val >= 1.0:  # given as the denominator n of h = 2/n
        return 2.0 / val
    return val


def resolve_profile(cfg: RunConfig) -> RadialProfile:
    """Builtin name, profile CSV path, or family spec path."""
    sel = cfg.profile
    if sel == "paraboloid":
        return paraboloid(cfg.grid_j)
    if sel == "quartic":
        return quartic(cfg.grid_j)
    if sel == "constant":
        return constant(1.0, cfg.grid_j)
    if sel == "family-default":
        return mp.build_base_profile(mp.FamilySpec(), cfg.grid_j)
    path = Path(sel)
    if not path.exists():
        raise ConfigError(f"profile {sel!r} is neither a builtin nor an existing file")
    if path.suffix.lower() == ".csv":
        return profile_from_csv(path, name=path.stem)
    spec, _ = mp.load_family_config(path)
    return mp.build_base_profile(spec, cfg.grid_j)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


# -- commands ---------------------------------------------------------------

def cmd_verify_stationarity(cfg: RunConfig) -> int:
    cfg.validate()
    profile = resolve_profile(cfg)
    report = verify_proposition(profile, cfg.verify_config())
    out = cfg.out_dir() / "stationarity.json"
    _write_json(out, report.to_dict())
    for note in report.notes:
        print(f"note: {note}")
    n_adm = report.admissible_count()
    print(f"stationarity[{report.profile}]: {report.verdict} "
          f"({n_adm} admissible variations, seed {report.seed}) -> {out}")
    return 0 if report.verdict == "PASS" else 1


def cmd_verify_averaging(cfg: RunConfig) -> int:
    cfg.validate()
    profile = resolve_profile(cfg) if cfg.profile != "family-default" else quartic(cfg.grid_j)
    levels = (AveragingLevel(2.0 * cfg.grid_h, max(cfg.angles_m // 2, 1)),
              AveragingLevel(cfg.grid_h, cfg.angles_m))
    report = run_averaging_suite(profile=profile, levels=levels, margin=cfg.margin)
    out = cfg.out_dir() / "averaging.json"
    _write_json(out, report)
    bad = [c for c in report["checks"] if not c["pass"]]
    print(f"averaging: {report['verdict']} "
          f"({len(report['checks']) - len(bad)}/{len(report['checks'])} checks, "
          f"covered fraction {report['config']['covered_fraction']:.4f}) -> {out}")
    for c in bad[:8]:
        print(f"  fail: {c['identity']} on {c['function']}: residual {c['residual_fine']:.3e} "
              f"bound {c['bound']:.3e} order {c['order']}")
    return 0 if report["verdict"] == "PASS" else 1


def cmd_multiplicity(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.config_path is not None:
        spec, members = mp.load_family_config(cfg.config_path)
        n_members = cfg.members if cfg.members_explicit else (members if members is not None else cfg.members)
    else:
        spec = mp.FamilySpec()
        n_members = cfg.members
    report = mp.run_multiplicity_experiment(spec, n_members, cfg.verify_config(), j=cfg.grid_j)
    outdir = cfg.out_dir()
    _write_json(outdir / "multiplicity.json", report)
    _emit_multiplicity_data(spec, n_members, cfg, outdir)
    print(f"multiplicity[{spec.name}]: {report['verdict']} "
          f"({n_members} members, min separation {report['min_separation']}) "
          f"-> {outdir / 'multiplicity.json'}")
    return 0 if report["verdict"] == "PASS" else 1


def _emit_multiplicity_data(spec, n_members, cfg: RunConfig, outdir: Path) -> None:
    base = mp.build_base_profile(spec, cfg.grid_j)
    members = [mp.flip(base, spec, n, cfg.grid_j) for n in range(1, n_members + 1)]
    profdir = outdir / "profiles"
    profdir.mkdir(exist_ok=True)
    profile_to_csv(base, profdir / f"{spec.name}.csv")
    for m in members:
        profile_to_csv(m.profile, profdir / f"{m.profile.name}.csv")
    k = det_hessian_radial(base)
    dens = energy_density_radial(base)
    cols = ["t", "v"] + [f"u_{m.index}" for m in members] + ["k", "density"]
    with open(outdir / "plotdata.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        arrays = [base.grid, base.v] + [m.profile.v for m in members] + [k.values, dens.values]
        for row in zip(*arrays):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def cmd_convergence(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.refinements < 2:
        raise ConfigError("convergence orders need at least two resolutions")
    profiles = [paraboloid(cfg.grid_j), quartic(cfg.grid_j), constant(1.0, cfg.grid_j)]
    report = run_convergence_study(profiles, j_finest=cfg.grid_j, h_finest=cfg.grid_h,
                                   refinements=cfg.refinements, margin=cfg.margin)
    out = cfg.out_dir() / "convergence.json"
    _write_json(out, report)
    print(f"convergence: {report['verdict']} -> {out}")
    return 0 if report["verdict"] == "PASS" else 1


# -- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vklab",
        description="Numerical verification lab for Hessian-constrained bending energies "
                    "on the unit disk")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--profile", default="family-default",
                       help="builtin name (paraboloid, quartic, constant, family-default), "
                            "profile CSV path, or family spec path")
        p.add_argument("--config", dest="config_path", default=None,
                       help="family spec file (key = value lines)")
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--grid-j", type=int, default=DEFAULT_J, help="radial quadrature cells (power of two)")
        p.add_argument("--grid-h", type=str, default=None, help="2D spacing, e.g. 2/512")
        p.add_argument("--angles-m", type=int, default=DEFAULT_ANGLES, help="angular samples for averages")
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--tol-adm", type=float, default=RADIAL_TOL)
        p.add_argument("--tol-stat", type=float, default=RADIAL_TOL)
        p.add_argument("--members", type=int, default=None, help="family members to build")
        p.add_argument("--refinements", type=int, default=3)
        for cls in ("plateau", "zero-hessian", "rotated", "symmetrized", "harmonic"):
            p.add_argument(f"--n-{cls}", type=int, default=None,
                           help=f"count of {cls} variations")

    for name in ("verify-stationarity", "verify-averaging", "multiplicity", "convergence"):
        common(sub.add_parser(name))
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    cfg.profile = args.profile
    cfg.config_path = args.config_path
    cfg.out = args.out
    cfg.grid_j = args.grid_j
    if args.grid_h is not None:
        cfg.grid_h = _parse_h(args.grid_h)
    cfg.angles_m = args.angles_m
    cfg.seed = args.seed
    cfg.tol_adm = args.tol_adm
    cfg.tol_stat = args.tol_stat
    cfg.members_explicit = args.members is not None
    if args.members is not None:
        cfg.members = args.members
    cfg.refinements = args.refinements
    for cls, attr in (("plateau", "n_plateau"), ("zero_hessian", "n_zero_hessian"),
                      ("rotated", "n_rotated"), ("symmetrized", "n_symmetrized"),
                      ("harmonic", "n_harmonic")):
        val = getattr(args, f"n_{cls}")
        if val is not None:
            setattr(cfg, attr, val)
    return cfg


COMMANDS = {
    "verify-stationarity": cmd_verify_stationarity,
    "verify-averaging": cmd_verify_averaging,
    "multiplicity": cmd_multiplicity,
    "convergence": cmd_convergence,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = _config_from_args(args)
    try:
        return COMMANDS[args.command](cfg)
    except (ConfigError, SpecInvalid, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except VkLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
