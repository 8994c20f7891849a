import math

import numpy as np
import pytest

from vklab.errors import NoPlateau, NotAdmissible
from vklab.field2d import field_from_function, lift_radial
from vklab.radial import (RadialProfile, combine, constant, energy, hessian_l2_norm,
                          paraboloid, quartic)
from vklab.rng import SplitMix64
from vklab.stationarity import (VerifyConfig, Variation, checked_stationarity_defect,
                                detect_plateaus, fd_tolerance, gen_harmonic_variations,
                                gen_plateau_variations, gen_zero_hessian_variations,
                                is_admissible, stationarity_defect, symmetrize_variation,
                                verify_proposition, _radial_defects)

SMALL = VerifyConfig(n_plateau=6, n_zero_hessian=3, n_rotated=2, n_symmetrized=2,
                     n_harmonic=2, angles_m=64)


# -- admissibility ------------------------------------------------------------

def test_harmonic_direction_admissible_for_paraboloid():
    # cof Hess V = I, so the pairing is the Laplacian, which vanishes for x^2 - y^2
    f = field_from_function(lambda x, y: x * x - y * y, name="saddle")
    ok, defect = is_admissible(paraboloid(), f)
    assert ok
    assert defect < 1e-10


def test_constant_direction_always_admissible():
    ok, defect = is_admissible(quartic(), constant(2.0))
    assert ok and defect == 0.0


def test_self_direction_not_admissible_for_paraboloid():
    # cof A : A = 2 det A = 2 for the identity Hessian
    p = paraboloid()
    ok, defect = is_admissible(p, p)
    assert not ok
    assert defect == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-12)


def test_quartic_direction_defect_hand_value():
    # pairing 4 t^2, L2-weighted norm sqrt(16 pi / 3)
    _, defect = is_admissible(paraboloid(), quartic())
    assert defect == pytest.approx(math.sqrt(16.0 * math.pi / 3.0), rel=1e-7)


# -- stationarity defect --------------------------------------------------------

def test_constant_profile_has_zero_defect_for_anything():
    c = constant(4.0)
    assert stationarity_defect(c, quartic()) == 0.0
    f = field_from_function(lambda x, y: np.sin(x) * y)
    assert stationarity_defect(c, f) == 0.0


def test_paraboloid_saddle_defect_vanishes():
    f = field_from_function(lambda x, y: x * x - y * y, name="saddle")
    assert abs(stationarity_defect(paraboloid(), f)) < 1e-10


def test_checked_defect_raises_for_inadmissible():
    with pytest.raises(NotAdmissible):
        checked_stationarity_defect(paraboloid(), quartic())


# -- plateau detection ------------------------------------------------------------

def test_family_plateau_is_outer_annulus(family_base, family_spec):
    plats = detect_plateaus(family_base)
    wide = [(a, b) for a, b in plats if b - a > 0.05]
    assert len(wide) == 1
    a, b = wide[0]
    assert b > 0.99
    assert a < 0.78


def test_paraboloid_has_no_plateau():
    assert all(b - a < 0.01 for a, b in detect_plateaus(paraboloid())) \
        or not detect_plateaus(paraboloid())


def test_constant_profile_plateau_is_everything():
    plats = detect_plateaus(constant(1.0))
    assert len(plats) == 1
    a, b = plats[0]
    assert a < 0.001 and b > 0.999


# -- generators ----------------------------------------------------------------------

def test_plateau_generator_family(family_base):
    rng = SplitMix64(7)
    vars_, notes = gen_plateau_variations(family_base, 10, rng)
    assert len(vars_) == 10 and not notes
    for var in vars_:
        adm, stat, norm_f = _radial_defects(family_base, var.payload)
        assert norm_f > 0
        nv = hessian_l2_norm(family_base)
        assert adm <= 1e-8 * nv * norm_f
        assert abs(stat) <= 1e-8 * nv * norm_f


def test_plateau_generator_paraboloid_constants_only():
    vars_, notes = gen_plateau_variations(paraboloid(), 5, SplitMix64(1))
    assert len(vars_) == 1
    assert notes and "no nontrivial" in notes[0]


def test_plateau_generator_constant_profile_everywhere():
    vars_, notes = gen_plateau_variations(constant(1.0), 5, SplitMix64(1))
    assert len(vars_) == 5 and not notes


def test_zero_hessian_generator_family(family_base):
    vars_ = gen_zero_hessian_variations(family_base, 4, SplitMix64(3))
    assert len(vars_) == 4
    for var in vars_:
        supports = var.payload
        assert supports.max_abs() > 0


def test_zero_hessian_generator_paraboloid_raises():
    with pytest.raises(NoPlateau):
        gen_zero_hessian_variations(paraboloid(), 2, SplitMix64(3))


def test_zero_hessian_generator_constant_profile():
    vars_ = gen_zero_hessian_variations(constant(2.0), 3, SplitMix64(3))
    assert len(vars_) == 3


def test_harmonic_generator_names():
    vars_ = gen_harmonic_variations(paraboloid(), 4)
    assert [v.payload.name for v in vars_] == ["re-z^2", "im-z^2", "re-z^3", "im-z^3"]


# -- symmetrization -------------------------------------------------------------------

def test_symmetrize_bump_stays_admissible(family_base):
    bump = gen_zero_hessian_variations(family_base, 1, SplitMix64(5))[0]
    var = symmetrize_variation(family_base, bump.payload, m=64)
    nv = hessian_l2_norm(family_base)
    assert var.norm_f > 0
    assert var.adm_defect <= fd_tolerance(2.0 / 512) * nv * var.norm_f


def test_symmetrize_odd_function_is_trivial():
    f = field_from_function(lambda x, y: x, name="x")
    var = symmetrize_variation(quartic(), f, m=64)
    assert var.norm_f < 1e-6


# -- verification -------------------------------------------------------------------

def test_verify_family_passes(family_base):
    rep = verify_proposition(family_base, SMALL)
    assert rep.verdict == "PASS"
    assert rep.admissible_count() >= SMALL.n_plateau + SMALL.n_zero_hessian


def test_verify_constant_profile_trivially_passes():
    rep = verify_proposition(constant(1.0), SMALL)
    assert rep.verdict == "PASS"


def test_negative_control_is_flagged_not_fatal():
    rep = verify_proposition(paraboloid(), SMALL, user_variations=[Variation("custom", quartic())])
    assert rep.verdict == "PASS"
    custom = [r for r in rep.records if r.kind == "custom"]
    assert len(custom) == 1
    assert not custom[0].admissible
    assert custom[0].passed is None
    assert custom[0].adm_defect == pytest.approx(math.sqrt(16 * math.pi / 3), rel=0.01)


def test_report_json_schema(family_base):
    rep = verify_proposition(family_base, SMALL)
    d = rep.to_dict()
    assert list(d.keys()) == ["profile", "seed", "tolerances", "variations", "verdict"]
    assert list(d["tolerances"].keys()) == ["adm", "stat"]
    for rec in d["variations"]:
        assert list(rec.keys()) == ["kind", "adm_defect", "stat_defect", "norm_f",
                                    "normalized", "pass"]


def test_report_determinism(family_base):
    a = verify_proposition(family_base, SMALL).to_json()
    b = verify_proposition(family_base, SMALL).to_json()
    assert a == b


def test_seed_changes_report(family_base):
    a = verify_proposition(family_base, SMALL).to_json()
    cfg = VerifyConfig(**{**SMALL.__dict__, "seed": 999})
    b = verify_proposition(family_base, cfg).to_json()
    assert a != b


# -- stated invariants -----------------------------------------------------------------

def test_pointwise_frobenius_vanishes_for_admissible_radial(family_base):
    from vklab.radial import frobenius_pairing_radial

    vars_, _ = gen_plateau_variations(family_base, 6, SplitMix64(11))
    scale_v = float(np.max(np.abs(family_base.v2)) + np.max(np.abs(family_base.v1 / family_base.grid)))
    for var in vars_:
        f = var.payload
        scale_f = float(np.max(np.abs(f.v2)) + np.max(np.abs(f.v1 / f.grid)))
        pair = frobenius_pairing_radial(family_base, f)
        assert np.max(np.abs(pair.values)) <= 1e-8 * scale_v * scale_f


def test_slope_product_vanishes_for_admissible_radial(family_base):
    vars_, _ = gen_plateau_variations(family_base, 6, SplitMix64(13))
    sup_v = float(np.max(np.abs(family_base.v1)))
    for var in vars_:
        sup_f = float(np.max(np.abs(var.payload.v1)))
        prod = np.max(np.abs(family_base.v1 * var.payload.v1))
        assert prod <= 1e-8 * sup_v * sup_f


def test_defect_bilinearity(family_base):
    vars_, _ = gen_plateau_variations(family_base, 2, SplitMix64(17))
    f1, f2 = vars_[0].payload, vars_[1].payload
    a, b = 1.7, -0.4
    comb = combine([a, b], [f1, f2])
    d1 = stationarity_defect(family_base, f1)
    d2 = stationarity_defect(family_base, f2)
    dc = stationarity_defect(family_base, comb)
    scale = 1.0 + abs(d1) + abs(d2) + energy(family_base)
    assert abs(dc - (a * d1 + b * d2)) <= 1e-10 * scale


def test_symmetrization_defect_consistency():
    # the energy pairing of f and of its angular average integrate to the
    # same value for radial V, up to the sharp-mask quadrature error
    from vklab.corpus import CORPUS_BY_NAME
    from vklab.field2d import angular_average_scalar

    v = quartic()
    f = CORPUS_BY_NAME["gaussian"].lift(2.0 / 256)
    favg = angular_average_scalar(f, 64)
    d1 = stationarity_defect(v, f, h=2.0 / 256)
    d2 = stationarity_defect(v, favg, h=2.0 / 256)
    nv = hessian_l2_norm(v)
    from vklab.field2d import hessian_fd, matrix_l2_norm

    nf = matrix_l2_norm(hessian_fd(f))
    assert abs(d1 - d2) <= 5e-3 * nv * nf
