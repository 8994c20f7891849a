import math

import numpy as np
import pytest

from vklab.averaging import (AveragingLevel, BOUND_COEFF, IDENTITIES, default_levels,
                             fd_hessian_error, identity_residuals, run_averaging_suite,
                             weighted_disk_integral, FD_HESSIAN_COEFF)
from vklab.corpus import CORPUS, CORPUS_BY_NAME
from vklab.field2d import field_from_function
from vklab.radial import quartic

FAST = AveragingLevel(2.0 / 256, 64)


def test_identity_residuals_within_bounds_fast_level():
    prof = quartic()
    for name in ("x_squared", "gaussian"):
        res = identity_residuals(CORPUS_BY_NAME[name], prof, FAST)
        for ident in IDENTITIES:
            residual, scale = res[ident]
            assert residual <= BOUND_COEFF[ident] * FAST.mesh_measure() * scale, (name, ident)


def test_radial_function_trivially_commutes():
    res = identity_residuals(CORPUS_BY_NAME["radial_quartic"], quartic(), FAST)
    for ident in IDENTITIES:
        residual, scale = res[ident]
        assert residual <= 0.1 * BOUND_COEFF[ident] * FAST.mesh_measure() * scale


def test_default_levels_are_halving():
    coarse, fine = default_levels()
    assert coarse.h == 2 * fine.h
    assert 2 * coarse.m == fine.m


def test_weighted_disk_integral_matches_radial_quadrature():
    # oracle: radial midpoint quadrature of the same smooth cutoff
    from vklab.bump import ETA_MASS, eta_antiderivative

    g = field_from_function(lambda x, y: np.ones_like(x), 2.0 / 256)
    got = weighted_disk_integral(g, 0.95)
    t = (np.arange(1 << 14) + 0.5) / (1 << 14)
    chi = eta_antiderivative((0.95 - t) / 0.1 - 0.5) / ETA_MASS
    oracle = 2.0 * math.pi * np.sum(chi * t) / (1 << 14)
    assert got == pytest.approx(float(oracle), abs=2e-4)


def test_fd_hessian_error_within_frozen_constant():
    for fn in CORPUS:
        for h in (2.0 / 256, 2.0 / 512):
            assert fd_hessian_error(fn, h) <= FD_HESSIAN_COEFF * h * h


def test_suite_shape_fast():
    report = run_averaging_suite(corpus=CORPUS[:2], levels=(AveragingLevel(2.0 / 128, 32), FAST))
    assert set(c["identity"] for c in report["checks"]) == set(IDENTITIES)
    assert report["config"]["levels"] == [{"h": 2.0 / 128, "m": 32}, {"h": 2.0 / 256, "m": 64}]
    assert "covered_fraction" in report["config"]
