import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vklab.corpus import CORPUS_BY_NAME
from vklab.errors import GridMismatch, ResolutionTooCoarse
from vklab.field2d import (RotationAngle, ScalarField2D, SymMatrixField2D, _coords,
                           angular_average_matrix, angular_average_scalar, cof_2d,
                           det_2d, field_from_binary, field_from_function, field_to_binary,
                           field_to_csv, hessian_fd, integral_2d, lift_radial,
                           lift_radial_hessian, max_diff_scalar, pairing_2d,
                           rotate_pullback_matrix, rotate_pullback_scalar)
from vklab.radial import constant, paraboloid, quartic

H = 2.0 / 256  # default test resolution: fast but representative
HF = 2.0 / 512


def const_matrix_field(a, b, c, h=H, radius=0.95):
    n = int(round(2.0 / h)) + 1
    one = np.ones((n, n))
    return SymMatrixField2D(a * one, b * one, c * one, h, radius, True, "const")


# -- lifting ------------------------------------------------------------------

def test_lift_values_on_nodes():
    f = lift_radial(paraboloid(), HF)
    _, X, Y, R = _coords(f.n)
    m = f.mask()
    assert np.max(np.abs(f.values[m] - 0.5 * R[m] ** 2)) < 1e-15
    # the radius-0.5 circle carries the value 0.125
    assert paraboloid().eval(np.array([0.5]))[0] == pytest.approx(0.125)


def test_lift_zero_profile():
    f = lift_radial(constant(0.0), H)
    assert np.max(np.abs(f.values)) == 0.0


def test_lift_mask_excludes_rim():
    f = lift_radial(quartic(), H)
    _, X, Y, R = _coords(f.n)
    m = f.mask()
    # nodes at radius 1 (such as near (0.6, 0.8)) are invalid
    assert not np.any(m & (R > 0.95))
    inner = np.hypot(0.3, 0.4)
    assert quartic().eval(np.array([inner]))[0] == pytest.approx(0.5**4 / 4.0)


def test_lift_resolution_checks():
    with pytest.raises(ResolutionTooCoarse):
        lift_radial(paraboloid(), 2.0 / 32)
    with pytest.raises(ResolutionTooCoarse):
        lift_radial(paraboloid(), 2.0 / 256, margin=0.001)


# -- hessian -------------------------------------------------------------------

def test_hessian_exact_on_quadratic():
    f = CORPUS_BY_NAME["x_squared"].lift(H)
    hs = hessian_fd(f)
    m = hs.mask()
    assert np.max(np.abs(hs.a11[m] - 2.0)) < 1e-12
    assert np.max(np.abs(hs.a12[m])) < 1e-12
    assert np.max(np.abs(hs.a22[m])) < 1e-12


def test_hessian_zero_on_affine():
    f = field_from_function(lambda x, y: 1.0 + 2.0 * x - 0.5 * y, H)
    hs = hessian_fd(f)
    m = hs.mask()
    assert max(np.max(np.abs(hs.a11[m])), np.max(np.abs(hs.a12[m])),
               np.max(np.abs(hs.a22[m]))) < 1e-12


def test_hessian_lifted_quartic_polar_eigenvalues():
    # oracle: radial direction v'' = 3 t^2, tangential v'/t = t^2; at (0.5, 0)
    # that is 0.75 and 0.25
    f = lift_radial(quartic(), HF)
    hs = hessian_fd(f)
    x = _coords(f.n)[0]
    i = int(np.argmin(np.abs(x - 0.5)))
    j = int(np.argmin(np.abs(x - 0.0)))
    r = math.hypot(x[i], x[j])
    assert hs.a11[i, j] == pytest.approx(3.0 * r**2, abs=5e-4)
    assert hs.a22[i, j] == pytest.approx(r**2, abs=5e-4)
    assert abs(hs.a12[i, j]) < 5e-4


def test_lift_radial_hessian_matches_fd():
    exact = lift_radial_hessian(quartic(), HF)
    fd = hessian_fd(lift_radial(quartic(), HF))
    m = fd.mask() & exact.mask()
    for a, b in ((exact.a11, fd.a11), (exact.a12, fd.a12), (exact.a22, fd.a22)):
        assert np.max(np.abs(a[m] - b[m])) < 1e-3


# -- rotations ------------------------------------------------------------------

def test_rotation_angle_reduction():
    assert RotationAngle(2 * math.pi + 0.5).radians == pytest.approx(0.5, abs=1e-12)
    assert RotationAngle(-0.5).radians == pytest.approx(2 * math.pi - 0.5, abs=1e-12)


def test_rotate_linear_quarter_turn():
    # oracle: the rotation sends (x, y) to (-y, x), so x composed with it is -y
    f = CORPUS_BY_NAME["linear_x"].lift(H)
    g = rotate_pullback_scalar(f, math.pi / 2.0)
    _, X, Y, R = _coords(f.n)
    m = g.mask()
    assert np.max(np.abs(g.values[m] - (-Y[m]))) < 1e-9


def test_rotate_identity_angle():
    f = CORPUS_BY_NAME["gaussian"].lift(H)
    g = rotate_pullback_scalar(f, 0.0)
    assert max_diff_scalar(f, g) < 1e-12


def test_rotate_radial_invariance():
    f = lift_radial(quartic(), H)
    g = rotate_pullback_scalar(f, 0.73)
    assert max_diff_scalar(f, g) < 1e-6


def test_rotate_matrix_projector_quarter_turn():
    F = const_matrix_field(1.0, 0.0, 0.0)
    G = rotate_pullback_matrix(F, math.pi / 2.0)
    m = G.mask()
    assert np.max(np.abs(G.a11[m])) < 1e-12
    assert np.max(np.abs(G.a12[m])) < 1e-12
    assert np.max(np.abs(G.a22[m] - 1.0)) < 1e-12


def test_rotate_matrix_identity_commutes():
    F = const_matrix_field(1.0, 0.0, 1.0)
    G = rotate_pullback_matrix(F, 1.1)
    m = G.mask()
    assert np.max(np.abs(G.a11[m] - 1.0)) < 1e-12
    assert np.max(np.abs(G.a12[m])) < 1e-12
    assert np.max(np.abs(G.a22[m] - 1.0)) < 1e-12


def test_rotate_equivariant_hessian_fixed_point():
    # compare on the interior: prefilter boundary effects decay exponentially
    # from the square edge and are still visible at 0.95 for this coarse h
    Hv = lift_radial_hessian(quartic(), H)
    G = rotate_pullback_matrix(Hv, 0.41)
    m = _coords(G.n)[3] <= 0.85
    for a, b in ((G.a11, Hv.a11), (G.a12, Hv.a12), (G.a22, Hv.a22)):
        assert np.max(np.abs(a[m] - b[m])) < 1e-6


# -- averaging -------------------------------------------------------------------

def test_average_x_squared_oracle():
    # oracle: the angular mean of cos^2 is 1/2, so the average of x^2 is r^2/2
    f = CORPUS_BY_NAME["x_squared"].lift(H)
    g = angular_average_scalar(f, 64)
    _, X, Y, R = _coords(f.n)
    m = g.mask()
    assert np.max(np.abs(g.values[m] - 0.5 * R[m] ** 2)) < 5e-4


def test_average_odd_function_vanishes():
    f = CORPUS_BY_NAME["linear_x"].lift(H)
    g = angular_average_scalar(f, 64)
    assert np.max(np.abs(g.values[g.mask()])) < 1e-9


def test_average_radial_fixed_point():
    f = lift_radial(quartic(), H)
    g = angular_average_scalar(f, 32)
    assert max_diff_scalar(f, g) < 1e-5


def test_average_idempotent():
    f = CORPUS_BY_NAME["gaussian"].lift(H)
    g1 = angular_average_scalar(f, 32)
    g2 = angular_average_scalar(g1, 32)
    assert max_diff_scalar(g1, g2, radius=0.8) < 2e-3


def test_average_matrix_projector():
    # oracle: averaging the conjugates of diag(1, 0) over all angles gives I/2
    F = const_matrix_field(1.0, 0.0, 0.0)
    G = angular_average_matrix(F, 64)
    m = G.mask()
    assert np.max(np.abs(G.a11[m] - 0.5)) < 1e-12
    assert np.max(np.abs(G.a12[m])) < 1e-12
    assert np.max(np.abs(G.a22[m] - 0.5)) < 1e-12


def test_average_matrix_equivariant_fixed_point():
    Hv = lift_radial_hessian(quartic(), H)
    G = angular_average_matrix(Hv, 32)
    m = _coords(G.n)[3] <= 0.85
    for a, b in ((G.a11, Hv.a11), (G.a12, Hv.a12), (G.a22, Hv.a22)):
        assert np.max(np.abs(a[m] - b[m])) < 1e-6


def test_average_requires_positive_m():
    f = lift_radial(quartic(), H)
    with pytest.raises(ValueError):
        angular_average_scalar(f, 0)


# -- pointwise algebra -------------------------------------------------------------

def test_pairing_cof_det_hand_values():
    A = const_matrix_field(1.0, 2.0, 3.0)
    B = const_matrix_field(0.0, 1.0, 0.0)
    pair = pairing_2d(A, B)
    assert np.all(pair.values == 4.0)
    C = cof_2d(A)
    assert np.all(C.a11 == 3.0)
    assert np.all(C.a12 == -2.0)
    assert np.all(C.a22 == 1.0)
    assert np.all(det_2d(A).values == -1.0)
    ident = const_matrix_field(1.0, 0.0, 1.0)
    assert np.all(pairing_2d(ident, ident).values == 2.0)
    assert np.all(det_2d(ident).values == 1.0)
    zero = const_matrix_field(0.0, 0.0, 0.0)
    assert np.all(pairing_2d(A, zero).values == 0.0)


def test_pairing_grid_mismatch():
    with pytest.raises(GridMismatch):
        pairing_2d(const_matrix_field(1, 0, 1, h=H), const_matrix_field(1, 0, 1, h=HF))


def test_integral_2d_values():
    one = field_from_function(lambda x, y: np.ones_like(x), HF)
    got = integral_2d(one)
    assert got.value == pytest.approx(math.pi * 0.95**2, abs=0.02)
    assert got.covered_fraction == pytest.approx(0.95**2, abs=0.01)
    zero = field_from_function(lambda x, y: 0.0 * x, HF)
    assert integral_2d(zero).value == 0.0


def test_integral_2d_against_radial_quadrature():
    # radial oracle: 2 pi int_0^0.95 10 t^5 dt = (10 pi / 3) 0.95^6
    f = field_from_function(lambda x, y: 10.0 * (x * x + y * y) ** 2, HF)
    oracle = 10.0 * math.pi / 3.0 * 0.95**6
    assert integral_2d(f).value == pytest.approx(oracle, rel=0.01)


# -- consistency with the radial closed forms ---------------------------------------

def test_det_2d_matches_radial_det():
    f = lift_radial(quartic(), HF)
    det = det_2d(hessian_fd(f))
    _, X, Y, R = _coords(f.n)
    sel = (R >= 0.05) & (R <= min(det.valid_radius, 0.95))
    exact = 3.0 * R[sel] ** 4
    assert np.max(np.abs(det.values[sel] - exact)) < 50.0 * HF**2


def test_density_2d_matches_radial_density():
    f = lift_radial(quartic(), HF)
    hs = hessian_fd(f)
    dens = pairing_2d(hs, hs)
    _, X, Y, R = _coords(f.n)
    sel = (R >= 0.05) & (R <= min(dens.valid_radius, 0.95))
    exact = 10.0 * R[sel] ** 4
    assert np.max(np.abs(dens.values[sel] - exact)) < 100.0 * HF**2


# -- serialization --------------------------------------------------------------------

def test_binary_round_trip(tmp_path):
    f = CORPUS_BY_NAME["gaussian"].lift(H)
    path = tmp_path / "field.bin"
    field_to_binary(f, path)
    g = field_from_binary(path, valid_radius=f.valid_radius, extends=True)
    assert g.h == pytest.approx(f.h)
    assert np.array_equal(f.values, g.values)


def test_binary_layout(tmp_path):
    f = lift_radial(paraboloid(), 2.0 / 64, margin=0.1)
    path = tmp_path / "field.bin"
    field_to_binary(f, path)
    raw = path.read_bytes()
    dims = np.frombuffer(raw[:8], dtype="<i4")
    assert tuple(dims) == (65, 65)
    assert len(raw) == 8 + 65 * 65 * 8


def test_csv_field_rows(tmp_path):
    f = lift_radial(paraboloid(), 2.0 / 64, margin=0.1)
    path = tmp_path / "field.csv"
    field_to_csv(f, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) - 1 == int(np.count_nonzero(f.mask()))


# -- property tests ---------------------------------------------------------------------

@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 7))
@settings(max_examples=20, deadline=None)
def test_rotation_preserves_invariants(a, b, c, phi):
    F = const_matrix_field(a, b, c, h=2.0 / 128)
    G = rotate_pullback_matrix(F, phi)
    m = G.mask()
    trace_before = a + c
    det_before = a * c - b * b
    scale = 1.0 + abs(a) + abs(b) + abs(c)
    assert np.max(np.abs((G.a11 + G.a22)[m] - trace_before)) < 1e-9 * scale
    det_after = G.a11[m] * G.a22[m] - G.a12[m] ** 2
    assert np.max(np.abs(det_after - det_before)) < 1e-9 * scale**2
