import math

import numpy as np
import pytest

from cvxlab import circle, pshlab, spaces
from cvxlab.errors import (ContractViolation, EvaluationError, ResolutionError,
                           SamplingError)


def field(fn, dim, hint="c2", batch=None):
    return pshlab.FieldOracle(fn, dim=dim, smoothness_hint=hint, batch=batch)


# --- complex directional derivatives ----------------------------------------


def test_dprime_linear_real_part():
    # Re z = (z + conj z)/2, so the holomorphic derivative is 1/2
    f = field(lambda z: float(np.real(z[0])), 1)
    d = pshlab.dprime(f, [0.3 + 0.1j], [1.0])
    assert d == pytest.approx(0.5, abs=1e-9)


def test_dprime_abs_square():
    f = field(lambda z: float(np.abs(z[0]) ** 2), 1)
    a = 0.7 - 0.4j
    d = pshlab.dprime(f, [a], [1.0])
    assert d == pytest.approx(np.conj(a), abs=1e-8)


def test_dprime_scales_linearly_in_direction():
    f = field(lambda z: float(np.abs(z[0]) ** 2), 1)
    a = [0.5 + 0.2j]
    base = pshlab.dprime(f, a, [1.0])
    assert pshlab.dprime(f, a, [2.0]) == pytest.approx(2.0 * base, rel=1e-7)
    assert pshlab.dprime(f, a, [1j]) == pytest.approx(1j * base, rel=1e-7)


def test_gradient_dprime_hilbert_square():
    sq = pshlab.field_norm(spaces.lp(2, 3), 2.0)
    a = np.array([0.2 + 0.1j, -0.3j, 0.5])
    g = pshlab.gradient_dprime(sq, a)
    assert np.allclose(g, np.conj(a), atol=1e-8)


def test_dprime_zero_direction():
    f = field(lambda z: float(np.real(z[0])), 1)
    assert pshlab.dprime(f, [0.0], [0.0]) == 0.0


# --- Levi form ---------------------------------------------------------------


def test_levi_quadratic_coordinate_square():
    f = field(lambda z: float(np.abs(z[0]) ** 2), 2)
    a = np.array([0.1 + 0.2j, -0.3 + 0.1j])
    assert pshlab.levi_quadratic(f, a, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-8)
    assert pshlab.levi_quadratic(f, a, [0.0, 1.0]) == pytest.approx(0.0, abs=1e-8)


def test_levi_matrix_sum_square():
    # |z1 + z2|^2 has Levi matrix with every entry 1
    f = field(lambda z: float(np.abs(z[0] + z[1]) ** 2), 2)
    H = pshlab.levi_matrix(f, np.zeros(2, dtype=np.complex128))
    assert np.allclose(H.values, np.ones((2, 2)), atol=1e-7)
    assert H.asym <= 1e-6
    eigs = np.linalg.eigvalsh(H.values)
    assert eigs[0] == pytest.approx(0.0, abs=1e-7)
    assert eigs[1] == pytest.approx(2.0, abs=1e-7)


def test_levi_matrix_diagonal_matches_quadratic():
    f = pshlab.field_norm(spaces.lp(2, 2), 2.0)
    a = np.array([0.4, 0.1 - 0.2j])
    H = pshlab.levi_matrix(f, a)
    for k, e in enumerate(np.eye(2, dtype=np.complex128)):
        q = pshlab.levi_quadratic(f, a, e)
        assert abs(H.values[k, k].real - q) <= 1e-8
        assert abs(H.values[k, k].imag) <= 1e-10


def test_levi_holomorphic_perturbation_is_invisible():
    # Re(z1^3) has exact circle mean zero, so the quotient m(r)/r^2
    # is radius-independent and the extrapolation has nothing to correct
    def fn(z):
        return float(np.abs(z[0]) ** 2 + np.abs(z[1]) ** 2 + np.real(z[0] ** 3))

    f = field(fn, 2)
    a = np.array([0.3 + 0.1j, -0.2j])
    for b in (np.array([1.0, 0.0]), np.array([1.0, 1.0]) / math.sqrt(2.0)):
        want = float(np.linalg.norm(b)) ** 2
        got = pshlab.levi_quadratic(f, a, b, ctrl=circle.QuadratureControls(tol=1e-12))
        assert got == pytest.approx(want, abs=1e-9)


def test_levi_exp_square_closed_form():
    # exp(|z|^2) on C: Levi form is exp(|a|^2)(1 + |a|^2)
    f = field(lambda z: float(np.exp(np.abs(z[0]) ** 2)), 1)
    a = 0.4 + 0.3j
    want = math.exp(abs(a) ** 2) * (1.0 + abs(a) ** 2)
    got = pshlab.levi_quadratic(f, [a], [1.0])
    assert got == pytest.approx(want, rel=1e-6)


def test_levi_at_minus_inf_center_raises():
    f = pshlab.field_by_name("log_abs_z1", 1)
    with pytest.raises(EvaluationError):
        pshlab.levi_quadratic(f, [0.0], [1.0])


def test_claimed_psh_warns_on_decreasing_means():
    f = pshlab.field_by_name("neg_norm_sq", 1)
    with pytest.warns(RuntimeWarning):
        pshlab.levi_quadratic(f, [0.0], [1.0], claimed_psh=True)


def test_hermitian_matrix_rejects_defect():
    with pytest.raises(ContractViolation):
        pshlab.HermitianMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.0)


# --- curvature vs Levi round trip -------------------------------------------


def test_min_curvature_matches_levi_on_smooth_fields():
    # on C the circle-mean curvature at tiny radii recovers the Levi form
    ctrl = circle.QuadratureControls(tol=1e-13)
    cases = [
        (field(lambda z: float(np.abs(z[0]) ** 2), 1), 0.2 + 0.5j),
        (field(lambda z: float(np.exp(np.abs(z[0]) ** 2)), 1), 0.4 + 0.3j),
    ]
    for f, a in cases:
        L = pshlab.levi_quadratic(f, [a], [1.0], ctrl=ctrl)
        s = pshlab.strict_avg_phi(f, [a], r_max=2e-3, n_dirs=8, seed=1, ctrl=ctrl)
        assert 0.5 * L <= s <= L * (1.0 + 1e-6)


def test_strict_avg_phi_l1_norm_positive():
    f = pshlab.field_norm(spaces.lp(1, 2), 1.0)
    v = pshlab.strict_avg_phi(f, [1.0, 1.0], r_max=1e-2, n_dirs=16, seed=0)
    assert v > 0.0


def test_strict_avg_phi_preconditions():
    f = pshlab.field_by_name("norm_sq_l2", 1)
    with pytest.raises(ContractViolation):
        pshlab.strict_avg_phi(f, [0.0], r_max=0.0)


# --- regions and scans -------------------------------------------------------


def test_region_membership_and_sampling():
    reg = pshlab.box_region(1.0, dim=2)
    assert reg.dim == 2
    assert reg.point_in(np.array([0.5 + 0.5j, -0.5j]))
    assert not reg.point_in(np.array([1.5, 0.0]))
    rng = np.random.default_rng(0)
    pts = reg.sample(rng, 32)
    assert pts.shape == (32, 2)
    assert all(reg.point_in(p) for p in pts)


def test_region_rejects_bad_boxes():
    with pytest.raises(ContractViolation):
        pshlab.box_region(np.array([[0.0, 1.0]]))  # odd real dimension
    with pytest.raises(ContractViolation):
        pshlab.box_region(np.array([[1.0, 0.0], [0.0, 1.0]]))  # lo >= hi
    with pytest.raises(ContractViolation):
        pshlab.box_region(1.0)  # scalar bound without dim


def test_region_predicate_too_tight():
    reg = pshlab.box_region(1.0, dim=1, contains=lambda z: False)
    with pytest.raises(SamplingError):
        reg.sample(np.random.default_rng(0), 4)


def test_psh_scan_abs_product_passes():
    f = pshlab.field_by_name("abs_prod", 2)
    rep = pshlab.psh_scan(f, pshlab.box_region(1.0, dim=2), samples=100, seed=0)
    assert rep.passed
    assert rep.worst_margin >= -1e-8
    assert rep.n_samples == 100


def test_psh_scan_concave_fails():
    f = pshlab.field_by_name("neg_norm_sq", 2)
    rep = pshlab.psh_scan(f, pshlab.box_region(1.0, dim=2), samples=100, seed=0)
    assert not rep.passed
    assert rep.worst_margin < -1e-6
    a, b, r = rep.witness
    # the witness must replay: the margin is the circle mean gap at (a, b, r)
    m = circle.mean_on_circle(f, a, r * b).value - f(a)
    assert m == pytest.approx(rep.worst_margin, abs=1e-12)


def test_psh_scan_harmonic_is_borderline():
    f = pshlab.field_by_name("re_z1", 2)
    rep = pshlab.psh_scan(f, pshlab.box_region(1.0, dim=2), samples=60, seed=1)
    assert abs(rep.worst_margin) <= 1e-9


def test_uniform_lambda_hilbert_square():
    f = pshlab.field_by_name("norm_sq_l2", 1)
    rep = pshlab.uniform_lambda(f, pshlab.box_region(1.0, dim=1), samples=40,
                                seed=0, r_max=0.02)
    assert rep.value == pytest.approx(1.0, abs=1e-6)
    assert rep.n_skipped == 0
    assert rep.witness is not None


# --- grids, kernels, mollification -------------------------------------------


def test_bump_kernel_unit_mass_exact():
    K = pshlab.bump_kernel(np.array([0.02, 0.02]), 0.2)
    assert math.fsum(K.ravel()) == 1.0
    assert np.all(K >= 0.0)
    # symmetric support
    assert K.shape[0] % 2 == 1 and K.shape[0] == K.shape[1]


def test_bump_kernel_needs_resolution():
    with pytest.raises(ResolutionError):
        pshlab.bump_kernel(np.array([0.1, 0.1]), 0.15)


def test_grid_roundtrip(tmp_path):
    f = pshlab.field_by_name("abs_re_z1", 1)
    grid = pshlab.sample_grid(f, [[-1.0, 1.0], [-1.0, 1.0]], (33, 17))
    stem = str(tmp_path / "g")
    grid.save(stem)
    back = pshlab.load_grid(stem)
    assert np.array_equal(back.values, grid.values)
    assert np.array_equal(back.box, grid.box)


def test_grid_csv_and_validation():
    grid = pshlab.sample_grid(pshlab.field_by_name("re_z1", 1),
                              [[-1.0, 1.0], [-1.0, 1.0]], (3, 3))
    lines = grid.to_csv().strip().split("\n")
    assert lines[0] == "re,im,value"
    assert len(lines) == 10
    with pytest.raises(ContractViolation):
        pshlab.GridFunction(np.array([[0.0, 1.0]]), np.ones((2, 2)))
    with pytest.raises(ContractViolation):
        pshlab.GridFunction(np.array([[0.0, 1.0], [0.0, 1.0]]),
                            np.array([[1.0, np.nan], [0.0, 0.0]]))


def test_mollify_preserves_constants_and_linear():
    box = [[-1.0, 1.0], [-1.0, 1.0]]
    const = pshlab.sample_grid(field(lambda z: 2.5, 1), box, (41, 41))
    out = pshlab.mollify(const, 0.3)
    assert np.allclose(out.values, 2.5, atol=1e-12)
    # symmetric kernel: affine fields pass through on the inner box
    lin = pshlab.sample_grid(pshlab.field_by_name("re_z1", 1), box, (41, 41))
    out = pshlab.mollify(lin, 0.3)
    ax = out.axes()[0]
    assert np.allclose(out.values, ax[:, None], atol=1e-12)
    # output box is inset by the kernel radius
    assert out.box[0, 0] > -1.0 and out.box[0, 1] < 1.0


def test_mollify_smooths_kink_and_keeps_submean():
    f = pshlab.field_by_name("abs_re_z1", 1)
    grid = pshlab.sample_grid(f, [[-2.0, 2.0], [-2.0, 2.0]], (201, 201))
    sm = pshlab.mollify(grid, 0.2)
    oracle = sm.as_field_oracle()
    lo, hi = sm.box[0, 0], sm.box[0, 1]
    reg = pshlab.box_region(np.array(sm.box))
    rep = pshlab.psh_scan(oracle, reg, samples=80, seed=3, r_max=0.1, tol=1e-7)
    assert rep.passed, rep.worst_margin
    assert lo == pytest.approx(-1.8) and hi == pytest.approx(1.8)


def test_mollify_rejects_bad_delta():
    grid = pshlab.sample_grid(pshlab.field_by_name("re_z1", 1),
                              [[-1.0, 1.0], [-1.0, 1.0]], (21, 21))
    with pytest.raises(ContractViolation):
        pshlab.mollify(grid, 0.0)


def test_field_oracle_validation():
    with pytest.raises(ContractViolation):
        pshlab.FieldOracle(lambda z: 0.0, dim=1, smoothness_hint="smooth")
    with pytest.raises(ContractViolation):
        pshlab.FieldOracle(lambda z: 0.0, dim=0)
    with pytest.raises(ContractViolation):
        pshlab.field_by_name("does_not_exist", 2)


def test_nan_field_raises_with_point():
    f = field(lambda z: float("nan"), 1)
    with pytest.raises(EvaluationError):
        pshlab.psh_scan(f, pshlab.box_region(1.0, dim=1), samples=4, seed=0)
