import math

import numpy as np
import pytest

from cvxlab import domains, pshlab, spaces
from cvxlab.errors import (ContractViolation, NoDataError, NonSmoothPoint,
                           SchemaError)

L22 = spaces.lp(2, 2)
L23 = spaces.lp(2, 3)
L42 = spaces.lp(4, 2)


# --- sampling ---------------------------------------------------------------


def test_boundary_sample_sits_on_rho_zero():
    dom = domains.ball_of(L23)
    pts = domains.boundary_sample(dom, 25, seed=0)
    res = np.array([abs(float(dom.rho(p))) for p in pts])
    assert res.max() <= 1e-10
    norms = spaces.norms(L23, pts)
    assert np.allclose(norms, 1.0, atol=1e-8)


def test_interior_sample_respects_depth():
    dom = domains.ball_of(L42)
    pts = domains.interior_sample(dom, 40, seed=1, depth=0.1)
    vals = np.array([float(dom.rho(p)) for p in pts])
    assert vals.max() <= -0.1


def test_ball_of_validation():
    with pytest.raises(ContractViolation):
        domains.ball_of(L22, radius=0.0)
    with pytest.raises(ContractViolation):
        domains.ball_of(L22, rho_kind="nope")
    # odd p has no polynomial defining function
    with pytest.raises(ContractViolation):
        domains.ball_of(spaces.lp(3, 2), rho_kind="p_power")


# --- Levi reports -----------------------------------------------------------


def test_levi_hilbert_sphere_is_identity():
    dom = domains.ball_of(L23)
    for a in domains.boundary_sample(dom, 5, seed=2):
        rep = domains.levi_report(dom, a)
        assert rep.smooth_ok
        assert rep.min_eigenvalue == pytest.approx(1.0, abs=1e-6)
        assert rep.grad_norm == pytest.approx(1.0, abs=1e-8)
        assert rep.tangent_basis.shape == (2, 3)


def test_levi_quartic_flat_point():
    # at (1, 0) the tangent line {z1 = 1} meets the quartic ball to fourth
    # order: the tangential Levi form vanishes
    dom = domains.ball_of(L42)
    rep = domains.levi_report(dom, np.array([1.0, 0.0], dtype=np.complex128))
    assert abs(rep.min_eigenvalue) <= 1e-6
    assert rep.grad_norm == pytest.approx(2.0, abs=1e-8)


def test_levi_quartic_symbolic_form():
    # rho = |z1|^4 + |z2|^4 - 1 has tangential Levi eigenvalue
    # 4 |z1|^2 |z2|^2 (|z1|^4 + |z2|^4) / (|z1|^6 + |z2|^6)
    dom = domains.ball_of(L42)
    for a in domains.boundary_sample(dom, 8, seed=5):
        m1, m2 = abs(a[0]), abs(a[1])
        want = (4.0 * m1**2 * m2**2 * (m1**4 + m2**4) / (m1**6 + m2**6))
        rep = domains.levi_report(dom, a)
        assert rep.min_eigenvalue == pytest.approx(want, abs=1e-5)


def test_tangent_frame_is_unitary_and_orthogonal():
    g = np.array([1.0 + 2.0j, -0.5j, 0.25])
    B = domains.tangent_frame(g)
    assert B.shape == (2, 3)
    assert np.allclose(B @ B.conj().T, np.eye(2), atol=1e-12)
    assert np.max(np.abs(B @ g)) <= 1e-12


def test_tangent_frame_dim_one():
    assert domains.tangent_frame(np.array([1.0])).shape == (0, 1)


def test_kink_detection_on_l1_ball():
    dom = domains.ball_of(spaces.lp(1, 2))
    assert not dom.smooth
    with pytest.raises(NonSmoothPoint):
        domains.levi_report(dom, np.array([1.0, 0.0], dtype=np.complex128))
    # generic boundary points of the l1 ball are smooth
    a = np.array([0.5, 0.5j], dtype=np.complex128)
    rep = domains.levi_report(dom, a)
    assert rep.smooth_ok


def test_defining_function_choice_agrees_in_sign():
    # the same ball through two defining functions: curvature scales with
    # the gradient but strict pseudoconvexity must not flip
    a = domains.boundary_sample(domains.ball_of(L22), 1, seed=7)[0]
    power = domains.levi_report(domains.ball_of(L22, rho_kind="p_power"), a)
    norm = domains.levi_report(domains.ball_of(L22, rho_kind="norm_minus_one"), a)
    assert power.min_eigenvalue == pytest.approx(1.0, abs=1e-6)
    assert norm.min_eigenvalue == pytest.approx(0.5, abs=1e-5)
    assert power.grad_norm == pytest.approx(2.0 * norm.grad_norm, rel=1e-6)


def test_strict_levi_scan_hilbert():
    rep = domains.strict_levi_scan(domains.ball_of(L23), count=20, seed=0)
    assert rep.passed
    assert rep.worst_min_eig == pytest.approx(1.0, abs=1e-4)
    assert rep.n_skipped == 0


def test_strict_levi_scan_quartic_matches_symbolic():
    # the scan and the closed form see the same boundary sample (same seed)
    dom = domains.ball_of(L42)
    count, seed = 20, 3
    rep = domains.strict_levi_scan(dom, count=count, seed=seed)
    pts = domains.boundary_sample(dom, count, seed=seed)
    vals = []
    for a in pts:
        m1, m2 = abs(a[0]), abs(a[1])
        vals.append(4.0 * m1**2 * m2**2 * (m1**4 + m2**4) / (m1**6 + m2**6))
    assert rep.worst_min_eig == pytest.approx(min(vals), abs=1e-5)
    assert rep.passed


def test_strict_levi_scan_flat_faces():
    # the polydisc-like max ball: flat faces carry zero tangential curvature
    rep = domains.strict_levi_scan(domains.ball_of(spaces.lp(math.inf, 2)),
                                   count=20, seed=0)
    assert abs(rep.worst_min_eig) <= 1e-6
    assert rep.passed


# --- analytic disc radii ------------------------------------------------------


def test_disc_radius_closed_form():
    dom = domains.ball_of(L22)
    a = np.array([0.5, 0.0], dtype=np.complex128)
    v = np.array([0.0, 1.0], dtype=np.complex128)
    r = domains.disc_radius(dom, a, v)
    assert r == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-6)
    # center on the direction line: radius to the boundary along +/- v
    r2 = domains.disc_radius(dom, a, np.array([1.0, 0.0]))
    assert r2 == pytest.approx(0.5, abs=1e-6)
    # outside point has no disc
    assert domains.disc_radius(dom, np.array([2.0, 0.0]), v) == 0.0


def test_disc_radius_certified_feasible():
    dom = domains.ball_of(L42)
    a = np.array([0.3 + 0.2j, -0.4j], dtype=np.complex128)
    v = np.array([1.0, 1.0j], dtype=np.complex128)
    r = domains.disc_radius(dom, a, v)
    th = 2.0 * np.pi * np.arange(256) / 256
    pts = a[None, :] + r * np.exp(1j * th)[:, None] * v[None, :]
    assert max(float(dom.rho(p)) for p in pts) < 0.0


def test_ball_disc_radii_matches_scalar_version():
    rng = np.random.default_rng(4)
    for sp in (L22, spaces.lp(1, 2)):
        dom = domains.ball_of(sp, 2.0)
        A = 0.5 * (rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))
        B = spaces.random_unit(sp, 3, seed=11)
        R = domains.ball_disc_radii(sp, 2.0, A, B)
        # the two searches discretize the circle differently (64 nodes vs a
        # 256-node recertification), so they agree to grid resolution only
        for i in range(3):
            want = domains.disc_radius(dom, A[i], B[i])
            assert R[i] == pytest.approx(want, rel=1e-3)


# --- exhaustion -----------------------------------------------------------


def test_exhaustion_identity_hilbert():
    dom = domains.ball_of(L22)
    pts = domains.interior_sample(dom, 10, seed=9, depth=0.05)
    rng = np.random.default_rng(9)
    for a in pts:
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        res = domains.exhaustion_identity_residual(dom, a, b)
        assert res <= 1e-5


def test_exhaustion_identity_needs_interior():
    dom = domains.ball_of(L22)
    with pytest.raises(ContractViolation):
        domains.exhaustion_identity_residual(dom, np.array([1.0, 0.0]),
                                             np.array([0.0, 1.0]))


def test_exhaustion_check_hilbert_reciprocal_phi():
    # -log(-rho) on the round ball gains curvature 1/|rho| from the first
    # expansion term alone
    dom = domains.ball_of(L22)
    rep = domains.exhaustion_check(dom, lambda z: 1.0 / abs(float(dom.rho(z))),
                                   samples=40, seed=0)
    assert rep.passed
    assert rep.worst_margin >= -1e-6
    assert rep.inf_phi_rho == pytest.approx(1.0, abs=1e-12)


def test_exhaustion_check_quartic_degenerates_at_center():
    # near z = 0 the quartic ball's curvature term collapses, so no
    # c/|rho| bound with c > 0 can hold there
    dom = domains.ball_of(L42)
    rep = domains.exhaustion_check(dom, lambda z: 0.5 / abs(float(dom.rho(z))),
                                   samples=60, seed=1)
    assert not rep.passed
    assert rep.worst_margin < 0.0


def test_exhaustion_check_zero_phi_fails_threshold():
    dom = domains.ball_of(L22)
    rep = domains.exhaustion_check(dom, 0.0, samples=20, seed=2)
    assert rep.worst_margin >= 0.0
    assert rep.inf_phi_rho == 0.0
    assert not rep.passed


# --- unit ball uniform convexity ---------------------------------------------


def test_unit_ball_check_hilbert():
    # the q = 1 growth constant of the round disc is 1/2, as in the scalar
    # case, giving the quadratic gain sqrt(1/8 + 1/4) - 1/2
    rep = domains.unit_ball_uniform_check(L22, pairs=200, seed=0, budget=1024)
    assert rep.passed and not rep.skipped
    assert rep.lam_hat == pytest.approx(0.5, abs=1e-3)
    assert rep.lam0 == pytest.approx(math.sqrt(0.375) - 0.5, abs=1e-3)
    assert rep.worst_margin >= -rep.slack


def test_unit_ball_check_l1_constant():
    rep = domains.unit_ball_uniform_check(spaces.lp(1, 2), pairs=200, seed=0,
                                          budget=1024)
    assert rep.passed
    assert rep.lam0 == pytest.approx(0.11237, abs=1e-3)


def test_unit_ball_check_flat_space_skips():
    rep = domains.unit_ball_uniform_check(spaces.lp(math.inf, 2), pairs=50,
                                          seed=0, budget=512)
    assert rep.skipped and rep.passed
    assert rep.reason != ""
    assert rep.lam0 == 0.0


# --- serialization -------------------------------------------------------------


def test_parse_domain_grammar():
    dom = domains.parse_domain("ball:lp:2:2")
    assert dom.radius == 1.0 and dom.dim == 2
    dom = domains.parse_domain("ball:lp:2:2:1.5")
    assert dom.radius == 1.5
    dom = domains.parse_domain("lp:4:2")
    assert dom.kind == "p_power"
    dom = domains.parse_domain('{"ball_of": "lp:2:3", "radius": 2.0}')
    assert dom.radius == 2.0 and dom.dim == 3
    with pytest.raises(SchemaError):
        domains.parse_domain("ball:lp:2:2:houses")
    with pytest.raises(SchemaError):
        domains.domain_from_json_dict({"ball_of": "lp:2:2", "rho": "custom"})
    with pytest.raises(SchemaError):
        domains.domain_from_json_dict({"ball_of": "lp:2:2", "extra": 1})
    with pytest.raises(SchemaError):
        domains.domain_from_json_dict({"radius": 1.0})


def test_scan_needs_usable_points():
    # a defining function with high-frequency ripple is non-smooth at the
    # probe scale everywhere, so every boundary point is skipped
    base = domains.ball_of(L22)

    def fn(z):
        phase = (1.31 * float(np.real(z[0])) + 2.71 * float(np.imag(z[0]))
                 + 3.14 * float(np.real(z[1])) + 0.577 * float(np.imag(z[1])))
        return float(base.rho(z)) + 1e-4 * math.sin(3e7 * phase)

    rippled = pshlab.FieldOracle(fn, dim=2, smoothness_hint="lipschitz",
                                 name="rippled")
    dom = domains.DomainSpec(rippled, 2, base.box, base.interior_point,
                             False, "rippled", "custom", base.space,
                             base.radius)
    with pytest.raises(NoDataError):
        domains.strict_levi_scan(dom, count=3, seed=0)
