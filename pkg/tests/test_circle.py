import math

import numpy as np
import pytest

from cvxlab import circle, spaces
from cvxlab.circle import QuadratureControls
from cvxlab.errors import EvaluationError


def test_orthogonal_pair_q2():
    sp = spaces.lp(2, 2)
    res = circle.power_mean_on_circle(sp, [1.0, 0.0], [0.0, 1.0], 2.0)
    assert res.value == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert res.nodes_used >= 8 and res.nodes_used & (res.nodes_used - 1) == 0
    assert res.err_estimate >= 0.0


def test_sup_norm_small_perturbation():
    # max(1, 1/2) on the whole circle
    sp = spaces.lp(math.inf, 2)
    res = circle.power_mean_on_circle(sp, [1.0, 0.0], [0.0, 0.5], 1.0)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_centered_disc_any_q():
    sp = spaces.lp(2, 1)
    w = 0.3 - 1.2j
    for q in (0.5, 1.0, 2.0, 7.0):
        res = circle.power_mean_on_circle(sp, [0.0], [w], q)
        assert res.value == pytest.approx(abs(w), abs=1e-12)


def test_plain_mean_harmonic():
    res = circle.mean_on_circle(lambda z: z[0].real, [0.0], [1.0])
    assert abs(res.value) <= 1e-13


def test_plain_mean_quadratic():
    a0, b0 = 0.4 + 0.2j, -0.3 + 0.9j
    res = circle.mean_on_circle(lambda z: abs(z[0]) ** 2, [a0], [b0])
    assert res.value == pytest.approx(abs(a0) ** 2 + abs(b0) ** 2, abs=1e-12)


def test_plain_mean_log_kernel():
    # harmonic on the closed half-disc; mean over |z| = 1/2 equals value at 0
    res = circle.mean_on_circle(lambda z: -math.log(abs(1.0 - z[0])), [0.0], [0.5])
    assert abs(res.value) <= 1e-10


def test_rotation_invariance():
    sp = spaces.lp(1.5, 2)
    rng = np.random.default_rng(0)
    a = np.array([0.7, -0.2 + 0.4j])
    b = np.array([0.1 - 0.3j, 0.8])
    base = circle.power_mean_on_circle(sp, a, b, 1.0).value
    for alpha in rng.uniform(0.0, 2.0 * np.pi, 100):
        rot = circle.power_mean_on_circle(sp, a, np.exp(1j * alpha) * b, 1.0).value
        assert abs(rot - base) <= 1e-9


def test_monotone_in_q():
    sp = spaces.lp(1, 2)
    rng = np.random.default_rng(4)
    for _ in range(25):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        qs = (0.5, 1.0, 2.0, 4.0)
        vals = [circle.power_mean_on_circle(sp, a, b, q).value for q in qs]
        for lo, hi in zip(vals, vals[1:]):
            assert lo <= hi + 1e-9


def test_radial_monotonicity_of_norm_mean():
    sp = spaces.lp(3, 2)
    f = lambda z: float(spaces.norm(sp, z))
    a = np.array([0.2 + 0.1j, -0.5])
    b = np.array([0.9, 0.3j])
    radii = np.linspace(0.05, 2.0, 20)
    vals = [circle.mean_on_circle(f, a, r * b).value for r in radii]
    for lo, hi in zip(vals, vals[1:]):
        assert lo <= hi + 1e-9


def test_spectral_exactness_at_eight_nodes():
    sp = spaces.lp(2, 3)
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        exact = math.sqrt(spaces.norm(sp, a) ** 2 + spaces.norm(sp, b) ** 2)
        got = circle.power_mean_fixed(sp, a, b, 2.0, 8)
        assert abs(got - exact) <= 1e-13 * max(1.0, exact)


def test_max_nodes_warns_and_flags():
    # integrand with a kink near the circle makes 16 nodes insufficient
    sp = spaces.lp(1, 1)
    ctrl = QuadratureControls(tol=1e-15, max_nodes=16)
    with pytest.warns(RuntimeWarning):
        res = circle.power_mean_on_circle(sp, [0.1], [1.0], 1.0, ctrl)
    assert not res.converged
    assert res.err_estimate > 1e-15


def test_oracle_failures_carry_the_node():
    def bad(z):
        if z[0].real > 0.9:
            return math.nan
        return 0.0

    with pytest.raises(EvaluationError) as exc:
        circle.mean_on_circle(bad, [0.0], [1.0])
    assert exc.value.theta is not None


def test_minus_inf_is_tolerated():
    # usc convention: -inf at one node must not poison the mean
    f = lambda z: -math.inf if abs(z[0] - 1.0) < 1e-9 else 0.0
    res = circle.mean_on_circle(f, [0.0], [1.0])
    assert res.value == -math.inf


def test_controls_validation():
    from cvxlab.errors import ContractViolation
    with pytest.raises(ContractViolation):
        circle.power_mean_on_circle(spaces.lp(2, 1), [0.0], [1.0], -1.0)
    with pytest.raises(ContractViolation):
        QuadratureControls(tol=-1.0).validated()
