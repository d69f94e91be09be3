import math

import numpy as np
import pytest

from platodyn.charts import (CHARTS, ChartGuardError, JACOBI_MATRIX, PhaseState,
                             chart, jacobi_forward, jacobi_inverse,
                             r4_state_to_line, spherical_to_cartesian,
                             wrap_angle)


def test_chart_registry_covers_all_six_kinds():
    kinds = {"plane-polar", "plane-cartesian", "sphere", "euclid3-spherical",
             "euclid3-cartesian", "euclid4-cylindrical"}
    assert set(CHARTS) == kinds
    for kind in kinds:
        assert chart(kind).kind == kind


def test_unknown_chart_rejected():
    with pytest.raises(KeyError):
        chart("hyperbolic")


def test_momenta_names_mirror_coordinates():
    sphere = CHARTS["sphere"]
    assert sphere.coords == ("theta", "psi")
    assert sphere.momenta == ("p_theta", "p_psi")
    assert CHARTS["euclid4-cylindrical"].coords == ("u", "rho", "theta", "psi")


def test_sphere_guard_rejects_poles():
    sphere = CHARTS["sphere"]
    assert sphere.violation((1e-10, 0.3)) is not None
    assert sphere.violation((math.pi - 1e-10, 0.3)) is not None
    assert sphere.violation((1.0, 0.3)) is None
    # configurable guard distance
    assert sphere.violation((1e-4, 0.3), guard=1e-3) is not None
    assert sphere.violation((1e-4, 0.3), guard=1e-6) is None


def test_radial_guards():
    assert CHARTS["plane-polar"].violation((1e-12, 0.0)) is not None
    assert CHARTS["euclid3-spherical"].violation((1e-12, 1.0, 0.0)) is not None
    assert CHARTS["euclid3-spherical"].violation((1.0, 1e-12, 0.0)) is not None
    assert CHARTS["plane-cartesian"].violation((0.0, 0.0)) is None


def test_phase_state_arity_checked():
    with pytest.raises(ValueError):
        PhaseState(chart=CHARTS["sphere"], q=(1.0,), p=(0.0, 0.0))
    with pytest.raises(ValueError):
        PhaseState(chart=CHARTS["sphere"], q=(1.0, 2.0), p=(0.0,))


def test_phase_state_var_lookup():
    s = PhaseState(chart=CHARTS["sphere"], q=(1.2, 0.7), p=(0.3, -0.4))
    assert s.var("theta") == 1.2
    assert s.var("psi") == 0.7
    assert s.var("p_theta") == 0.3
    assert s.var("p_psi") == -0.4
    with pytest.raises(KeyError):
        s.var("rho")


def test_spherical_to_cartesian_axes():
    x, y, z = spherical_to_cartesian(2.0, math.pi / 2, 0.0)
    assert (x, y, z) == pytest.approx((2.0, 0.0, 0.0), abs=1e-15)
    x, y, z = spherical_to_cartesian(1.0, math.pi / 2, math.pi / 2)
    assert (x, y, z) == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)
    # theta measured from +z
    x, y, z = spherical_to_cartesian(3.0, 1e-9, 0.7)
    assert z == pytest.approx(3.0, abs=1e-12)


def test_jacobi_matrix_is_orthogonal():
    gap = JACOBI_MATRIX @ JACOBI_MATRIX.T - np.eye(4)
    assert np.max(np.abs(gap)) < 1e-15


def test_jacobi_fully_symmetric_point():
    assert jacobi_forward((1.0, 1.0, 1.0, 1.0)) == pytest.approx(
        (0.0, 0.0, 0.0, 2.0), abs=1e-15)
    assert jacobi_inverse((0.0, 0.0, 0.0, 2.0)) == pytest.approx(
        (1.0, 1.0, 1.0, 1.0), abs=1e-15)


def test_jacobi_round_trip_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = tuple(rng.uniform(-5, 5, size=4))
        assert jacobi_inverse(jacobi_forward(x)) == pytest.approx(x, abs=1e-12)
        u = tuple(rng.uniform(-5, 5, size=4))
        assert jacobi_forward(jacobi_inverse(u)) == pytest.approx(u, abs=1e-12)


def test_jacobi_first_component_is_pair_difference():
    u = jacobi_forward((3.0, 1.0, 0.0, 0.0))
    assert u[0] == pytest.approx((3.0 - 1.0) / math.sqrt(2), abs=1e-15)


def test_r4_state_to_line_preserves_norm():
    st = PhaseState(chart=CHARTS["euclid4-cylindrical"],
                    q=(0.8, 1.5, 1.1, 0.4), p=(0.0, 0.0, 0.0, 0.0))
    line = r4_state_to_line(st)
    assert sum(v * v for v in line) == pytest.approx(0.8 ** 2 + 1.5 ** 2,
                                                     abs=1e-12)


def test_r4_state_to_line_needs_the_cylindrical_chart():
    st = PhaseState(chart=CHARTS["sphere"], q=(1.0, 1.0), p=(0.0, 0.0))
    with pytest.raises(ValueError):
        r4_state_to_line(st)


@pytest.mark.parametrize("angle,expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (2 * math.pi, 0.0),
    (7.0, 7.0 - 2 * math.pi),
])
def test_wrap_angle(angle, expected):
    assert wrap_angle(angle) == pytest.approx(expected, abs=1e-12)
