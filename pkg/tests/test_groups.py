import math

import numpy as np
import pytest

from platodyn.groups import (SymmetryGroup, check_invariance,
                             close_under_product, dihedral_group,
                             group_checks, icosahedral_group,
                             octahedral_group, rotation_matrix,
                             symmetry_group, tetrahedral_group)
from platodyn.potentials import POLYNOMIALS


def test_rotation_matrix_basics():
    R = rotation_matrix((0.0, 0.0, 1.0), math.pi / 2)
    assert R @ np.array([1.0, 0.0, 0.0]) == pytest.approx([0.0, 1.0, 0.0])
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-14)
    # axis normalization is internal
    R2 = rotation_matrix((0.0, 0.0, 7.0), math.pi / 2)
    assert np.max(np.abs(R - R2)) < 1e-14


@pytest.mark.parametrize("factory,order", [
    (tetrahedral_group, 12),
    (octahedral_group, 24),
    (icosahedral_group, 60),
])
def test_group_orders(factory, order):
    grp = factory()
    assert grp.order == order
    assert grp.elements.shape == (order, 3, 3)


@pytest.mark.parametrize("k,order", [(2, 4), (3, 6), (5, 10)])
def test_dihedral_orders(k, order):
    assert dihedral_group(k).order == order


def test_symmetry_group_lookup():
    assert symmetry_group("T12").order == 12
    assert symmetry_group("O24").order == 24
    assert symmetry_group("I60").order == 60
    assert symmetry_group("dihedral(4)").order == 8
    with pytest.raises(KeyError):
        symmetry_group("E8")


@pytest.mark.parametrize("factory", [tetrahedral_group, octahedral_group,
                                     icosahedral_group,
                                     lambda: dihedral_group(3)])
def test_group_checks_pass(factory):
    checks = group_checks(factory())
    assert checks["ok"]
    assert checks["orthogonality"] < 1e-12
    assert checks["determinant"] < 1e-12
    assert checks["identity"] < 1e-12
    assert checks["closure"] < 1e-6


def test_perturbed_element_fails_orthogonality():
    grp = icosahedral_group()
    bad = grp.elements.copy()
    bad[7, 0, 0] += 1e-3
    checks = group_checks(SymmetryGroup("I60-broken", 60, bad))
    assert not checks["ok"]
    assert checks["orthogonality"] > 1e-4


def test_tetrahedral_subgroup_of_octahedral():
    octa = octahedral_group()
    keys = {tuple(np.round(g, 9).ravel()) for g in octa.elements}
    for g in tetrahedral_group().elements:
        assert tuple(np.round(g, 9).ravel()) in keys


def test_closure_cap_enforced():
    # an irrational rotation angle never closes
    gen = [rotation_matrix((0.0, 0.0, 1.0), 1.0)]
    with pytest.raises(ValueError):
        close_under_product(gen, max_order=64)


@pytest.mark.parametrize("pname,factory,tol", [
    ("T", tetrahedral_group, 1e-9),
    ("O", octahedral_group, 1e-9),
    ("TO", octahedral_group, 1e-9),
    ("I", icosahedral_group, 1e-9),
])
def test_polynomial_invariance(pname, factory, tol):
    poly = POLYNOMIALS[pname]
    res = check_invariance(poly.evaluate, factory(), samples=500)
    assert res <= tol


def test_octahedral_does_not_fix_tetrahedral_polynomial():
    # xyz flips sign under the quarter turn, which is the T12 -> O24 step
    res = check_invariance(POLYNOMIALS["T"].evaluate, octahedral_group(),
                           samples=200)
    assert res > 1e-2


def test_dihedral_invariance_of_hexagonal_square():
    # dihedral elements act on the plane; (Im (x+iy)^3)^2 has the full
    # hexagonal symmetry of the k=3 family's angular factor
    def poly(x, y):
        return (3 * x * x * y - y ** 3) ** 2

    res = check_invariance(poly, dihedral_group(3), samples=300)
    assert res <= 1e-9
