import math

import numpy as np
import pytest

from povm_uncertainty import catalog
from povm_uncertainty.errors import NumericError
from povm_uncertainty.linalg import SIGMA_X, SIGMA_Z
from povm_uncertainty.naimark import extend
from povm_uncertainty.povm import Povm, QuantumState, ValuedPovm, basis_pvm, trivial_povm
from povm_uncertainty.sampling import random_pvm, random_state, random_valued_povm
from povm_uncertainty.uncertainty import (
    check_convex_combination, check_tensor_additivity, distance_to_povm, mean_operator,
    property_report, statistical_distance, uncertainty_matrix, uncertainty_operator, variance,
)

from .conftest import ket

THETAS = [0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2, 1.0]
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


@pytest.mark.parametrize("theta", THETAS)
def test_mzx_mean_operators(theta):
    item = catalog.mzx(theta)
    np.testing.assert_allclose(mean_operator(item.valued("Z")), math.cos(theta) * SIGMA_Z, atol=1e-15)
    np.testing.assert_allclose(mean_operator(item.valued("X")), math.sin(theta) * SIGMA_X, atol=1e-15)


@pytest.mark.parametrize("theta", THETAS)
def test_mzx_uncertainty_operators(theta):
    item = catalog.mzx(theta)
    rep = uncertainty_operator(item.valued("Z"))
    np.testing.assert_allclose(rep.uncertainty_operator, math.sin(theta) ** 2 * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(uncertainty_matrix(item.valued("X")), math.cos(theta) ** 2 * np.eye(2), atol=1e-12)
    assert rep.form_discrepancy < 1e-14


def test_pvm_mean_is_the_operator():
    vp = ValuedPovm(basis_pvm(np.eye(3)), [2.0, -1.0, 0.5])
    np.testing.assert_allclose(mean_operator(vp), np.diag([2, -1, 0.5]))
    assert np.abs(uncertainty_matrix(vp)).max() < 1e-15


def test_trine_delta_uncertainty():
    item = catalog.trine()
    m1 = item.povm.elements[0]
    got = uncertainty_operator(item.valued("delta0"))
    np.testing.assert_allclose(got.uncertainty_operator, m1 - m1 @ m1, atol=1e-15)
    proj = m1 / np.trace(m1).real
    np.testing.assert_allclose(got.uncertainty_operator, (2 / 3 - 4 / 9) * proj, atol=1e-15)


def test_incomplete_povm_forms_disagree():
    plus = np.full((2, 2), 0.5)
    broken = ValuedPovm(Povm(np.array([0.6 * plus, np.diag([0.0, 1.0])])), [1.0, -1.0])
    with pytest.raises(NumericError):
        uncertainty_operator(broken)


@pytest.mark.parametrize("theta", [0.0, 0.5, math.pi / 4])
def test_variance_mzx_on_up_state(theta):
    d = variance(catalog.mzx(theta).valued("Z"), ket(1, 0))
    assert d.total == pytest.approx(1 - math.cos(theta) ** 2, abs=1e-14)
    assert d.projective_part == pytest.approx(0, abs=1e-14)
    assert d.povm_excess == pytest.approx(1 - math.cos(theta) ** 2, abs=1e-14)
    assert d.mean_value == pytest.approx(math.cos(theta), abs=1e-14)


def test_variance_pvm_eigenstate():
    vp = ValuedPovm(basis_pvm(H), [1, -1])
    assert variance(vp, H[:, 1]).total == pytest.approx(0, abs=1e-15)


def test_variance_classical_is_state_independent(rng):
    c = np.array([0.2, 0.5, 0.3])
    mu = np.array([1.0, -2.0, 4.0])
    vp = ValuedPovm(Povm(c[:, None, None] * np.eye(3)[None]), mu)
    expect = c @ mu**2 - (c @ mu) ** 2
    for _ in range(5):
        assert variance(vp, random_state(rng, 3)).total == pytest.approx(expect, abs=1e-12)


def test_variance_decomposition_on_mixed_states(rng):
    vp = random_valued_povm(rng, 3, 5)
    rho = np.diag([0.5, 0.3, 0.2])
    d = variance(vp, QuantumState.mixed(rho))
    assert d.total == pytest.approx(d.projective_part + d.povm_excess, abs=1e-12)
    assert d.povm_excess >= -1e-12


def test_property_report_mzx():
    rep = property_report(catalog.mzx(math.pi / 6).valued("Z"))
    e = rep.entries
    assert rep.ok
    assert e["P1_positivity"]["status"] == "pass"
    assert e["P2_vanishing_on_pvm"]["status"] == "n/a"
    assert e["P3_strict_positivity"]["status"] == "pass"
    assert e["P3_strict_positivity"]["norm"] == pytest.approx(0.25, abs=1e-14)


def test_property_report_pvm():
    e = property_report(catalog.pvm_z().valued()).entries
    assert e["P2_vanishing_on_pvm"]["status"] == "pass"
    assert e["P3_strict_positivity"]["status"] == "n/a"


def test_property_report_classical():
    vp = ValuedPovm(Povm(np.array([np.eye(2) / 3, 2 * np.eye(2) / 3])), [0.0, 1.0])
    e = property_report(vp).entries["P4_classical_reduction"]
    assert e["status"] == "pass"
    assert e["classical_variance"] == pytest.approx(2 / 9, abs=1e-15)
    np.testing.assert_allclose(uncertainty_matrix(vp), 2 / 9 * np.eye(2), atol=1e-15)


def test_tensor_additivity_examples(rng):
    a = ValuedPovm(random_pvm(rng, 2), [1, -1])
    b = ValuedPovm(random_pvm(rng, 3), [0, 2, 5])
    assert check_tensor_additivity(a, b) < 1e-13
    q = math.pi / 4
    assert check_tensor_additivity(catalog.mzx(q).valued("Z"), catalog.mzx(q).valued("X")) <= 1e-10
    assert check_tensor_additivity(catalog.mzx(0.4).valued("Z"), trivial_povm(1)) == pytest.approx(0, abs=1e-15)


def test_convex_combination_examples():
    z = catalog.pvm_z().valued()
    x = catalog.pvm_x().valued()
    assert check_convex_combination(1.0, z, x) == pytest.approx(0, abs=1e-15)
    assert check_convex_combination(0.5, z, x) <= 1e-10
    from povm_uncertainty.povm import mix

    np.testing.assert_allclose(uncertainty_matrix(mix(0.5, z, x)), np.eye(2) / 2, atol=1e-15)
    a, b = catalog.mzx(0.2).valued("Z"), catalog.mzx(1.1).valued("Z")
    assert check_convex_combination(0.3, a, b) <= 1e-10


@pytest.mark.parametrize("theta", [0.3, math.pi / 4])
def test_distance_to_povm(theta):
    vp = catalog.mzx(theta).valued("Z")
    ext = extend(vp)
    mu = ext.lift_values(vp.values)
    m = mean_operator(vp)
    tr = np.trace(uncertainty_matrix(vp)).real
    assert distance_to_povm(m, ext, mu) == pytest.approx(tr, abs=1e-12)
    for eps in (0.1, -0.3):
        assert distance_to_povm(m + eps * SIGMA_Z, ext, mu) == pytest.approx(tr + 2 * eps**2, abs=1e-12)


def test_distance_zero_for_pvm():
    vp = catalog.pvm_x().valued()
    ext = extend(vp)
    assert distance_to_povm(mean_operator(vp), ext, vp.values) == pytest.approx(0, abs=1e-15)
    assert statistical_distance(mean_operator(vp), ext, vp.values, ket(0.3, 1)) == pytest.approx(0, abs=1e-15)


def test_statistical_distance(rng):
    vp = catalog.mzx(math.pi / 4).valued("Z")
    ext = extend(vp)
    mu = ext.lift_values(vp.values)
    m = mean_operator(vp)
    assert statistical_distance(m, ext, mu, ket(1, 0)) == pytest.approx(0.5, abs=1e-14)
    dm2 = uncertainty_matrix(vp)
    for _ in range(10):
        psi = random_state(rng, 2)
        assert statistical_distance(m, ext, mu, psi) == pytest.approx(psi.expectation(dm2), abs=1e-12)
