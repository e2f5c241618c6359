import math

import numpy as np
import pytest
import scipy.linalg

from povm_uncertainty import catalog
from povm_uncertainty.errors import DimensionError, DomainError
from povm_uncertainty.linalg import SIGMA_Z
from povm_uncertainty.naimark import (
    align, apply_ancilla_unitary, extend, extended_operator, robertson_check, robertson_pair,
)
from povm_uncertainty.povm import Povm, ValuedPovm, rank1_vectors
from povm_uncertainty.sampling import random_povm, random_state, random_unitary
from povm_uncertainty.uncertainty import uncertainty_matrix


def completion_oracle(vectors):
    """Independent completion: null space of the isometry's adjoint via scipy."""
    iso = vectors.conj()                      # columns <m_k| as an n x d isometry
    comp = scipy.linalg.null_space(iso.conj().T)
    return np.hstack([iso, comp])


def test_pvm_extension_is_trivial():
    ext = extend(catalog.pvm_z().povm)
    assert ext.ext_dim == 2 and ext.ancilla_dim == 0
    np.testing.assert_allclose(np.abs(ext.basis), np.eye(2), atol=1e-15)


def test_trine_extension_matches_oracle():
    povm = catalog.trine().povm
    ext = extend(povm)
    assert ext.ext_dim == 3 and ext.ancilla_dim == 1
    assert ext.orthonormality_residual() <= 1e-12
    assert ext.restriction_residual(povm) <= 1e-12
    u = completion_oracle(rank1_vectors(povm))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    # ancilla parts are fixed up to one phase per column
    np.testing.assert_allclose(np.abs(ext.ancilla_parts[:, 0]), np.abs(u[:, 2]), atol=1e-12)
    np.testing.assert_allclose(np.abs(ext.ancilla_parts), 1 / math.sqrt(3), atol=1e-12)


def test_tetrahedron_reference_alignment():
    item = catalog.tetrahedron()
    ref = item.reference_extension
    ext = extend(item.povm)
    assert ext.ext_dim == 4
    assert ref.orthonormality_residual() <= 1e-12
    assert ref.restriction_residual(item.povm) <= 1e-12
    a = align(ref, ext)
    assert a.residual <= 1e-10
    assert a.ancilla_unitary.shape == (1, 1)


def test_apply_ancilla_unitary():
    ext = extend(catalog.trine().povm)
    same = apply_ancilla_unitary(ext, np.eye(1))
    np.testing.assert_array_equal(same.basis, ext.basis)
    ref = catalog.tetrahedron_reference_extension()
    flipped = apply_ancilla_unitary(ref, -np.eye(1))
    np.testing.assert_allclose(flipped.ancilla_parts, -ref.ancilla_parts)
    with pytest.raises(DimensionError):
        apply_ancilla_unitary(ext, np.eye(2))


def test_trine_overlaps_depend_on_phase():
    ext = extend(catalog.trine().povm)
    seen = set()
    for phi in (0.0, 1.0, 2.0, math.pi):
        e2 = apply_ancilla_unitary(ext, np.exp(1j * phi) * np.eye(1))
        seen.add(round(float(np.abs(ext.basis.conj() @ e2.basis.T).max()), 9))
    assert len(seen) > 1


def test_extended_operator_examples():
    ext = extend(catalog.pvm_z().povm)
    np.testing.assert_allclose(extended_operator(ext, [1, -1]), SIGMA_Z, atol=1e-15)

    ext = extend(catalog.trine().povm)
    np.testing.assert_allclose(np.linalg.eigvalsh(extended_operator(ext, [1, 0, 0])), [0, 0, 1], atol=1e-14)

    item = catalog.mzx(math.pi / 4)
    ext = extend(item.povm)
    me = extended_operator(ext, ext.lift_values(item.values["Z"]))
    assert me.shape == (4, 4)
    np.testing.assert_allclose(me[:2, :2], SIGMA_Z / math.sqrt(2), atol=1e-14)


def test_lift_values_for_refined_elements():
    halves = Povm(np.array([np.eye(2) / 2, np.eye(2) / 2]), ("a", "b"))
    ext = extend(halves)
    assert ext.ext_dim == 4
    np.testing.assert_array_equal(ext.lift_values([3.0, -1.0]), [3, 3, -1, -1])
    with pytest.raises(DimensionError):
        ext.lift_values([1.0, 2.0, 3.0])


def test_extend_rejects_incomplete():
    with pytest.raises(DomainError):
        extend(Povm(np.array([np.diag([1.0, 0.0])])))


def test_robertson_pvm_case():
    ext = extend(catalog.pvm_x().povm)
    a, b = robertson_pair(ext, [1, -1])
    np.testing.assert_allclose(a, b)


@pytest.mark.parametrize("name,values", [("trine", [1, 0, 0]), ("mzx", "X")])
def test_robertson_identity(rng, name, values):
    item = catalog.build(name, theta=math.pi / 3 if name == "mzx" else None)
    ext = extend(item.povm)
    mu = ext.lift_values(item.values[values] if isinstance(values, str) else values)
    states = [random_state(rng, item.povm.dim) for _ in range(100)]
    chk = robertson_check(ext, mu, states)
    assert chk.max_modulus_residual <= 1e-9
    assert chk.max_signed_residual <= 1e-9
    assert chk.sign == 1
    # the commutator itself carries 2i <DM^2>
    m_tilde, m_bar = robertson_pair(ext, mu)
    comm = (m_tilde @ m_bar - m_bar @ m_tilde)[:item.povm.dim, :item.povm.dim]
    dm2 = uncertainty_matrix(ValuedPovm(ext.restricted_povm(), mu))
    for st in states[:10]:
        assert np.trace(st.density @ comm) == pytest.approx(2j * st.expectation(dm2), abs=1e-12)


def test_random_rank1_extensions(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(d, d + 4))
        p = random_povm(rng, d, n, rank=1)
        ext = extend(p)
        assert ext.orthonormality_residual() <= 1e-10
        assert ext.restriction_residual(p) <= 1e-10


def test_align_recovers_ancilla_unitary(rng):
    ext = extend(random_povm(rng, 2, 5, rank=1))
    u = random_unitary(rng, ext.ancilla_dim)
    a = align(apply_ancilla_unitary(ext, u), ext)
    assert a.residual <= 1e-10
    np.testing.assert_allclose(a.ancilla_unitary, u, atol=1e-10)
