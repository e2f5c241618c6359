"""Naimark extensions of rank-1 POVMs by isometry completion.

An extension is stored as an ``n x n`` array whose row ``k`` is the
extended basis vector |m~_k>: its first ``d`` entries are the system part
|m_k> and the remaining ``n - d`` entries the ancilla part |m'_k>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, NumericError
from .linalg import ORTHONORMAL_TOL, hermitian_part, is_unitary, max_abs, system_projector
from .povm import Povm, ValuedPovm, as_state, rank1_decomposition


@dataclass(frozen=True)
class NaimarkExtension:
    system_dim: int
    basis: np.ndarray
    labels: tuple[str, ...]
    parents: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionError(f"extension basis must be square, got {b.shape}")
        if b.shape[0] < self.system_dim:
            raise DimensionError("extended dimension smaller than system dimension")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "parents", np.asarray(self.parents, dtype=int))

    @property
    def ext_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ancilla_dim(self) -> int:
        return self.ext_dim - self.system_dim

    @property
    def projector(self) -> np.ndarray:
        return system_projector(self.system_dim, self.ext_dim)

    @property
    def system_parts(self) -> np.ndarray:
        return self.basis[:, : self.system_dim]

    @property
    def ancilla_parts(self) -> np.ndarray:
        return self.basis[:, self.system_dim:]

    def restricted_povm(self) -> Povm:
        s = self.system_parts
        return Povm(np.einsum("ki,kj->kij", s, s.conj()), self.labels)

    def lift_values(self, values) -> np.ndarray:
        """Map values of the unrefined POVM onto the refined outcomes."""
        values = np.asarray(values, dtype=float).reshape(-1)
        if len(values) == int(self.parents.max()) + 1:
            return values[self.parents]
        if len(values) == self.ext_dim:
            return values
        raise DimensionError(f"{len(values)} values do not match this extension")

    def orthonormality_residual(self) -> float:
        return max_abs(self.basis.conj() @ self.basis.T - np.eye(self.ext_dim))

    def restriction_residual(self, povm: Povm) -> float:
        """Largest deviation between the restricted rank-1 pieces, coarse-grained, and ``povm``."""
        pieces = self.restricted_povm().elements
        summed = np.zeros_like(povm.elements)
        np.add.at(summed, self.parents, pieces)
        return max_abs(summed - povm.elements)


def _complete_columns(v: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the complement of ``v``'s column space.

    Canonical basis vectors are orthogonalized (twice) against everything
    accepted so far; at each step the candidate with the largest residual is
    taken, lowest index first on ties.
    """
    n, d = v.shape
    accepted = [v[:, j] for j in range(d)]
    out = []
    available = list(range(n))
    while len(out) < n - d:
        best, best_norm, best_vec = None, -1.0, None
        for j in available:
            e = np.zeros(n, dtype=complex)
            e[j] = 1.0
            for _ in range(2):
                for q in accepted:
                    e = e - q * np.vdot(q, e)
            nrm = np.linalg.norm(e)
            if nrm > best_norm + 1e-12:
                best, best_norm, best_vec = j, nrm, e
        if best_norm < 1e-8:
            raise NumericError("cannot complete the isometry; is the POVM complete?")
        q = best_vec / best_norm
        accepted.append(q)
        out.append(q)
        available.remove(best)
    return np.array(out).T.reshape(n, n - d)


def extend(vp: ValuedPovm | Povm, tol: float = ORTHONORMAL_TOL) -> NaimarkExtension:
    """Minimal Naimark extension; elements of rank > 1 are split first."""
    povm = vp.povm if isinstance(vp, ValuedPovm) else vp
    vectors, labels, parents = rank1_decomposition(povm)
    n, d = vectors.shape
    if n < d:
        raise DomainError(f"{n} rank-1 outcomes cannot be complete in dimension {d}")
    isometry = vectors.conj()
    unitary = np.hstack([isometry, _complete_columns(isometry)])
    ext = NaimarkExtension(d, unitary.conj(), labels, parents)
    if ext.orthonormality_residual() > tol:
        raise NumericError(f"extension not orthonormal (residual {ext.orthonormality_residual():.3g})")
    return ext


def apply_ancilla_unitary(ext: NaimarkExtension, u) -> NaimarkExtension:
    u = np.asarray(u, dtype=complex)
    if u.shape != (ext.ancilla_dim, ext.ancilla_dim):
        raise DimensionError(f"ancilla unitary must be {ext.ancilla_dim}x{ext.ancilla_dim}, got {u.shape}")
    basis = np.hstack([ext.system_parts, ext.ancilla_parts @ u.T])
    return NaimarkExtension(ext.system_dim, basis, ext.labels, ext.parents)


def _values_for(ext: NaimarkExtension, values) -> np.ndarray:
    values = np.asarray(values, dtype=float).reshape(-1)
    if len(values) != ext.ext_dim:
        raise DimensionError(f"{len(values)} values for {ext.ext_dim} extended outcomes")
    return values


def extended_operator(ext: NaimarkExtension, values) -> np.ndarray:
    """M_E = sum mu_k |m~_k><m~_k|."""
    mu = _values_for(ext, values)
    b = ext.basis
    return hermitian_part((b.T * mu) @ b.conj())


def robertson_pair(ext: NaimarkExtension, values, tol: float = ORTHONORMAL_TOL):
    """(M~, M-bar): the second extension multiplies every ancilla part by i."""
    twisted = apply_ancilla_unitary(ext, 1j * np.eye(ext.ancilla_dim))
    if twisted.orthonormality_residual() > tol:
        raise NumericError("twisted extension is not orthonormal")
    return extended_operator(ext, values), extended_operator(twisted, values)


@dataclass(frozen=True)
class RobertsonCheck:
    """Comparison of <psi|[M~, M-bar]/2|psi> with i <psi|DM^2|psi>."""

    max_modulus_residual: float
    max_signed_residual: float
    sign: int

    def to_dict(self) -> dict:
        return {
            "max_modulus_residual": self.max_modulus_residual,
            "max_signed_residual": self.max_signed_residual,
            "sign": self.sign,
        }


def robertson_check(ext: NaimarkExtension, values, states) -> RobertsonCheck:
    """Check |<[M~,M-bar]/2>| = <DM^2> over system states and detect the phase (+i or -i)."""
    from .uncertainty import uncertainty_matrix

    mu = _values_for(ext, values)
    m_tilde, m_bar = robertson_pair(ext, mu)
    half_comm = 0.5 * (m_tilde @ m_bar - m_bar @ m_tilde)
    d = ext.system_dim
    dm2 = uncertainty_matrix(ValuedPovm(ext.restricted_povm(), mu))
    block = half_comm[:d, :d]
    lhs, rhs = [], []
    for s in states:
        st = as_state(s)
        lhs.append(np.trace(st.density @ block))
        rhs.append(st.expectation(dm2))
    lhs, rhs = np.array(lhs), np.array(rhs)
    mod = float(np.max(np.abs(np.abs(lhs) - rhs), initial=0.0))
    plus = float(np.max(np.abs(lhs - 1j * rhs), initial=0.0))
    minus = float(np.max(np.abs(lhs + 1j * rhs), initial=0.0))
    sign = 1 if plus <= minus else -1
    return RobertsonCheck(mod, min(plus, minus), sign)


def born_std(ext: NaimarkExtension, values, state) -> float:
    """Standard deviation of outcome values measured in the extended basis on a system state."""
    mu = _values_for(ext, values)
    st = as_state(state)
    sys = ext.system_parts
    p = np.real(np.einsum("ki,ij,kj->k", sys.conj(), st.density, sys))
    mean = p @ mu
    return float(np.sqrt(max(p @ mu**2 - mean**2, 0.0)))


@dataclass(frozen=True)
class Alignment:
    ancilla_unitary: np.ndarray
    phases: np.ndarray
    system_residual: float
    residual: float


def align(reference: NaimarkExtension, ext: NaimarkExtension) -> Alignment:
    """Find per-vector phases and an ancilla unitary U with U|a_k> matching the reference.

    Phases align the system parts (rank-1 projectors do not see them); U is
    the unitary Procrustes solution on the ancilla parts.
    """
    if reference.basis.shape != ext.basis.shape or reference.system_dim != ext.system_dim:
        raise DimensionError("extensions have different shapes")
    overlaps = np.einsum("ki,ki->k", ext.system_parts.conj(), reference.system_parts)
    phases = np.where(np.abs(overlaps) > 0, overlaps / np.maximum(np.abs(overlaps), 1e-300), 1.0)
    rotated = ext.basis * phases[:, None]
    sys_res = max_abs(rotated[:, : ext.system_dim] - reference.system_parts)
    a_ext = rotated[:, ext.system_dim:].T
    a_ref = reference.ancilla_parts.T
    if ext.ancilla_dim == 0:
        return Alignment(np.zeros((0, 0), dtype=complex), phases, sys_res, sys_res)
    x, _, yh = np.linalg.svd(a_ref @ a_ext.conj().T)
    u = x @ yh
    res = max(sys_res, max_abs(u @ a_ext - a_ref))
    if not is_unitary(u):
        raise NumericError("alignment produced a non-unitary matrix")
    return Alignment(u, phases, sys_res, res)
