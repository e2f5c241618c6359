"""Small dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

VALIDATION_TOL = 1e-9
ORTHONORMAL_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in ascending order and the matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix is not square: shape {m.shape}")
    return m


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = VALIDATION_TOL) -> bool:
    m = _square(a)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def hermitian_part(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    return 0.5 * (m + dagger(m))


def eigen(a, tol: float = VALIDATION_TOL) -> EigenSystem:
    m = _square(a)
    if not is_hermitian(m, tol):
        raise DomainError("eigendecomposition requires a Hermitian matrix")
    values, vectors = np.linalg.eigh(hermitian_part(m))
    return EigenSystem(values, vectors)


def is_psd(a, tol: float = VALIDATION_TOL) -> bool:
    m = _square(a)
    if not is_hermitian(m, tol):
        raise DomainError("positivity is only defined for Hermitian matrices")
    return bool(np.linalg.eigvalsh(hermitian_part(m))[0] >= -tol)


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def embed_top_left(a, n: int) -> np.ndarray:
    m = _square(a)
    d = m.shape[0]
    if n < d:
        raise DimensionError(f"cannot embed a {d}x{d} block into {n}x{n}")
    out = np.zeros((n, n), dtype=complex)
    out[:d, :d] = m
    return out


def system_projector(d: int, n: int) -> np.ndarray:
    return embed_top_left(np.eye(d), n)


def op_norm(a) -> float:
    """Spectral norm; zero for empty input."""
    m = np.asarray(a, dtype=complex)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def max_abs(a) -> float:
    m = np.asarray(a)
    return float(np.max(np.abs(m), initial=0.0))


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its first (near-)largest-modulus entry is real positive.

    Entries within ``tol`` of the maximum modulus count as ties and the
    lowest index wins, which keeps the choice stable under roundoff.
    """
    v = np.asarray(v, dtype=complex)
    mod = np.abs(v)
    if mod.size == 0 or mod.max() == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mod >= mod.max() - tol)[0])
    return v * (np.conj(v[k]) / mod[k])


def hermitian_from_params(params: np.ndarray, n: int) -> np.ndarray:
    """Map ``n*n`` reals to a Hermitian matrix (diagonal, then upper re, then upper im)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (n * n,):
        raise DimensionError(f"expected {n * n} parameters, got {params.shape}")
    g = np.diag(params[:n]).astype(complex)
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    upper = params[n:n + m] + 1j * params[n + m:]
    g[iu] = upper
    g[(iu[1], iu[0])] = np.conj(upper)
    return g


def expi_hermitian(g: np.ndarray) -> np.ndarray:
    """exp(iG) for Hermitian G through its eigendecomposition."""
    w, v = np.linalg.eigh(hermitian_part(g))
    return (v * np.exp(1j * w)) @ v.conj().T


def is_unitary(u, tol: float = ORTHONORMAL_TOL) -> bool:
    m = _square(u)
    return max_abs(m @ m.conj().T - np.eye(m.shape[0])) <= tol


def bloch_operator(r) -> np.ndarray:
    """r . sigma for a real 3-vector r = (x, y, z)."""
    r = np.asarray(r, dtype=float)
    return r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z
