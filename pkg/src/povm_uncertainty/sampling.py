"""Random test ensembles: POVMs, states, Hermitian matrices, unitaries."""

from __future__ import annotations

import numpy as np

from .linalg import hermitian_part
from .povm import Povm, ValuedPovm, QuantumState


def _ginibre(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int, rank: int | None = None) -> Povm:
    """m_k = S^{-1/2} G_k G_k^dag S^{-1/2} with S = sum_k G_k G_k^dag.

    ``rank`` defaults to a random value in 1..dim per element.
    """
    raw = []
    for _ in range(n_outcomes):
        r = rank if rank is not None else int(rng.integers(1, dim + 1))
        g = _ginibre(rng, dim, r)
        raw.append(g @ g.conj().T)
    raw = np.array(raw)
    s = raw.sum(axis=0)
    w, v = np.linalg.eigh(hermitian_part(s))
    s_inv_half = (v / np.sqrt(w)) @ v.conj().T
    return Povm(hermitian_part(s_inv_half @ raw @ s_inv_half))


def random_valued_povm(rng, dim: int, n_outcomes: int, rank: int | None = None) -> ValuedPovm:
    return ValuedPovm(random_povm(rng, dim, n_outcomes, rank), rng.standard_normal(n_outcomes))


def random_pvm(rng, dim: int) -> Povm:
    u = random_unitary(rng, dim)
    return Povm(np.einsum("ik,jk->kij", u, u.conj()))


def random_classical_povm(rng, dim: int, n_outcomes: int) -> Povm:
    c = rng.dirichlet(np.ones(n_outcomes))
    return Povm(c[:, None, None] * np.eye(dim)[None])


def random_state_vector(rng, dim: int) -> np.ndarray:
    v = _ginibre(rng, dim)
    return v / np.linalg.norm(v)


def random_state(rng, dim: int) -> QuantumState:
    return QuantumState.pure(random_state_vector(rng, dim))


def random_density(rng, dim: int) -> QuantumState:
    g = _ginibre(rng, dim, dim)
    rho = g @ g.conj().T
    return QuantumState.mixed(rho / np.trace(rho).real)


def random_hermitian(rng, dim: int) -> np.ndarray:
    return hermitian_part(_ginibre(rng, dim, dim))


def random_unitary(rng, dim: int) -> np.ndarray:
    """Haar unitary via QR with the R-diagonal phase correction."""
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _uniform_ball(rng, radius: float, size: int) -> np.ndarray:
    v = rng.standard_normal((size, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (radius * rng.random((size, 1)) ** (1 / 3))


def random_unbiased_quadruple(rng, radius: float = 0.25, min_scale: float = 0.05) -> np.ndarray:
    """Four Bloch vectors with |v| <= radius and zero sum, ordered (++, +-, -+, --).

    Vectors are drawn uniformly in the ball, the quadruple is projected onto
    the zero-sum plane and shrunk uniformly if any vector left the ball.
    Draws whose shrink factor falls below ``min_scale`` are redrawn.
    """
    while True:
        v = _uniform_ball(rng, radius, 4)
        v -= v.mean(axis=0)
        longest = np.linalg.norm(v, axis=1).max()
        scale = min(1.0, radius / longest) if longest > 0 else 1.0
        if scale >= min_scale:
            return v * scale


def random_unbiased_quadruples(rng, n: int, radius: float = 0.25, min_scale: float = 0.05) -> np.ndarray:
    """``n`` draws of :func:`random_unbiased_quadruple` at once, shape (n, 4, 3)."""
    out = np.empty((0, 4, 3))
    while len(out) < n:
        v = _uniform_ball(rng, radius, 4 * (n - len(out))).reshape(-1, 4, 3)
        v -= v.mean(axis=1, keepdims=True)
        longest = np.linalg.norm(v, axis=2).max(axis=1)
        scale = np.minimum(1.0, radius / np.maximum(longest, 1e-300))
        keep = scale >= min_scale
        out = np.concatenate([out, v[keep] * scale[keep, None, None]])
    return out
