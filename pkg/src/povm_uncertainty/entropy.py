"""Shannon entropy of POVM outcomes and state-independent lower bounds on it.

Overlap-based bounds take ``convention``: the overlap modulus is raised to
that power before the logarithm. Convention 2 is what the Maassen-Uffink
relation gives when applied to Naimark extensions; convention 1 is the
unsquared variant. Reports carry the value under the other convention too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionError, DomainError
from .linalg import VALIDATION_TOL, max_abs
from .naimark import NaimarkExtension, apply_ancilla_unitary, extend
from .optimize import OptimizerConfig, maximize_over_ancilla_unitaries, minimize_over_pure_states
from .povm import Povm, outcome_distribution, rank1_vectors

PROB_FLOOR = 1e-15
CONVENTIONS = (1, 2)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > PROB_FLOOR]
    return float(-(p * np.log2(p)).sum())


def outcome_entropy(povm: Povm, state) -> float:
    return shannon_bits(outcome_distribution(povm, state).probabilities)


@dataclass
class BoundReport:
    bound_name: str
    value_bits: float
    convention: int | None = None
    certificate: dict = field(default_factory=dict)
    other_convention_bits: float | None = None

    def to_dict(self) -> dict:
        from .io import to_jsonable

        out = {"bound_name": self.bound_name, "value_bits": self.value_bits,
               "convention": self.convention, "certificate": to_jsonable(self.certificate)}
        if self.other_convention_bits is not None:
            out["other_convention"] = 3 - self.convention
            out["other_convention_bits"] = self.other_convention_bits
        return out


def _check_convention(convention: int) -> int:
    if convention not in CONVENTIONS:
        raise DomainError(f"overlap convention must be 1 or 2, got {convention}")
    return int(convention)


def _neg_log2(x: float) -> float:
    # -log2 of a max-overlap, clipped so roundoff above 1 reads as 0 bits
    return float(max(0.0, -np.log2(x)))


def bound_max_eigenvalue(povm: Povm) -> BoundReport:
    lam = np.array([np.linalg.eigvalsh(m)[-1] for m in povm.elements])
    k = int(np.argmax(lam))
    return BoundReport("max_eigenvalue", _neg_log2(lam[k]), None,
                       {"element": k, "label": povm.labels[k], "max_eigenvalue": float(lam[k])})


def _max_overlap(x: np.ndarray, y: np.ndarray) -> tuple[float, tuple[int, int]]:
    g = np.abs(x.conj() @ y.T)
    k, l = np.unravel_index(int(np.argmax(g)), g.shape)
    return float(g[k, l]), (int(k), int(l))


def _rank1(povm: Povm, which: str) -> np.ndarray:
    try:
        return rank1_vectors(povm)
    except DomainError as exc:
        raise DomainError(f"{which} POVM must be rank 1; refine it first") from exc


def bound_pair_rank1(a: Povm, b: Povm, convention: int = 2) -> BoundReport:
    """-log2 max_kl |<m_k|n_l>|^c for two rank-1 POVMs, vectors left subnormalized."""
    c = _check_convention(convention)
    if a.dim != b.dim:
        raise DimensionError("POVMs act on different spaces")
    g, (k, l) = _max_overlap(_rank1(a, "first"), _rank1(b, "second"))
    return BoundReport("pair_rank1", _neg_log2(g**c), c,
                       {"pair": [k, l], "labels": [a.labels[k], b.labels[l]], "max_overlap": g},
                       _neg_log2(g ** (3 - c)))


def _ext_overlaps(ext_a: NaimarkExtension, ext_b: NaimarkExtension, u: np.ndarray) -> np.ndarray:
    """|<m~_k| U' |n~_l>| with U' on the ancilla block."""
    b = ext_b.basis if u.size == 0 else apply_ancilla_unitary(ext_b, u).basis
    return np.abs(ext_a.basis.conj() @ b.T)


def _naimark_objectives(ext_a, ext_b, c: int, factor: float):
    def exact(u):
        return factor * _neg_log2(_ext_overlaps(ext_a, ext_b, u).max() ** c)

    def smoothed(u, beta):
        t = _ext_overlaps(ext_a, ext_b, u).ravel() ** c
        return -factor * (logsumexp(beta * t) / beta) / np.log(2)

    return exact, smoothed


def naimark_value(ext_a: NaimarkExtension, ext_b: NaimarkExtension, u, convention: int = 2,
                  factor: float = 1.0) -> float:
    """factor * -log2 max_kl |<m~_k|U'|n~_l>|^c at a fixed ancilla unitary."""
    c = _check_convention(convention)
    return factor * _neg_log2(_ext_overlaps(ext_a, ext_b, np.asarray(u, dtype=complex)).max() ** c)


def _naimark_bound(name, ext_a, ext_b, c, factor, config: OptimizerConfig | None) -> BoundReport:
    config = config or OptimizerConfig()
    exact, smoothed = _naimark_objectives(ext_a, ext_b, c, factor)
    res = maximize_over_ancilla_unitaries(exact, ext_b.ancilla_dim, config, smoothed)
    u = res.best_point
    identity_value = exact(np.eye(ext_b.ancilla_dim, dtype=complex))
    value = res.best_value
    if identity_value > value:
        value, u = identity_value, np.eye(ext_b.ancilla_dim, dtype=complex)
    g = _ext_overlaps(ext_a, ext_b, u)
    k, l = np.unravel_index(int(np.argmax(g)), g.shape)
    cert = {"ancilla_unitary": u, "pair": [int(k), int(l)], "max_overlap": float(g[k, l]),
            "identity_value_bits": identity_value, "optimizer": config.to_dict(),
            "starts_converged": res.starts_converged}
    return BoundReport(name, value, c, cert, factor * _neg_log2(float(g[k, l]) ** (3 - c)))


def bound_pair_naimark(a: Povm, b: Povm, convention: int = 2, config: OptimizerConfig | None = None) -> BoundReport:
    """max over U' of -log2 max_kl |<m~_k|U'|n~_l>|^c, U' acting on b's ancilla."""
    c = _check_convention(convention)
    _rank1(a, "first")
    _rank1(b, "second")
    if a.dim != b.dim:
        raise DimensionError("POVMs act on different spaces")
    if len(a) != len(b):
        raise DomainError(f"outcome counts differ ({len(a)} vs {len(b)}); extensions must share a dimension")
    return _naimark_bound("pair_naimark", extend(a), extend(b), c, 1.0, config)


def bound_single_naimark(povm: Povm, convention: int = 2, config: OptimizerConfig | None = None,
                         extension: NaimarkExtension | None = None) -> BoundReport:
    """max over U' of -(1/2) log2 max_kl |<m~_k|U'|m~_l>|^c, diagonal pairs included."""
    c = _check_convention(convention)
    _rank1(povm, "the")
    ext = extension if extension is not None else extend(povm)
    return _naimark_bound("single_naimark", ext, ext, c, 0.5, config)


def single_naimark_at(povm: Povm, u, convention: int = 2, extension: NaimarkExtension | None = None) -> BoundReport:
    """The single-POVM bound evaluated at one given ancilla unitary (no optimization)."""
    c = _check_convention(convention)
    ext = extension if extension is not None else extend(povm)
    u = np.asarray(u, dtype=complex).reshape(ext.ancilla_dim, ext.ancilla_dim)
    g = _ext_overlaps(ext, ext, u)
    k, l = np.unravel_index(int(np.argmax(g)), g.shape)
    return BoundReport("single_naimark_fixed", 0.5 * _neg_log2(float(g[k, l]) ** c), c,
                       {"ancilla_unitary": u, "pair": [int(k), int(l)], "max_overlap": float(g[k, l])},
                       0.5 * _neg_log2(float(g[k, l]) ** (3 - c)))


def _nondegenerate_pvm_vectors(p: Povm, which: str, tol: float = VALIDATION_TOL) -> np.ndarray:
    if len(p) != p.dim:
        raise DomainError(f"{which} measurement is not a non-degenerate PVM ({len(p)} outcomes in dim {p.dim})")
    v = _rank1(p, which)
    if max_abs(v.conj() @ v.T - np.eye(p.dim)) > tol:
        raise DomainError(f"{which} measurement is not a non-degenerate PVM")
    return v


def bound_pvm_mixture(a: Povm, b: Povm) -> BoundReport:
    """1 - (1/2) log2 max_kl |<a_k|b_l>|^2 for the equal mixture of two PVMs."""
    if a.dim != b.dim:
        raise DimensionError("PVMs act on different spaces")
    g, (k, l) = _max_overlap(_nondegenerate_pvm_vectors(a, "first"), _nondegenerate_pvm_vectors(b, "second"))
    return BoundReport("pvm_mixture", 1.0 + 0.5 * _neg_log2(g**2), 2,
                       {"pair": [k, l], "labels": [a.labels[k], b.labels[l]], "max_overlap": g})


def min_entropy_over_states(povm: Povm, config: OptimizerConfig | None = None) -> tuple[np.ndarray, float]:
    """Smallest outcome entropy found over pure states, and the state reaching it."""
    config = config or OptimizerConfig()

    els = povm.elements

    def objective(psi):
        p = np.real(np.einsum("i,kij,j->k", psi.conj(), els, psi))
        return shannon_bits(np.clip(p, 0.0, 1.0))

    res = minimize_over_pure_states(objective, povm.dim, config)
    return res.best_point, res.best_value
