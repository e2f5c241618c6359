"""POVMs, valued POVMs, quantum states and outcome statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import (
    ORTHONORMAL_TOL,
    VALIDATION_TOL,
    bloch_operator,
    fix_phase,
    hermitian_part,
    max_abs,
)

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Povm:
    """A finite list of operators on a ``dim``-dimensional space.

    Construction only checks shapes and labels. Positivity and completeness
    are checked by :func:`validate`, so invalid documents can still be
    loaded and reported on.
    """

    elements: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        els = np.array(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1] != els.shape[2] or els.shape[0] == 0:
            raise DimensionError(f"elements must have shape (n, d, d), got {els.shape}")
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)
        labels = tuple(str(s) for s in self.labels) or tuple(str(k) for k in range(len(els)))
        if len(labels) != len(els):
            raise DimensionError(f"{len(labels)} labels for {len(els)} elements")
        if len(set(labels)) != len(labels):
            raise DomainError("POVM labels must be distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True)
class ValuedPovm:
    """A POVM together with one real outcome value per element."""

    povm: Povm
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if len(vals) != len(self.povm):
            raise DimensionError(f"{len(vals)} values for {len(self.povm)} elements")
        if not np.all(np.isfinite(vals)):
            raise DomainError("outcome values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.povm.dim

    @property
    def elements(self) -> np.ndarray:
        return self.povm.elements

    @property
    def labels(self) -> tuple[str, ...]:
        return self.povm.labels

    def __len__(self) -> int:
        return len(self.povm)


@dataclass(frozen=True)
class QuantumState:
    """Pure state (``vector``) or density matrix; ``density`` is always available."""

    density: np.ndarray
    vector: np.ndarray | None = None

    @classmethod
    def pure(cls, psi, tol: float = ORTHONORMAL_TOL) -> "QuantumState":
        v = np.array(psi, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise DomainError(f"state vector norm {np.linalg.norm(v):.3g} is not 1")
        return cls(np.outer(v, v.conj()), v)

    @classmethod
    def mixed(cls, rho, tol: float = VALIDATION_TOL) -> "QuantumState":
        r = np.array(rho, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise DimensionError(f"density matrix must be square, got {r.shape}")
        if max_abs(r - r.conj().T) > tol:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > tol:
            raise DomainError("density matrix trace is not 1")
        if np.linalg.eigvalsh(hermitian_part(r))[0] < -tol:
            raise DomainError("density matrix is not positive")
        return cls(hermitian_part(r))

    @classmethod
    def from_bloch(cls, r) -> "QuantumState":
        """Qubit state with Bloch vector ``r``; pure when |r| = 1."""
        r = np.asarray(r, dtype=float)
        n = np.linalg.norm(r)
        if n > 1 + VALIDATION_TOL:
            raise DomainError("Bloch vector longer than 1")
        rho = 0.5 * (np.eye(2) + bloch_operator(r))
        if abs(n - 1.0) <= 1e-12:
            w, v = np.linalg.eigh(rho)
            return cls.pure(fix_phase(v[:, -1]))
        return cls(rho)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def expectation(self, op) -> float:
        """Real part of <op> for Hermitian ``op``."""
        if self.vector is not None:
            return float(np.real(np.vdot(self.vector, op @ self.vector)))
        return float(np.real(np.trace(self.density @ op)))


def as_state(state) -> QuantumState:
    """Accept a QuantumState, a state vector or a density matrix."""
    if isinstance(state, QuantumState):
        return state
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return QuantumState.pure(arr)
    return QuantumState.mixed(arr)


@dataclass(frozen=True)
class OutcomeDistribution:
    probabilities: np.ndarray
    labels: tuple[str, ...]

    def as_dict(self) -> dict[str, float]:
        return {k: float(p) for k, p in zip(self.labels, self.probabilities)}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def validate(povm: Povm, tol: float = VALIDATION_TOL) -> ValidationReport:
    """Per-element Hermiticity/positivity and completeness checks. Never raises."""
    report = ValidationReport()
    for label, m in zip(povm.labels, povm.elements):
        herm_err = max_abs(m - m.conj().T)
        if herm_err > tol:
            report.checks.append(Check(f"psd[{label}]", False, f"not Hermitian (deviation {herm_err:.3g})"))
            continue
        lam = float(np.linalg.eigvalsh(hermitian_part(m))[0])
        report.checks.append(Check(f"psd[{label}]", lam >= -tol, f"min eigenvalue {lam:.6g}"))
    err = max_abs(povm.elements.sum(axis=0) - np.eye(povm.dim))
    report.checks.append(Check("completeness", err <= tol, f"max |sum - I| = {err:.3g}"))
    return report


def require_valid(povm: Povm, tol: float = VALIDATION_TOL) -> None:
    report = validate(povm, tol)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise DomainError(f"invalid POVM: {names}")


def probabilities(povm: Povm, state) -> np.ndarray:
    """Raw Born probabilities, without clamping."""
    st = as_state(state)
    if st.dim != povm.dim:
        raise DimensionError(f"state dim {st.dim} != POVM dim {povm.dim}")
    if st.vector is not None:
        psi = st.vector
        return np.real(np.einsum("i,kij,j->k", psi.conj(), povm.elements, psi))
    return np.real(np.einsum("kij,ji->k", povm.elements, st.density))


def outcome_distribution(povm: Povm, state, tol: float = VALIDATION_TOL) -> OutcomeDistribution:
    p = probabilities(povm, state)
    if np.any(p < -tol) or np.any(p > 1 + tol) or abs(p.sum() - 1.0) > tol:
        raise DomainError("outcome probabilities out of range; is the POVM valid?")
    return OutcomeDistribution(np.clip(p, 0.0, 1.0), povm.labels)


def is_pvm(povm: Povm, tol: float = VALIDATION_TOL) -> bool:
    els = povm.elements
    if max_abs(els @ els - els) > tol:
        return False
    n = len(els)
    for i in range(n):
        for j in range(i + 1, n):
            if max_abs(els[i] @ els[j]) > tol:
                return False
    return True


def rank1_decomposition(povm: Povm, tol: float = RANK_TOL):
    """Split every element into rank-1 pieces.

    Returns ``(vectors, labels, parents)``: row ``i`` of ``vectors`` is
    sqrt(lambda)|u> with its phase fixed, ``parents[i]`` indexes the source
    element. Single-piece elements keep their label; split elements get
    ``.0``, ``.1``... suffixes.
    """
    vectors, labels, parents = [], [], []
    for k, (label, m) in enumerate(zip(povm.labels, povm.elements)):
        w, v = np.linalg.eigh(hermitian_part(m))
        keep = [i for i in range(len(w) - 1, -1, -1) if w[i] >= tol]
        for piece, i in enumerate(keep):
            vectors.append(np.sqrt(w[i]) * fix_phase(v[:, i]))
            labels.append(label if len(keep) == 1 else f"{label}.{piece}")
            parents.append(k)
    return np.array(vectors, dtype=complex).reshape(-1, povm.dim), tuple(labels), np.array(parents, dtype=int)


def rank1_vectors(povm: Povm, tol: float = RANK_TOL) -> np.ndarray:
    """Vectors |m_k> with m_k = |m_k><m_k|; every element must be rank 1."""
    vectors, _, parents = rank1_decomposition(povm, tol)
    if len(parents) != len(povm) or np.any(parents != np.arange(len(povm))):
        raise DomainError("POVM is not rank 1; refine it first")
    return vectors


def is_rank1(povm: Povm, tol: float = RANK_TOL) -> bool:
    try:
        rank1_vectors(povm, tol)
    except DomainError:
        return False
    return True


def _outer_rows(vectors: np.ndarray) -> np.ndarray:
    return np.einsum("ki,kj->kij", vectors, vectors.conj())


def rank1_refine(vp: ValuedPovm, tol: float = RANK_TOL) -> ValuedPovm:
    vectors, labels, parents = rank1_decomposition(vp.povm, tol)
    return ValuedPovm(Povm(_outer_rows(vectors), labels), vp.values[parents])


def coarse_grain(p: np.ndarray, parents: np.ndarray, n_parents: int) -> np.ndarray:
    return np.bincount(parents, weights=p, minlength=n_parents)


def mix(p: float, a: ValuedPovm, b: ValuedPovm) -> ValuedPovm:
    """Run ``a`` with probability p and ``b`` otherwise; zero-weight branches are dropped."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixing probability {p} outside [0, 1]")
    if a.dim != b.dim:
        raise DimensionError(f"cannot mix POVMs of dims {a.dim} and {b.dim}")
    q = 1.0 - p
    els, labels, vals = [], [], []
    for w, vp, tag in ((p, a, "L"), (q, b, "R")):
        if w == 0.0:
            continue
        els.extend(w * vp.elements)
        labels.extend(f"{lab}/{tag}" for lab in vp.labels)
        vals.extend(vp.values)
    return ValuedPovm(Povm(np.array(els), labels), vals)


def tensor_povm(a: ValuedPovm, b: ValuedPovm) -> ValuedPovm:
    els = np.einsum("iab,jcd->ijacbd", a.elements, b.elements)
    n, m, d = len(a), len(b), a.dim * b.dim
    labels = [f"{la}⊗{lb}" for la in a.labels for lb in b.labels]
    vals = (a.values[:, None] + b.values[None, :]).reshape(-1)
    return ValuedPovm(Povm(els.reshape(n * m, d, d), labels), vals)


def trivial_povm(dim: int, value: float = 0.0) -> ValuedPovm:
    """The one-outcome POVM {I}."""
    return ValuedPovm(Povm(np.eye(dim)[None], ("1",)), [value])


def povm_from_vectors(vectors, labels=()) -> Povm:
    return Povm(_outer_rows(np.asarray(vectors, dtype=complex)), labels)


def basis_pvm(unitary, labels=()) -> Povm:
    """Rank-1 PVM onto the columns of ``unitary``."""
    u = np.asarray(unitary, dtype=complex)
    return povm_from_vectors(u.T, labels)
