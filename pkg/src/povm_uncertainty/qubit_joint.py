"""Unbiased four-outcome qubit POVMs that jointly estimate sigma_z and sigma_x.

Outcomes are ordered (z, x) = (++, +-, -+, --) and the elements are
m_zx = I/4 + v_zx . sigma. Outcome (z, x) carries the values Z = z, X = x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import JOINT_LABELS
from .errors import DomainError
from .linalg import PAULIS, bloch_operator, max_abs
from .optimize import OptimizerConfig, minimize_over_pure_states
from .povm import Povm, ValuedPovm, basis_pvm, mix, require_valid, validate
from .uncertainty import mean_and_uncertainty, variance

RADIUS = 0.25
_PAULI_STACK = np.array(PAULIS)
Z_VALUES = np.array([1.0, 1.0, -1.0, -1.0])
X_VALUES = np.array([1.0, -1.0, 1.0, -1.0])
SIGNS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


class JointValidationError(DomainError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class JointQubitPovm:
    bloch_vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.bloch_vectors, dtype=float)
        if v.shape != (4, 3):
            raise DomainError(f"expected four 3-vectors, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "bloch_vectors", v)
        els = np.eye(2, dtype=complex)[None] / 4 + np.einsum("ka,aij->kij", v, _PAULI_STACK)
        object.__setattr__(self, "_povm", Povm(els, JOINT_LABELS))

    @property
    def elements(self) -> np.ndarray:
        return self._povm.elements

    @property
    def povm(self) -> Povm:
        return self._povm

    def z_estimator(self) -> ValuedPovm:
        return ValuedPovm(self.povm, Z_VALUES)

    def x_estimator(self) -> ValuedPovm:
        return ValuedPovm(self.povm, X_VALUES)

    def vector(self, label: str) -> np.ndarray:
        return self.bloch_vectors[JOINT_LABELS.index(label)]


def violations(vectors, tol: float = 1e-12) -> list[str]:
    v = np.asarray(vectors, dtype=float)
    out = []
    for label, vec in zip(JOINT_LABELS, v):
        n = float(np.linalg.norm(vec))
        if n > RADIUS + tol:
            out.append(f"|v_{label}| = {n:.6g} exceeds 1/4 (element not positive)")
    s = v.sum(axis=0)
    if max_abs(s) > tol:
        out.append(f"sum of Bloch vectors = {s.tolist()} is not zero (not unbiased)")
    return out


def build_unbiased(vectors, tol: float = 1e-12) -> JointQubitPovm:
    v = np.asarray(vectors, dtype=float)
    if v.shape != (4, 3):
        raise JointValidationError([f"expected four 3-vectors, got shape {v.shape}"])
    bad = violations(v, tol)
    if bad:
        raise JointValidationError(bad)
    return JointQubitPovm(v)


def build_mzx(theta: float) -> JointQubitPovm:
    """v_zx = (x sin(theta), 0, z cos(theta)) / 4."""
    s, c = math.sin(theta), math.cos(theta)
    return build_unbiased([[x * s / 4, 0.0, z * c / 4] for z, x in SIGNS])


def from_bloch_document(doc: dict) -> JointQubitPovm:
    """Parse ``{"bloch": {"++": [x, y, z], ...}}``."""
    bloch = doc.get("bloch") if isinstance(doc, dict) else None
    if not isinstance(bloch, dict) or set(bloch) != set(JOINT_LABELS):
        raise DomainError("compact form needs 'bloch' with keys ++, +-, -+, --")
    return build_unbiased([bloch[k] for k in JOINT_LABELS])


def to_bloch_document(p: JointQubitPovm) -> dict:
    return {"bloch": {k: [float(x) for x in v] for k, v in zip(JOINT_LABELS, p.bloch_vectors)}}


def from_povm(povm: Povm, tol: float = 1e-9) -> JointQubitPovm:
    """Recover Bloch vectors from a 4-outcome qubit POVM; it must be unbiased."""
    if povm.dim != 2 or len(povm) != 4:
        raise DomainError("joint analysis needs a 4-outcome qubit POVM")
    els = povm.elements
    traces = np.real(np.trace(els, axis1=1, axis2=2))
    if max_abs(traces - 0.5) > tol:
        raise JointValidationError(["outcomes are not equally probable on the maximally mixed state"])
    vecs = np.real(np.array([[np.trace(m @ s) / 2 for s in PAULIS]
                             for m in els]))
    return build_unbiased(vecs, tol)


@dataclass(frozen=True)
class FaithfulnessReport:
    faithful: bool
    outcomes: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"faithful": self.faithful, "outcomes": self.outcomes}


def faithful_check(p: JointQubitPovm) -> FaithfulnessReport:
    """Outcome (z, x) needs z * v_z > 0 and x * v_x > 0; zero components are flagged 'boundary'."""
    out = {}
    for (z, x), label, v in zip(SIGNS, JOINT_LABELS, p.bloch_vectors):
        zc, xc = z * v[2], x * v[0]
        if zc > 0 and xc > 0:
            status = "ok"
        elif zc < 0 or xc < 0:
            status = "wrong sign"
        else:
            status = "boundary"
        out[label] = {"z_component": float(v[2]), "x_component": float(v[0]), "status": status}
    return FaithfulnessReport(all(o["status"] == "ok" for o in out.values()), out)


@dataclass(frozen=True)
class JointAnalysis:
    Z_operator: np.ndarray
    X_operator: np.ndarray
    deltaZ2: np.ndarray
    deltaX2: np.ndarray
    sum_min_eigenvalue: float
    ddd_rhs: float
    identity_residual: float

    @property
    def inequality_holds(self) -> bool:
        return self.sum_min_eigenvalue >= 1 - 1e-9

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "Z_operator": matrix_to_json(self.Z_operator),
            "X_operator": matrix_to_json(self.X_operator),
            "deltaZ2": matrix_to_json(self.deltaZ2),
            "deltaX2": matrix_to_json(self.deltaX2),
            "sum_min_eigenvalue": self.sum_min_eigenvalue,
            "ddd_rhs": self.ddd_rhs,
            "identity_residual": self.identity_residual,
            "inequality_holds": self.inequality_holds,
        }


def ddd_rhs(p: JointQubitPovm) -> float:
    """2 - 2|v++ - v--|^2 - 2|v+- - v-+|^2."""
    v = p.bloch_vectors
    return float(2 - 2 * np.sum((v[0] - v[3]) ** 2) - 2 * np.sum((v[1] - v[2]) ** 2))


def analyze(p: JointQubitPovm) -> JointAnalysis:
    z_op, dz2 = mean_and_uncertainty(p.z_estimator())
    x_op, dx2 = mean_and_uncertainty(p.x_estimator())
    total = dz2 + dx2
    rhs = ddd_rhs(p)
    return JointAnalysis(
        z_op, x_op, dz2, dx2,
        float(np.linalg.eigvalsh(total)[0]), rhs, max_abs(total - rhs * np.eye(2)),
    )


@dataclass(frozen=True)
class BatchDDD:
    """Per-quadruple results of the variance-sum identity for a batch."""

    ddd_rhs: np.ndarray
    identity_residual: np.ndarray
    sum_min_eigenvalue: np.ndarray


def batch_ddd(vectors, tol: float = 1e-12) -> BatchDDD:
    """Vectorized :func:`analyze` for an (N, 4, 3) array of Bloch quadruples.

    Builds m_zx = I/4 + v_zx . sigma and forms sum_k mu_k^2 m_k - M^2 for Z and
    X directly, without constructing per-quadruple objects.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim != 3 or v.shape[1:] != (4, 3):
        raise DomainError(f"expected shape (N, 4, 3), got {v.shape}")
    norms = np.linalg.norm(v, axis=2)
    if np.any(norms > RADIUS + tol) or np.any(np.abs(v.sum(axis=1)) > tol):
        raise JointValidationError(["batch contains quadruples that are not valid unbiased joint POVMs"])
    els = np.eye(2, dtype=complex) / 4 + np.einsum("nka,aij->nkij", v, _PAULI_STACK)
    total = np.zeros((len(v), 2, 2), dtype=complex)
    for mu in (Z_VALUES, X_VALUES):
        m = np.einsum("k,nkij->nij", mu, els)
        second = np.einsum("k,nkij->nij", mu**2, els)
        total += second - m @ m
    total = 0.5 * (total + np.conj(np.swapaxes(total, 1, 2)))
    rhs = 2 - 2 * np.sum((v[:, 0] - v[:, 3]) ** 2, axis=1) - 2 * np.sum((v[:, 1] - v[:, 2]) ** 2, axis=1)
    resid = np.abs(total - rhs[:, None, None] * np.eye(2)).max(axis=(1, 2))
    return BatchDDD(rhs, resid, np.linalg.eigvalsh(total)[:, 0])


def variance_sum(p: JointQubitPovm, state) -> float:
    """Var(Z) + Var(X) of the outcome values in ``state``."""
    return variance(p.z_estimator(), state).total + variance(p.x_estimator(), state).total


def two_pvm_realization(p: JointQubitPovm) -> ValuedPovm:
    """Equal mixture of projective measurements along v++ and v+-, ordered (++, +-, -+, --)."""
    def along(v):
        n = v / np.linalg.norm(v)
        w, u = np.linalg.eigh(bloch_operator(n))
        return ValuedPovm(basis_pvm(u[:, ::-1], ("+", "-")), [1.0, -1.0])

    m = mix(0.5, along(p.vector("++")), along(p.vector("+-")))
    # mix order: ++ (along v++ +), -- (along v++ -), +- (along v+- +), -+ (along v+- -)
    order = [0, 2, 3, 1]
    return ValuedPovm(Povm(m.elements[order], JOINT_LABELS), Z_VALUES)


@dataclass(frozen=True)
class OptimalityReport:
    antipodal_pp_mm: bool
    antipodal_pm_mp: bool
    maximal_length: bool
    sum_is_identity: bool
    sum_residual: float
    realization_residual: float | None = None
    realization_valid: bool | None = None

    @property
    def conditions_hold(self) -> bool:
        return self.antipodal_pp_mm and self.antipodal_pm_mp and self.maximal_length

    def to_dict(self) -> dict:
        return {
            "antipodal_pp_mm": self.antipodal_pp_mm,
            "antipodal_pm_mp": self.antipodal_pm_mp,
            "maximal_length": self.maximal_length,
            "conditions_hold": self.conditions_hold,
            "sum_is_identity": self.sum_is_identity,
            "sum_residual": self.sum_residual,
            "realization_residual": self.realization_residual,
            "realization_valid": self.realization_valid,
        }


def optimality_check(p: JointQubitPovm, tol: float = 1e-9) -> OptimalityReport:
    v = p.bloch_vectors
    c1 = max_abs(v[0] + v[3]) <= tol
    c2 = max_abs(v[1] + v[2]) <= tol
    c3 = bool(np.all(np.abs(np.linalg.norm(v, axis=1) - RADIUS) <= tol))
    a = analyze(p)
    resid = max_abs(a.deltaZ2 + a.deltaX2 - np.eye(2))
    rep = OptimalityReport(c1, c2, c3, resid <= tol, resid)
    if rep.conditions_hold:
        real = two_pvm_realization(p)
        r_res = max_abs(real.elements - p.elements)
        ok = validate(real.povm, 1e-10).ok and max_abs(np.real(np.trace(real.elements, axis1=1, axis2=2)) - 0.5) <= 1e-10
        rep = OptimalityReport(c1, c2, c3, resid <= tol, resid, r_res, bool(ok))
    return rep


@dataclass
class VarianceMinimum:
    value: float
    theta: float
    state: np.ndarray
    per_theta: list[tuple[float, float]]


def minimize_variance_sum(thetas=None, config: OptimizerConfig | None = None) -> VarianceMinimum:
    """Drive Var(Z) + Var(X) down over the mzx family and pure states.

    Each angle in ``thetas`` (default 17 points on [0, pi/2]) gets a state
    optimization; the best (value, angle, state) is returned, earliest angle
    winning ties.
    """
    config = config or OptimizerConfig()
    if thetas is None:
        thetas = np.linspace(0.0, math.pi / 2, 17)
    best = None
    per_theta = []
    for theta in thetas:
        p = build_mzx(float(theta))
        zv, xv = p.z_estimator(), p.x_estimator()
        res = minimize_over_pure_states(lambda psi: pure_variance_sum(zv, xv, psi), 2, config)
        per_theta.append((float(theta), res.best_value))
        if best is None or res.best_value < best.value:
            best = VarianceMinimum(res.best_value, float(theta), res.best_point, per_theta)
    return best


def pure_variance_sum(zv: ValuedPovm, xv: ValuedPovm, psi: np.ndarray) -> float:
    p = np.real(np.einsum("i,kij,j->k", psi.conj(), zv.elements, psi))
    return float(p @ zv.values**2 - (p @ zv.values) ** 2 + p @ xv.values**2 - (p @ xv.values) ** 2)


def require_joint(povm: Povm) -> JointQubitPovm:
    require_valid(povm)
    return from_povm(povm)
