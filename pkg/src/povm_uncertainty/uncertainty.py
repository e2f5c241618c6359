"""Mean and uncertainty operators of valued POVMs, and their properties.

For a valued POVM {m_k, mu_k} the mean operator is M = sum mu_k m_k and the
uncertainty operator is sum mu_k^2 m_k - M^2. Its expectation is the part of
the outcome variance that no projective measurement of M would produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericError
from .linalg import VALIDATION_TOL, hermitian_part, max_abs, op_norm
from .naimark import NaimarkExtension, extended_operator
from .povm import (
    Povm,
    ValuedPovm,
    as_state,
    is_pvm,
    mix,
    probabilities,
    tensor_povm,
)

FORM_AGREEMENT_TOL = 1e-10


@dataclass(frozen=True)
class UncertaintyReport:
    mean_operator: np.ndarray
    uncertainty_operator: np.ndarray
    min_eigenvalue_of_uncertainty: float
    trace_of_uncertainty: float
    form_discrepancy: float

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "mean_operator": matrix_to_json(self.mean_operator),
            "uncertainty_operator": matrix_to_json(self.uncertainty_operator),
            "min_eigenvalue_of_uncertainty": self.min_eigenvalue_of_uncertainty,
            "trace_of_uncertainty": self.trace_of_uncertainty,
            "form_discrepancy": self.form_discrepancy,
        }


@dataclass(frozen=True)
class VarianceDecomposition:
    total: float
    mean_value: float
    projective_part: float
    povm_excess: float

    def to_dict(self) -> dict:
        return dict(total=self.total, mean_value=self.mean_value,
                    projective_part=self.projective_part, povm_excess=self.povm_excess)


def mean_operator(vp: ValuedPovm) -> np.ndarray:
    return hermitian_part(np.einsum("k,kij->ij", vp.values, vp.elements))


def _second_moment(vp: ValuedPovm) -> np.ndarray:
    return hermitian_part(np.einsum("k,kij->ij", vp.values**2, vp.elements))


def mean_and_uncertainty(vp: ValuedPovm) -> tuple[np.ndarray, np.ndarray]:
    """(M, sum mu_k^2 m_k - M^2) from one pass over the elements."""
    moments = np.einsum("sk,kij->sij", np.stack([vp.values, vp.values**2]), vp.elements)
    m = hermitian_part(moments[0])
    return m, hermitian_part(moments[1] - m @ m)


def uncertainty_matrix(vp: ValuedPovm) -> np.ndarray:
    """sum mu_k^2 m_k - M^2, without the cross-check done by :func:`uncertainty_operator`."""
    return mean_and_uncertainty(vp)[1]


def uncertainty_operator(vp: ValuedPovm) -> UncertaintyReport:
    m = mean_operator(vp)
    direct = hermitian_part(_second_moment(vp) - m @ m)
    eye = np.eye(vp.dim)
    shifted = m[None] - vp.values[:, None, None] * eye[None]
    sandwich = hermitian_part(np.einsum("kab,kbc,kcd->ad", shifted, vp.elements, shifted))
    gap = max_abs(direct - sandwich)
    scale = max(1.0, float(np.max(vp.values**2)))
    if gap > FORM_AGREEMENT_TOL * scale:
        raise NumericError(f"uncertainty operator forms disagree by {gap:.3g}; the POVM is likely not complete")
    w = np.linalg.eigvalsh(direct)
    return UncertaintyReport(m, direct, float(w[0]), float(np.trace(direct).real), gap)


def variance(vp: ValuedPovm, state) -> VarianceDecomposition:
    st = as_state(state)
    p = probabilities(vp.povm, st)
    mu_bar = float(p @ vp.values)
    total = float(p @ vp.values**2) - mu_bar**2
    m = mean_operator(vp)
    projective = st.expectation(m @ m) - mu_bar**2
    excess = st.expectation(uncertainty_matrix(vp))
    if abs(total - projective - excess) > FORM_AGREEMENT_TOL * max(1.0, float(np.max(vp.values**2))):
        raise NumericError("variance decomposition does not add up; the POVM is likely invalid")
    return VarianceDecomposition(total, mu_bar, projective, excess)


def check_tensor_additivity(a: ValuedPovm, b: ValuedPovm) -> float:
    """Sup-norm residual of D(M x N)^2 - DM^2 x I - I x DN^2."""
    prod = tensor_povm(a, b)
    lhs = uncertainty_matrix(prod)
    rhs = np.kron(uncertainty_matrix(a), np.eye(b.dim)) + np.kron(np.eye(a.dim), uncertainty_matrix(b))
    return max_abs(lhs - rhs)


def check_convex_combination(p: float, a: ValuedPovm, b: ValuedPovm) -> float:
    """Sup-norm residual of D(pM+qN)^2 - p DM^2 - q DN^2 - pq (M-N)^2."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot mix POVMs of dims {a.dim} and {b.dim}")
    q = 1.0 - p
    diff = mean_operator(a) - mean_operator(b)
    lhs = uncertainty_matrix(mix(p, a, b))
    rhs = p * uncertainty_matrix(a) + q * uncertainty_matrix(b) + p * q * diff @ diff
    return max_abs(lhs - rhs)


def _embed_system_operator(a, ext: NaimarkExtension) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (ext.system_dim, ext.system_dim):
        raise DimensionError(f"operator shape {a.shape} does not match system dim {ext.system_dim}")
    out = np.zeros((ext.ext_dim, ext.ext_dim), dtype=complex)
    out[: ext.system_dim, : ext.system_dim] = a
    return out


def distance_to_povm(a, ext: NaimarkExtension, values) -> float:
    """tr[P (M_E - A)^2 P] for a Hermitian operator A on the system space."""
    diff = extended_operator(ext, values) - _embed_system_operator(a, ext)
    sq = diff @ diff
    d = ext.system_dim
    return float(np.trace(sq[:d, :d]).real)


def statistical_distance(a, ext: NaimarkExtension, values, state) -> float:
    """<psi|(M_E - A)^2|psi> with psi embedded in the extended space."""
    st = as_state(state)
    if st.dim != ext.system_dim:
        raise DimensionError(f"state dim {st.dim} != system dim {ext.system_dim}")
    diff = extended_operator(ext, values) - _embed_system_operator(a, ext)
    d = ext.system_dim
    return st.expectation((diff @ diff)[:d, :d])


@dataclass
class PropertyReport:
    """Outcome of checking properties 1-6 of the uncertainty operator."""

    entries: dict[str, dict] = field(default_factory=dict)
    tol: float = VALIDATION_TOL

    @property
    def ok(self) -> bool:
        return all(e["status"] != "fail" for e in self.entries.values())

    def to_dict(self) -> dict:
        return {"tol": self.tol, "ok": self.ok, "entries": self.entries}


def _status(passed: bool) -> str:
    return "pass" if passed else "fail"


def delta_witness(povm: Povm, tol: float = VALIDATION_TOL) -> tuple[int, np.ndarray] | None:
    """First element that is not a projector, and the uncertainty operator for mu_k = delta(k, k0)."""
    for k, m in enumerate(povm.elements):
        if max_abs(m @ m - m) > tol:
            values = np.zeros(len(povm))
            values[k] = 1.0
            return k, uncertainty_matrix(ValuedPovm(povm, values))
    return None


def classical_weights(povm: Povm, tol: float = VALIDATION_TOL) -> np.ndarray | None:
    """c_k if every element equals c_k * I, else None."""
    eye = np.eye(povm.dim)
    c = np.real(np.trace(povm.elements, axis1=1, axis2=2)) / povm.dim
    if max_abs(povm.elements - c[:, None, None] * eye[None]) > tol:
        return None
    return c


def property_report(vp: ValuedPovm, tol: float = VALIDATION_TOL) -> PropertyReport:
    rep = PropertyReport(tol=tol)
    unc = uncertainty_operator(vp)
    rep.entries["P1_positivity"] = {
        "status": _status(unc.min_eigenvalue_of_uncertainty >= -tol),
        "min_eigenvalue": unc.min_eigenvalue_of_uncertainty,
    }

    pvm = is_pvm(vp.povm, tol)
    norm = op_norm(unc.uncertainty_operator)
    rep.entries["P2_vanishing_on_pvm"] = (
        {"status": _status(norm <= tol), "norm": norm} if pvm else {"status": "n/a"}
    )
    if pvm:
        rep.entries["P3_strict_positivity"] = {"status": "n/a"}
    else:
        witness = delta_witness(vp.povm, tol)
        if witness is None:
            rep.entries["P3_strict_positivity"] = {"status": "fail", "detail": "no non-projector element"}
        else:
            k0, dm2 = witness
            wnorm = op_norm(dm2)
            rep.entries["P3_strict_positivity"] = {
                "status": _status(wnorm > tol),
                "witness_index": k0,
                "witness_label": vp.labels[k0],
                "norm": wnorm,
            }

    c = classical_weights(vp.povm, tol)
    if c is None:
        rep.entries["P4_classical_reduction"] = {"status": "n/a"}
    else:
        mean = float(c @ vp.values)
        classical_var = float(c @ (vp.values - mean) ** 2)
        resid = max_abs(unc.uncertainty_operator - classical_var * np.eye(vp.dim))
        rep.entries["P4_classical_reduction"] = {
            "status": _status(resid <= tol),
            "classical_variance": classical_var,
            "residual": resid,
        }

    additivity = check_tensor_additivity(vp, vp)
    rep.entries["P5_tensor_additivity"] = {
        "status": _status(additivity <= tol),
        "check": "check_tensor_additivity(self, self)",
        "residual": additivity,
    }
    negated = ValuedPovm(vp.povm, -vp.values)
    convex = check_convex_combination(0.5, vp, negated)
    rep.entries["P6_convex_combination"] = {
        "status": _status(convex <= tol),
        "check": "check_convex_combination(0.5, self, self with negated values)",
        "residual": convex,
    }
    return rep
