"""Built-in measurement families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg import ORTHONORMAL_TOL, SIGMA_X, SIGMA_Z, bloch_operator
from .naimark import Alignment, NaimarkExtension, align, extend
from .povm import Povm, ValuedPovm, basis_pvm, mix, require_valid

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)

# orthonormal basis of the two-qubit symmetric subspace, as rows in C^4
SYMMETRIC_BASIS = np.array([
    [1, 0, 0, 0],
    [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0],
    [0, 0, 0, 1],
], dtype=complex)

JOINT_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class CatalogItem:
    name: str
    povm: Povm
    values: dict[str, np.ndarray]
    parameters: dict[str, float] = field(default_factory=dict)
    reference_extension: NaimarkExtension | None = None

    @property
    def default_values(self) -> str:
        return next(iter(self.values))

    def valued(self, values: str | None = None) -> ValuedPovm:
        key = values or self.default_values
        if key not in self.values:
            raise DomainError(f"{self.name} has no value map {key!r}; choose from {sorted(self.values)}")
        return ValuedPovm(self.povm, self.values[key])

    def meta(self) -> dict:
        return {"catalog": {"name": self.name, "parameters": dict(self.parameters)}}


def pvm_z() -> CatalogItem:
    return CatalogItem("pvm-z", basis_pvm(np.eye(2), ("+", "-")), {"Z": np.array([1.0, -1.0])})


def pvm_x() -> CatalogItem:
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    return CatalogItem("pvm-x", basis_pvm(h, ("+", "-")), {"X": np.array([1.0, -1.0])})


def mzx(theta: float) -> CatalogItem:
    """m_zx = I/4 + z cos(theta) sz/4 + x sin(theta) sx/4."""
    if not math.isfinite(theta):
        raise DomainError("theta must be finite")
    els = [np.eye(2) / 4 + z * math.cos(theta) / 4 * SIGMA_Z + x * math.sin(theta) / 4 * SIGMA_X
           for z in (1, -1) for x in (1, -1)]
    return CatalogItem(
        "mzx",
        Povm(np.array(els), JOINT_LABELS),
        {"Z": np.array([1.0, 1.0, -1.0, -1.0]), "X": np.array([1.0, -1.0, 1.0, -1.0])},
        {"theta": float(theta)},
    )


def axis_pvm(n) -> Povm:
    """Two-outcome qubit PVM {(I + n.s)/2, (I - n.s)/2} along unit vector n = (x, y, z)."""
    op = bloch_operator(n)
    return Povm(np.array([(np.eye(2) + op) / 2, (np.eye(2) - op) / 2]), ("+", "-"))


def mzx_constituents(theta: float) -> tuple[Povm, Povm]:
    """The two PVMs whose equal mixture is mzx(theta): along (sin, 0, cos) and (-sin, 0, cos)."""
    s, c = math.sin(theta), math.cos(theta)
    return axis_pvm((s, 0.0, c)), axis_pvm((-s, 0.0, c))


def mzx_as_mixture(theta: float) -> ValuedPovm:
    """mix(1/2, ...) of the constituent PVMs, reordered to (++, +-, -+, --) with Z values."""
    a, b = mzx_constituents(theta)
    m = mix(0.5, ValuedPovm(a, [1.0, -1.0]), ValuedPovm(b, [1.0, -1.0]))
    # a: + -> ++, - -> --; b: + -> +-, - -> -+
    order = [0, 2, 3, 1]
    return ValuedPovm(Povm(m.elements[order], JOINT_LABELS), m.values[order])


def trine() -> CatalogItem:
    vecs = [math.sqrt(2 / 3) * np.array([math.cos(2 * math.pi * k / 3), math.sin(2 * math.pi * k / 3)], dtype=complex)
            for k in range(3)]
    els = np.array([np.outer(v, v.conj()) for v in vecs])
    return CatalogItem("trine", Povm(els, ("0", "1", "2")),
                       {"delta0": np.array([1.0, 0.0, 0.0]), "index": np.array([0.0, 1.0, 2.0])})


def tetrahedron_spin(j: int) -> np.ndarray:
    """|up_0> = |up_z>; |up_j> = (|up_z> + sqrt2 e^{2 pi i j/3} |down_z>)/sqrt3 for j = 1, 2, 3."""
    if j == 0:
        return UP.copy()
    return (UP + math.sqrt(2) * np.exp(2j * math.pi * j / 3) * DOWN) / math.sqrt(3)


def tetrahedron_parallel_pair(j: int) -> np.ndarray:
    """|up_j up_j> in the symmetric-subspace basis."""
    s = tetrahedron_spin(j)
    return SYMMETRIC_BASIS @ np.kron(s, s)


def tetrahedron_reference_extension() -> NaimarkExtension:
    """|m~_0> = (sqrt3/2)|up_z up_z> + |a>/2, |m~_j> = (sqrt3/2)|up_j up_j> - |a>/2."""
    rows = []
    for j in range(4):
        anc = 0.5 if j == 0 else -0.5
        rows.append(np.concatenate([math.sqrt(3) / 2 * tetrahedron_parallel_pair(j), [anc]]))
    return NaimarkExtension(3, np.array(rows), ("0", "1", "2", "3"), np.arange(4))


def tetrahedron() -> CatalogItem:
    els = np.array([0.75 * np.outer(v, v.conj()) for v in map(tetrahedron_parallel_pair, range(4))])
    return CatalogItem(
        "tetrahedron",
        Povm(els, ("0", "1", "2", "3")),
        {"delta0": np.array([1.0, 0.0, 0.0, 0.0]), "index": np.array([0.0, 1.0, 2.0, 3.0])},
        reference_extension=tetrahedron_reference_extension(),
    )


_BUILDERS = {
    "pvm-z": (pvm_z, ()),
    "pvm-x": (pvm_x, ()),
    "mzx": (mzx, ("theta",)),
    "trine": (trine, ()),
    "tetrahedron": (tetrahedron, ()),
}


def names() -> list[str]:
    return list(_BUILDERS)


def parameters(name: str) -> tuple[str, ...]:
    if name not in _BUILDERS:
        raise DomainError(f"unknown catalog entry {name!r}")
    return _BUILDERS[name][1]


def build(name: str, **params) -> CatalogItem:
    if name not in _BUILDERS:
        raise DomainError(f"unknown catalog entry {name!r}; known: {', '.join(_BUILDERS)}")
    fn, wanted = _BUILDERS[name]
    missing = [p for p in wanted if params.get(p) is None]
    if missing:
        raise DomainError(f"{name} requires parameter(s): {', '.join(missing)}")
    extra = [p for p, v in params.items() if p not in wanted and v is not None]
    if extra:
        raise DomainError(f"{name} takes no parameter(s) {', '.join(extra)}")
    item = fn(**{p: float(params[p]) for p in wanted})
    require_valid(item.povm, tol=1e-10)
    return item


@dataclass(frozen=True)
class ReferenceCheck:
    orthonormality_residual: float
    restriction_residual: float
    alignment: Alignment | None

    @property
    def alignment_residual(self) -> float:
        return 0.0 if self.alignment is None else self.alignment.residual

    def ok(self, tol: float = ORTHONORMAL_TOL, align_tol: float = 1e-9) -> bool:
        return (self.orthonormality_residual <= tol and self.restriction_residual <= tol
                and self.alignment_residual <= align_tol)

    def to_dict(self) -> dict:
        out = {"orthonormality_residual": self.orthonormality_residual,
               "restriction_residual": self.restriction_residual,
               "alignment_residual": self.alignment_residual}
        if self.alignment is not None:
            out["alignment_ancilla_unitary"] = self.alignment.ancilla_unitary
        return out


def verify_reference_extension(name: str, **params) -> ReferenceCheck:
    """Check the stored extension and relate it to :func:`extend` by an ancilla unitary.

    Entries without a stored extension are checked against their own
    computed extension, which for a PVM is trivial.
    """
    item = build(name, **params)
    computed = extend(item.povm)
    ref = item.reference_extension or computed
    alignment = align(ref, computed)
    return ReferenceCheck(ref.orthonormality_residual(), ref.restriction_residual(item.povm), alignment)


def coarse_grain_x(povm: Povm) -> np.ndarray:
    """Sum joint elements over x: returns the two z-marginal operators."""
    e = povm.elements
    return np.array([e[0] + e[1], e[2] + e[3]])
