"""Parameter scans over the mzx family and their CSV form."""

from __future__ import annotations

import csv
import io

import numpy as np

from . import catalog
from .entropy import bound_pvm_mixture, min_entropy_over_states
from .optimize import OptimizerConfig, minimize_over_pure_states
from .qubit_joint import pure_variance_sum, build_mzx, ddd_rhs

COLUMNS = ("theta", "mixture_bound_bits", "min_entropy_bits", "ddd_rhs", "min_variance_sum")
FAMILIES = {"mzx": ("theta",)}


def scan_row(theta: float, config: OptimizerConfig) -> dict[str, float]:
    item = catalog.mzx(theta)
    a, b = catalog.mzx_constituents(theta)
    _, h_min = min_entropy_over_states(item.povm, config)
    joint = build_mzx(theta)
    zv, xv = joint.z_estimator(), joint.x_estimator()
    var = minimize_over_pure_states(lambda psi: pure_variance_sum(zv, xv, psi), 2, config)
    return {
        "theta": float(theta),
        "mixture_bound_bits": bound_pvm_mixture(a, b).value_bits,
        "min_entropy_bits": h_min,
        "ddd_rhs": ddd_rhs(joint),
        "min_variance_sum": var.best_value,
    }


def scan_mzx(start: float, stop: float, steps: int, config: OptimizerConfig | None = None) -> list[dict[str, float]]:
    config = config or OptimizerConfig()
    return [scan_row(float(t), config) for t in np.linspace(start, stop, steps)]


def format_csv(rows: list[dict[str, float]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(f"{row[c]:.12g}" for c in COLUMNS) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> list[dict[str, float]]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [{c: float(r[c]) for c in COLUMNS} for r in reader]
