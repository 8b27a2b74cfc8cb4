"""Cross-checks between the two wing models of one configuration.

Three comparisons are provided: tip-load statics, structural modes, and
aeroelastic stability at a flow point.  Relative errors always use the
refined model as the reference, and mode shapes are correlated through the
modal assurance criterion evaluated on the node set both meshes share (an
integer mesh refinement keeps every coarse node).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .aero import AeroOperators, FlowConditions, aero_operators
from .aeroelastic import dynamic_stability
from .fidelity import WingModel

__all__ = [
    "ComparisonReport",
    "mac",
    "mac_matrix",
    "relative_error",
    "shared_node_dofs",
    "compare_static",
    "compare_modal",
    "compare_aeroelastic",
]


def mac(phi_i: np.ndarray, phi_j: np.ndarray) -> float:
    """Modal assurance criterion of two shape vectors, complex-safe.

    |phi_i^H phi_j|^2 / ((phi_i^H phi_i)(phi_j^H phi_j)), in [0, 1];
    1 for identical shapes up to any nonzero complex scale.
    """
    a = np.asarray(phi_i).ravel()
    b = np.asarray(phi_j).ravel()
    if a.size != b.size:
        raise ValueError("shape vectors must have equal length")
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    if na == 0.0 or nb == 0.0:
        raise ValueError("zero vector has no mode shape")
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb))


def mac_matrix(shapes_a: np.ndarray, shapes_b: np.ndarray) -> np.ndarray:
    """MAC of every column pair; rows index shapes_a, columns shapes_b."""
    a = np.asarray(shapes_a)
    b = np.asarray(shapes_b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ValueError("shape matrices must share their row dimension")
    na = np.einsum("ij,ij->j", a.conj(), a).real
    nb = np.einsum("ij,ij->j", b.conj(), b).real
    if np.any(na == 0.0) or np.any(nb == 0.0):
        raise ValueError("zero vector has no mode shape")
    g = np.abs(a.conj().T @ b) ** 2
    return g / np.outer(na, nb)


def relative_error(value_lf: float, value_hf: float) -> float:
    """|lf - hf| / |hf|; the refined value is the reference."""
    if value_hf == 0.0:
        return 0.0 if value_lf == 0.0 else np.inf
    return abs(value_lf - value_hf) / abs(value_hf)


def shared_node_dofs(lf: WingModel, hf: WingModel) -> tuple[np.ndarray, np.ndarray]:
    """Dof indices of the nodes the two meshes have in common.

    Every coarse node must appear in the refined mesh (integer refinement
    along the same axis); unmatched nodes raise.
    """
    y_lf = lf.beam.nodes[:, 1]
    y_hf = hf.beam.nodes[:, 1]
    tol = 1e-9 * (1.0 + float(np.max(np.abs(y_hf), initial=0.0)))
    hf_nodes = []
    for y in y_lf:
        j = int(np.argmin(np.abs(y_hf - y)))
        if abs(y_hf[j] - y) > tol:
            raise ValueError("meshes do not share the coarse node set")
        hf_nodes.append(j)
    lf_dofs = (6 * np.arange(y_lf.size)[:, None] + np.arange(6)).ravel()
    hf_dofs = (6 * np.asarray(hf_nodes)[:, None] + np.arange(6)).ravel()
    return lf_dofs, hf_dofs


@dataclass
class ComparisonReport:
    """Outcome of one model comparison.

    lf_values / hf_values / relative_errors are aligned by key; eigenvalue
    tables hold per-model arrays; mac is the (optionally complex-derived)
    assurance matrix; flags record pass/fail against the thresholds the
    comparison was run with.
    """

    case: int
    lf_values: dict = field(default_factory=dict)
    hf_values: dict = field(default_factory=dict)
    relative_errors: dict = field(default_factory=dict)
    eigenvalue_tables: dict = field(default_factory=dict)
    mac: np.ndarray | None = None
    flags: dict = field(default_factory=dict)


def _tip_response(model: WingModel, dof_offset: int) -> float:
    beam = model.beam
    tip = beam.n_nodes - 1
    loads = np.zeros(beam.n_dof)
    loads[6 * tip + dof_offset] = 1.0
    u = beam.static_solve(loads)
    return float(u[6 * tip + dof_offset])


def compare_static(
    lf: WingModel,
    hf: WingModel,
    bending_threshold: float = 0.10,
    torsion_threshold: float = 0.15,
) -> ComparisonReport:
    """Unit tip force and unit tip torque, solved on both models.

    Reports the tip out-of-plane deflection and the tip twist with their
    relative errors; flags whether bending stays below its threshold while
    torsion exceeds its own (the expected knockdown signature).
    """
    w_lf = _tip_response(lf, 2)
    w_hf = _tip_response(hf, 2)
    ry_lf = _tip_response(lf, 4)
    ry_hf = _tip_response(hf, 4)
    e_bend = relative_error(w_lf, w_hf)
    e_tors = relative_error(ry_lf, ry_hf)
    return ComparisonReport(
        case=1,
        lf_values={"tip_deflection": w_lf, "tip_twist": ry_lf},
        hf_values={"tip_deflection": w_hf, "tip_twist": ry_hf},
        relative_errors={"bending": e_bend, "torsion": e_tors},
        flags={
            "bending_below_threshold": bool(e_bend < bending_threshold),
            "torsion_above_threshold": bool(e_tors > torsion_threshold),
        },
    )


def _swap_flag(m: np.ndarray) -> bool:
    """True when any row or column peaks off the diagonal."""
    k = min(m.shape)
    for i in range(k):
        row = np.delete(m[i, :], i)
        col = np.delete(m[:, i], i)
        off = max(row.max(initial=0.0), col.max(initial=0.0))
        if off > m[i, i]:
            return True
    return False


def compare_modal(
    lf: WingModel,
    hf: WingModel,
    n_modes: int = 8,
    mac_threshold: float = 0.95,
    n_check: int = 5,
) -> ComparisonReport:
    """Frequency table plus full MAC matrix on the shared node set."""
    res_lf = lf.beam.modal(n_modes)
    res_hf = hf.beam.modal(n_modes)
    i_lf, i_hf = shared_node_dofs(lf, hf)
    m = mac_matrix(res_lf.shapes[i_lf], res_hf.shapes[i_hf])
    k = min(res_lf.omega.size, res_hf.omega.size)
    errors = {
        f"omega_{i + 1}": relative_error(res_lf.omega[i], res_hf.omega[i])
        for i in range(k)
    }
    d = np.diag(m)[: min(n_check, k)]
    return ComparisonReport(
        case=2,
        lf_values={f"omega_{i + 1}": float(res_lf.omega[i]) for i in range(k)},
        hf_values={f"omega_{i + 1}": float(res_hf.omega[i]) for i in range(k)},
        relative_errors=errors,
        eigenvalue_tables={"lf_omega": res_lf.omega, "hf_omega": res_hf.omega},
        mac=m,
        flags={
            "matched_modes": bool(np.all(d > mac_threshold)),
            "mode_swap": _swap_flag(m),
        },
    )


def _zero_operators(model: WingModel) -> AeroOperators:
    n = model.beam.n_dof
    z = np.zeros((n, n))
    return AeroOperators(
        K_a=z,
        D_a=z.copy(),
        f_alpha=np.zeros(n),
        t_load=np.zeros((n, 0)),
        t_wash=np.zeros((0, n)),
        t_vel=np.zeros((0, n)),
        aic=np.zeros((0, 0)),
    )


def compare_aeroelastic(
    lf: WingModel,
    hf: WingModel,
    flow: FlowConditions | None,
    n_keep: int = 10,
    mac_threshold: float = 0.9,
    n_check: int = 5,
) -> ComparisonReport:
    """Stability eigenvalues and complex MAC at one flow point.

    flow = None runs the still-air limit: the aerodynamic operators vanish
    and the comparison degenerates to the damped structural modes.
    """
    if flow is None:
        ops_lf = _zero_operators(lf)
        ops_hf = _zero_operators(hf)
    else:
        ops_lf = aero_operators(lf.lattice, flow, lf.beam.nodes)
        ops_hf = aero_operators(hf.lattice, flow, hf.beam.nodes)
    res_lf = dynamic_stability(lf.beam, ops_lf, n_keep=n_keep)
    res_hf = dynamic_stability(hf.beam, ops_hf, n_keep=n_keep)
    i_lf, i_hf = shared_node_dofs(lf, hf)
    k = min(res_lf.eigenvalues.size, res_hf.eigenvalues.size)
    m = mac_matrix(res_lf.shapes[i_lf, :k], res_hf.shapes[i_hf, :k])
    errors = {
        f"eig_{i + 1}": relative_error(
            abs(res_lf.eigenvalues[i]), abs(res_hf.eigenvalues[i])
        )
        for i in range(k)
    }
    d = np.diag(m)[: min(n_check, k)]
    return ComparisonReport(
        case=3,
        lf_values={"max_real": float(res_lf.max_real)},
        hf_values={"max_real": float(res_hf.max_real)},
        relative_errors=errors,
        eigenvalue_tables={
            "lf_eigenvalues": res_lf.eigenvalues[:k],
            "hf_eigenvalues": res_hf.eigenvalues[:k],
        },
        mac=m,
        flags={
            "matched_modes": bool(np.all(d > mac_threshold)),
            "mode_swap": _swap_flag(m),
        },
    )
