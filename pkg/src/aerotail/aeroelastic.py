"""Coupled aeroelastic solutions on a beam plus vortex lattice pair.

Static solves couple the beam internal force with the linearized aero
stiffness, optionally trimming the rigid incidence so total lift matches a
target.  Divergence comes from the generalized eigenproblem between the
structural and aerodynamic stiffness.  Dynamic stability assembles the
first-order state matrix

    d/dt [u, v] = [[0, I], [-M^-1 (K - K_a), -M^-1 (C_s - D_a)]] [u, v]

on the free dofs, with light Rayleigh damping calibrated on the first two
structural modes.  Aileron effectiveness solves the antisymmetric-image
problem, since a rolling control input loads the two half wings with
opposite sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .aero import (
    AeroOperators,
    FlowConditions,
    Lattice,
    aero_operators,
    aic_matrix,
    coupling_maps,
)
from .beam import BeamModel

_REAL_EIG_TOL = 1e-8
_DEGENERATE_TOL = 1e-6


def _z_indicator(n_dof: int) -> np.ndarray:
    s = np.zeros(n_dof)
    s[2::6] = 1.0
    return s


@dataclass
class StaticAeroelasticResult:
    u: np.ndarray
    alpha: float
    total_lift: float
    iterations: int


def static_aeroelastic(
    model: BeamModel,
    ops: AeroOperators,
    flow: FlowConditions,
    extra_loads: np.ndarray | None = None,
    trim_lift: float | None = None,
    nonlinear: bool = False,
    tol: float = 1e-10,
    max_iter: int = 30,
) -> StaticAeroelasticResult:
    """Equilibrium of the flexible wing in the given flow.

    With trim_lift set, the rigid incidence becomes an unknown and the total
    aerodynamic lift of the modeled half wing is driven to that value.
    """
    n_dof = model.n_dof
    free = model.free
    extra = np.zeros(n_dof) if extra_loads is None else np.asarray(extra_loads, dtype=float)
    sz = _z_indicator(n_dof)
    k = model.stiffness()
    trim = trim_lift is not None
    u = np.zeros(n_dof)
    alpha = flow.alpha
    lift_scale = max(abs(trim_lift) if trim else 0.0, np.abs(ops.f_alpha).sum(), 1.0)
    force_scale = max(np.linalg.norm(ops.f_alpha * alpha + extra), lift_scale)

    for it in range(1, max_iter + 1):
        kg = model.geometric_stiffness(u) if nonlinear else None
        f_int = k @ u + (0.5 * kg @ u if nonlinear else 0.0)
        f_aero = ops.K_a @ u + ops.f_alpha * alpha
        r_struct = (f_int - f_aero - extra)[free]
        r_lift = (sz @ f_aero - trim_lift) if trim else 0.0
        if np.linalg.norm(r_struct) <= tol * force_scale and abs(r_lift) <= tol * lift_scale:
            return StaticAeroelasticResult(
                u=u, alpha=alpha, total_lift=float(sz @ f_aero), iterations=it - 1
            )
        tangent = k + (kg if nonlinear else 0.0) - ops.K_a
        tff = tangent[np.ix_(free, free)]
        if not trim:
            u[free] += scipy.linalg.solve(tff, -r_struct)
            continue
        nf = free.size
        jac = np.zeros((nf + 1, nf + 1))
        jac[:nf, :nf] = tff
        jac[:nf, nf] = -ops.f_alpha[free]
        jac[nf, :nf] = (sz @ ops.K_a)[free]
        jac[nf, nf] = sz @ ops.f_alpha
        step = scipy.linalg.solve(jac, -np.concatenate([r_struct, [r_lift]]))
        u[free] += step[:nf]
        alpha += step[nf]
    raise RuntimeError("static aeroelastic iteration did not converge")


def divergence_factor(model: BeamModel, ops: AeroOperators) -> float:
    """Smallest positive multiplier on dynamic pressure causing divergence.

    Solves K u = lambda K_a u on the free dofs; infinity when the flow
    cannot diverge the structure at any positive pressure.
    """
    free = model.free
    kff = model.stiffness()[np.ix_(free, free)]
    kaff = ops.K_a[np.ix_(free, free)]
    lam = scipy.linalg.eig(kff, kaff, right=False)
    lam = lam[np.isfinite(lam)]
    real = lam[np.abs(lam.imag) <= _REAL_EIG_TOL * np.maximum(np.abs(lam.real), 1.0)].real
    pos = real[real > 0.0]
    return float(pos.min()) if pos.size else float("inf")


def rayleigh_damping(model: BeamModel, zeta: float = 0.005) -> np.ndarray:
    """Mass plus stiffness proportional damping, zeta at the two lowest modes."""
    res = model.modal(min(2, model.free.size))
    w = res.omega
    if w.size >= 2 and w[0] > 0.0:
        a = 2.0 * zeta * w[0] * w[1] / (w[0] + w[1])
        b = 2.0 * zeta / (w[0] + w[1])
    elif w.size and w[0] > 0.0:
        a, b = 0.0, 2.0 * zeta / w[0]
    else:
        raise ValueError("model has no elastic modes to calibrate damping")
    return a * model.mass() + b * model.stiffness()


@dataclass
class StabilityResult:
    eigenvalues: np.ndarray  # complex, sorted by descending real part
    shapes: np.ndarray  # displacement partitions, (n_dof, k), complex
    degenerate: bool  # nearly repeated leading eigenvalues present
    all_eigenvalues: np.ndarray

    @property
    def max_real(self) -> float:
        return float(self.eigenvalues[0].real)


def dynamic_stability(
    model: BeamModel,
    ops: AeroOperators,
    n_keep: int = 10,
    zeta: float = 0.005,
    c_s: np.ndarray | None = None,
) -> StabilityResult:
    """Leading eigenvalues of the aeroelastic state matrix."""
    free = model.free
    ix = np.ix_(free, free)
    mff = model.mass()[ix]
    kff = (model.stiffness() - ops.K_a)[ix]
    if c_s is None:
        c_s = rayleigh_damping(model, zeta)
    cff = (c_s - ops.D_a)[ix]
    n = free.size
    cho = scipy.linalg.cho_factor(mff)
    a = np.zeros((2 * n, 2 * n))
    a[:n, n:] = np.eye(n)
    a[n:, :n] = -scipy.linalg.cho_solve(cho, kff)
    a[n:, n:] = -scipy.linalg.cho_solve(cho, cff)
    lam, vec = scipy.linalg.eig(a)
    order = np.lexsort((-lam.imag, -lam.real))
    keep = order[: min(n_keep, lam.size)]
    shapes = np.zeros((model.n_dof, keep.size), dtype=complex)
    shapes[free, :] = vec[:n, keep]
    kept = lam[keep]
    gaps = np.abs(np.diff(kept))
    degenerate = bool(np.any(gaps < _DEGENERATE_TOL * np.maximum(np.abs(kept[:-1]), 1.0)))
    return StabilityResult(
        eigenvalues=kept, shapes=shapes, degenerate=degenerate, all_eigenvalues=lam
    )


@dataclass
class AileronResult:
    eta: float
    roll_rigid: float
    roll_flexible: float


@dataclass(frozen=True)
class AileronDef:
    """Trailing-edge control surface: span band and rear chordwise rows."""

    y_start: float
    y_end: float
    rows: int = 1
    tau: float = 1.0  # incidence per unit deflection

    def panel_mask(self, lattice: Lattice) -> np.ndarray:
        idx = np.arange(lattice.n_panels)
        row = idx % lattice.nx
        y = lattice.cpts[:, 1]
        in_span = (y >= self.y_start) & (y <= self.y_end)
        return in_span & (row >= lattice.nx - self.rows)


def aileron_effectiveness(
    model: BeamModel,
    lattice: Lattice,
    flow: FlowConditions,
    aileron: AileronDef,
) -> AileronResult:
    """Flexible-to-rigid ratio of rolling moment per unit aileron deflection."""
    mask = aileron.panel_mask(lattice)
    if not mask.any():
        raise ValueError("aileron does not cover any lattice panel")
    alpha_delta = np.where(mask, aileron.tau, 0.0)
    w_anti = aic_matrix(lattice, flow.mach, image_sign=-1.0)
    # rigid response
    gamma_r = np.linalg.solve(w_anti, -flow.V * alpha_delta)
    lift_r = flow.rho * flow.V * gamma_r * lattice.dy
    roll_r = float(np.sum(lattice.load_pts[:, 1] * lift_r))
    # flexible response under the antisymmetric aero stiffness
    t_load, t_wash, _ = coupling_maps(lattice, model.nodes)
    load_scaled = t_load * lattice.dy[None, :]
    k_a = -flow.rho * flow.V**2 * load_scaled @ np.linalg.solve(w_anti, t_wash)
    f_delta = t_load @ lift_r
    free = model.free
    ku = (model.stiffness() - k_a)[np.ix_(free, free)]
    u = np.zeros(model.n_dof)
    u[free] = scipy.linalg.solve(ku, f_delta[free])
    gamma_f = np.linalg.solve(w_anti, -flow.V * (alpha_delta + t_wash @ u))
    lift_f = flow.rho * flow.V * gamma_f * lattice.dy
    roll_f = float(np.sum(lattice.load_pts[:, 1] * lift_f))
    return AileronResult(eta=roll_f / roll_r, roll_rigid=roll_r, roll_flexible=roll_f)


def stability_sweep(
    model: BeamModel,
    lattice: Lattice,
    flow_of_v: Callable[[float], FlowConditions],
    v_grid: np.ndarray,
    zeta: float = 0.005,
) -> np.ndarray:
    """Largest eigenvalue real part at each speed in v_grid."""
    c_s = rayleigh_damping(model, zeta)
    out = np.empty(len(v_grid))
    for i, v in enumerate(v_grid):
        ops = aero_operators(lattice, flow_of_v(v), model.nodes)
        out[i] = dynamic_stability(model, ops, c_s=c_s).max_real
    return out


def critical_speed(
    model: BeamModel,
    lattice: Lattice,
    flow_of_v: Callable[[float], FlowConditions],
    v_low: float,
    v_high: float,
    zeta: float = 0.005,
    tol: float = 1e-4,
    max_iter: int = 80,
) -> float:
    """Lowest speed in [v_low, v_high] where the state matrix loses stability.

    Bisection on the sign of the largest eigenvalue real part; the bracket
    must straddle the crossing.
    """
    c_s = rayleigh_damping(model, zeta)

    def margin(v: float) -> float:
        ops = aero_operators(lattice, flow_of_v(v), model.nodes)
        return dynamic_stability(model, ops, c_s=c_s).max_real

    lo, hi = float(v_low), float(v_high)
    m_lo, m_hi = margin(lo), margin(hi)
    if m_lo >= 0.0:
        raise ValueError(f"lower bracket V={lo} is already unstable")
    if m_hi < 0.0:
        raise ValueError(f"no instability up to V={hi}")
    for _ in range(max_iter):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if margin(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
