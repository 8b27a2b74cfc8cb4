"""Design vector, constraint stack, and derivatives for the tailored wing.

Design vector: nine entries per design panel, [xiA1..4, xiD1..4, t], packed
panel by panel.

Constraint vector (all entries feasible when <= 0), fixed layout:

    for each load case:
        tw   8 per design panel   most critical Tsai-Wu residuals w - 1
        b    8 per buckling region   1 - lambda for attributed modes
        ds   10                   real parts of leading aeroelastic eigenvalues
        ae   1                    eta_min - eta (aileron effectiveness)
        AoA  2 per station        alpha bounds at trim, lower then upper
    feas 6 per design panel       lamination-parameter feasibility residuals

Fixed-length blocks are padded with a large negative sentinel where fewer
values exist, so the layout never depends on the design.  Every entry
carries an availability tag; a model evaluates the entries tagged for its
level (or "both") and reports NaN elsewhere.

Gradients: the mass gradient and the feasibility block are closed form;
every other available row is central finite differences with step
1e-6 * (1 + |x_i|), falling back to one-sided probes at the box bounds
so the model is never evaluated outside its domain.  Near-coincident
eigenvalues are reported through per-entry non-smoothness flags so the
optimizer can react.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .aero import FlowConditions, aero_operators
from .aeroelastic import aileron_effectiveness, dynamic_stability, static_aeroelastic
from .fidelity import FidelityConfig, WingDefinition, WingModel, build_wing_model
from .laminate import (
    LaminationParameters,
    PanelDesign,
    feasibility_gradient,
    feasibility_residuals,
    pad_critical,
    tsai_wu_factor,
)

GRAVITY = 9.80665
FD_REL_STEP = 1.0e-6

N_TSAI_WU = 8  # entries kept per panel per load case
N_BUCKLING = 8  # entries kept per region per load case
N_STABILITY = 10  # leading eigenvalue real parts per load case
N_FEASIBILITY = 6  # residuals per panel, design only

VARS_PER_PANEL = 9


@dataclass(frozen=True)
class LoadCase:
    """One flight condition the constraint stack is evaluated at.

    With a load factor the rigid incidence is trimmed so the half-wing lift
    equals load_factor * g * (supported + structural mass); with
    load_factor None the incidence is fixed at `alpha`.
    """

    V: float
    rho: float
    mach: float = 0.0
    load_factor: float | None = 1.0
    alpha: float = 0.0
    alpha_min: float = -0.17453292519943295  # -10 deg
    alpha_max: float = 0.17453292519943295
    eta_min: float = 0.5
    name: str = ""

    def __post_init__(self):
        if self.V <= 0.0 or self.rho <= 0.0:
            raise ValueError("load case needs positive V and rho")
        if self.alpha_min >= self.alpha_max:
            raise ValueError("alpha bounds must satisfy alpha_min < alpha_max")


def constraint_length(n_lc: int, n_panels: int, n_regions: int, n_stations: int) -> int:
    per_lc = (
        N_TSAI_WU * n_panels
        + N_BUCKLING * n_regions
        + N_STABILITY
        + 1
        + 2 * n_stations
    )
    return n_lc * per_lc + N_FEASIBILITY * n_panels


def pack_design(panels) -> np.ndarray:
    """Stack panel designs into the flat design vector."""
    parts = []
    for p in panels:
        parts.append(p.lp.as_vector())
        parts.append([p.thickness])
    return np.concatenate(parts)


def unpack_design(x, n_panels: int) -> list[PanelDesign]:
    x = np.asarray(x, dtype=float)
    if x.shape != (VARS_PER_PANEL * n_panels,):
        raise ValueError(
            f"design vector must have {VARS_PER_PANEL * n_panels} entries, got {x.shape}"
        )
    out = []
    for p in range(n_panels):
        block = x[VARS_PER_PANEL * p : VARS_PER_PANEL * (p + 1)]
        out.append(
            PanelDesign(lp=LaminationParameters.from_vector(block[:8]), thickness=block[8])
        )
    return out


@dataclass(frozen=True)
class ConstraintLayout:
    """Static metadata of the constraint vector for one configuration.

    entity holds the design-panel id (tw, feas), region id (b), or station
    index (AoA); -1 where not applicable.  blocks maps (load case, category)
    to the slice of that block; the design-only block uses load case -1.
    """

    category: tuple[str, ...]
    entity: np.ndarray
    load_case: np.ndarray
    availability: tuple[str, ...]
    blocks: dict
    regions: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.category)

    def mask_for(self, level: str) -> np.ndarray:
        return np.array([a in ("both", level) for a in self.availability])

    def rows(self, load_case: int, category: str) -> slice:
        return self.blocks[(load_case, category)]

    @classmethod
    def build(cls, defn: WingDefinition, n_loadcases: int) -> "ConstraintLayout":
        regions = tuple(sorted(set(defn.zone_regions)))
        cats: list[str] = []
        entity: list[int] = []
        lcs: list[int] = []
        avail: list[str] = []
        blocks: dict = {}

        def block(lc, cat, entities):
            start = len(cats)
            tag = defn.category_availability(cat)
            for e in entities:
                cats.append(cat)
                entity.append(e)
                lcs.append(lc)
                avail.append(tag)
            blocks[(lc, cat)] = slice(start, len(cats))

        for lc in range(n_loadcases):
            block(lc, "tw", [p for p in range(defn.n_panels) for _ in range(N_TSAI_WU)])
            block(lc, "b", [r for r in regions for _ in range(N_BUCKLING)])
            block(lc, "ds", [-1] * N_STABILITY)
            block(lc, "ae", [-1])
            block(lc, "AoA", [s for s in range(len(defn.aoa_stations)) for _ in range(2)])
        block(-1, "feas", [p for p in range(defn.n_panels) for _ in range(N_FEASIBILITY)])

        return cls(
            category=tuple(cats),
            entity=np.array(entity),
            load_case=np.array(lcs),
            availability=tuple(avail),
            blocks=blocks,
            regions=regions,
        )


@dataclass
class ModelOutputs:
    """One model evaluation: objective, constraints, availability, flags."""

    f: float
    c: np.ndarray
    mask: np.ndarray
    nonsmooth: np.ndarray
    details: dict = field(default_factory=dict)

    def max_violation(self) -> float:
        avail = self.c[self.mask]
        return float(max(0.0, np.max(avail))) if avail.size else 0.0


@dataclass
class GradientResult:
    grad_f: np.ndarray
    grad_c: np.ndarray  # (n_constraints, n_variables), NaN on unavailable rows
    nonsmooth: np.ndarray  # entries whose finite differencing crossed a flagged point


class WingAnalysis:
    """Objective and constraint stack of one wing at one fidelity level."""

    def __init__(
        self,
        definition: WingDefinition,
        loadcases,
        fidelity: FidelityConfig | None = None,
        level: str = "LF",
        t_bounds: tuple[float, float] = (6.25e-4, 0.05),
    ):
        if level not in ("LF", "HF"):
            raise ValueError("level must be 'LF' or 'HF'")
        self.definition = definition
        self.loadcases = tuple(loadcases)
        if not self.loadcases:
            raise ValueError("need at least one load case")
        self.fidelity = fidelity or FidelityConfig()
        self.level = level
        self.t_bounds = t_bounds
        self.layout = ConstraintLayout.build(definition, len(self.loadcases))
        if self._have("ae") and definition.aileron is None:
            raise ValueError(
                "aileron effectiveness is constrained but the wing has no aileron"
            )

    def _have(self, category: str) -> bool:
        return self.definition.category_availability(category) in ("both", self.level)

    @property
    def n_variables(self) -> int:
        return self.definition.n_variables

    @property
    def n_constraints(self) -> int:
        return self.layout.size

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Box bounds: lamination parameters in [-1, 1], thickness in t_bounds."""
        n = self.definition.n_panels
        lb = np.tile(np.r_[-np.ones(8), self.t_bounds[0]], n)
        ub = np.tile(np.r_[np.ones(8), self.t_bounds[1]], n)
        return lb, ub

    def build_model(self, x) -> WingModel:
        panels = unpack_design(x, self.definition.n_panels)
        return build_wing_model(self.definition, panels, self.fidelity)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x) -> ModelOutputs:
        x = np.asarray(x, dtype=float)
        model = self.build_model(x)
        lay = self.layout
        mask = lay.mask_for(self.level)
        c = np.full(lay.size, np.nan)
        nonsmooth = np.zeros(lay.size, dtype=bool)
        details: dict = {}

        panels = unpack_design(x, self.definition.n_panels)
        sl = lay.rows(-1, "feas")
        c[sl] = np.concatenate([feasibility_residuals(p.lp) for p in panels])

        for i_lc, lc in enumerate(self.loadcases):
            self._loadcase(model, i_lc, lc, c, nonsmooth, details)

        c[~mask] = np.nan
        return ModelOutputs(
            f=model.mass_with_fixed(), c=c, mask=mask, nonsmooth=nonsmooth, details=details
        )

    def _loadcase(self, model: WingModel, i_lc, lc, c, nonsmooth, details):
        defn = self.definition
        lay = self.layout
        beam = model.beam
        flow = FlowConditions(V=lc.V, rho=lc.rho, alpha=lc.alpha, mach=lc.mach)
        ops = aero_operators(model.lattice, flow, beam.nodes)
        factor = lc.load_factor if lc.load_factor is not None else 1.0
        fe = beam.gravity_load(GRAVITY * factor)
        if lc.load_factor is not None:
            target = lc.load_factor * GRAVITY * (defn.supported_mass + beam.total_mass())
            res = static_aeroelastic(beam, ops, flow, extra_loads=fe, trim_lift=target)
        else:
            res = static_aeroelastic(beam, ops, flow, extra_loads=fe)

        if self._have("tw"):
            strains = beam.element_mid_strains(res.u)
            per_panel: list[list[float]] = [[] for _ in range(defn.n_panels)]
            for e_idx in range(len(beam.elements)):
                sec = model.bay_sections[model.element_bay[e_idx]]
                for st in sec.recovery:
                    s = st.wall_stresses(strains[e_idx])
                    per_panel[st.panel_index].append(
                        tsai_wu_factor((s[0], s[1], s[2]), defn.material) - 1.0
                    )
            sl = lay.rows(i_lc, "tw")
            c[sl] = np.concatenate(
                [pad_critical(v, N_TSAI_WU) for v in per_panel]
            )

        if self._have("b"):
            loads = ops.K_a @ res.u + ops.f_alpha * res.alpha + fe
            buck = beam.buckling(loads, n_modes=N_BUCKLING * len(lay.regions) + 8)
            elem_region = model.element_region()
            per_region = {r: [] for r in lay.regions}
            for k in range(buck.factors.size):
                energies = beam.element_strain_energy(buck.shapes[:, k])
                per_region[elem_region[int(np.argmax(energies))]].append(
                    1.0 - buck.factors[k]
                )
            sl = lay.rows(i_lc, "b")
            c[sl] = np.concatenate(
                [pad_critical(per_region[r], N_BUCKLING) for r in lay.regions]
            )
            if buck.factors.size > 1:
                gaps = np.diff(buck.factors)
                if np.any(gaps < 1e-6 * np.abs(buck.factors[:-1])):
                    nonsmooth[sl] = True

        if self._have("ds"):
            stab = dynamic_stability(beam, ops, n_keep=N_STABILITY)
            sl = lay.rows(i_lc, "ds")
            c[sl] = pad_critical(np.real(stab.eigenvalues), N_STABILITY)
            if stab.degenerate:
                nonsmooth[sl] = True

        if self._have("ae"):
            ail = aileron_effectiveness(beam, model.lattice, flow, defn.aileron)
            c[lay.rows(i_lc, "ae")] = lc.eta_min - ail.eta

        if self._have("AoA"):
            y_st = np.asarray(defn.aoa_stations) * defn.planform.semi_span
            ry = np.interp(y_st, beam.nodes[:, 1], res.u[4::6])
            a_loc = res.alpha + ry
            sl = lay.rows(i_lc, "AoA")
            pair = np.column_stack([lc.alpha_min - a_loc, a_loc - lc.alpha_max])
            c[sl] = pair.ravel()

        n_tip = beam.n_nodes - 1
        details[i_lc] = {
            "alpha": res.alpha,
            "total_lift": res.total_lift,
            "tip_deflection": float(res.u[6 * n_tip + 2]),
            "tip_twist": float(res.u[6 * n_tip + 4]),
        }

    # -- derivatives --------------------------------------------------------

    def mass_gradient(self, x=None) -> np.ndarray:
        """Closed-form objective gradient; nonzero only on thickness entries.

        Wall areas are fixed geometry, so the gradient does not depend on x.
        """
        defn = self.definition
        panels = (
            unpack_design(x, defn.n_panels) if x is not None else self._unit_panels()
        )
        model = build_wing_model(defn, panels, self.fidelity)
        g = np.zeros(defn.n_variables)
        g[VARS_PER_PANEL - 1 :: VARS_PER_PANEL] = model.mass_thickness_gradient()
        return g

    def _unit_panels(self):
        lp = LaminationParameters(np.zeros(4), np.zeros(4))
        return [PanelDesign(lp, 1e-3) for _ in range(self.definition.n_panels)]

    def gradients(self, x) -> GradientResult:
        x = np.asarray(x, dtype=float)
        lay = self.layout
        n = x.size
        grad_f = self.mass_gradient(x)
        grad_c = np.empty((lay.size, n))
        flags = np.zeros(lay.size, dtype=bool)
        lb, ub = self.bounds()
        for i in range(n):
            h = FD_REL_STEP * (1.0 + abs(x[i]))
            # probes stay inside the box; one-sided at a pinned bound
            hp = max(0.0, min(h, ub[i] - x[i]))
            hm = max(0.0, min(h, x[i] - lb[i]))
            xp = x.copy()
            xp[i] += hp
            xm = x.copy()
            xm[i] -= hm
            op = self.evaluate(xp)
            om = self.evaluate(xm)
            grad_c[:, i] = (op.c - om.c) / (hp + hm)
            flags |= op.nonsmooth | om.nonsmooth

        # exact rows for the design-only feasibility block
        sl = lay.rows(-1, "feas")
        grad_c[sl, :] = 0.0
        panels = unpack_design(x, self.definition.n_panels)
        for p, pd in enumerate(panels):
            r0 = sl.start + N_FEASIBILITY * p
            c0 = VARS_PER_PANEL * p
            grad_c[r0 : r0 + N_FEASIBILITY, c0 : c0 + 8] = feasibility_gradient(pd.lp)
        return GradientResult(grad_f=grad_f, grad_c=grad_c, nonsmooth=flags)
