"""Coupled aeroelastic solution tests."""

import numpy as np
import pytest

from aerotail.aero import FlowConditions, Planform, aero_operators, build_lattice
from aerotail.aeroelastic import (
    AileronDef,
    aileron_effectiveness,
    critical_speed,
    divergence_factor,
    dynamic_stability,
    rayleigh_damping,
    stability_sweep,
    static_aeroelastic,
)
from aerotail.beam import BeamModel, ElementDef
from aerotail.section import SectionProperties, _inertia_map, prescribed_section

SPAN = 8.0
CHORD = 1.0
X_EA = 0.4


def wing_beam(n_elem=8, gj=4.0e4, ei2=2.0e5, mu=18.0, ip=0.8, cg_aft=0.0):
    """Straight spanwise cantilever at the elastic axis x = X_EA."""
    if cg_aft == 0.0:
        sec = prescribed_section(1e9, 1e8, 1e8, gj, ei2, 4e6, mu=mu, i_polar=ip)
    else:
        # local y points forward (upstream), so an aft cg sits at negative y
        m = mu * _inertia_map(-cg_aft, 0.0)
        m[3, 3] += ip
        m[4, 4] += 0.5 * ip
        m[5, 5] += 0.5 * ip
        sec = SectionProperties(
            C=np.diag([1e9, 1e8, 1e8, gj, ei2, 4e6]).astype(float),
            M=m,
            mu=mu,
            reference=np.zeros(2),
            enclosed_area=0.0,
            recovery=(),
            panel_arc_length={},
        )
    y = np.linspace(0.0, SPAN, n_elem + 1)
    nodes = np.column_stack([np.full(y.size, X_EA), y, np.zeros(y.size)])
    elems = [ElementDef((i, i + 1), sec) for i in range(n_elem)]
    return BeamModel(nodes, elems, fixed_dofs=np.arange(6))


def wing_lattice(nx=2, ny=12):
    return build_lattice(Planform(SPAN, CHORD, CHORD), nx=nx, ny=ny)


class TestStatic:
    def setup_method(self):
        self.model = wing_beam()
        self.lat = wing_lattice()
        self.flow = FlowConditions(V=40.0, rho=1.2, alpha=0.04)
        self.ops = aero_operators(self.lat, self.flow, self.model.nodes)

    def test_equilibrium_residual(self):
        res = static_aeroelastic(self.model, self.ops, self.flow)
        r = (self.model.stiffness() - self.ops.K_a) @ res.u - self.ops.f_alpha * self.flow.alpha
        assert np.linalg.norm(r[self.model.free]) < 1e-8 * np.abs(self.ops.f_alpha).sum()

    def test_flexible_wing_lifts_more(self):
        # quarter-chord load ahead of the elastic axis washes the wing in
        res = static_aeroelastic(self.model, self.ops, self.flow)
        rigid = self.ops.f_alpha[2::6].sum() * self.flow.alpha
        assert res.total_lift > rigid

    def test_trim_hits_target(self):
        target = 5.0e3
        res = static_aeroelastic(self.model, self.ops, self.flow, trim_lift=target)
        assert res.total_lift == pytest.approx(target, rel=1e-9)

    def test_trim_round_trip(self):
        fixed = static_aeroelastic(self.model, self.ops, self.flow)
        trimmed = static_aeroelastic(
            self.model, self.ops, self.flow, trim_lift=fixed.total_lift
        )
        assert trimmed.alpha == pytest.approx(self.flow.alpha, rel=1e-9)

    def test_extra_loads_superpose(self):
        f_pt = np.zeros(self.model.n_dof)
        f_pt[-4] = 800.0
        a = static_aeroelastic(self.model, self.ops, self.flow)
        b = static_aeroelastic(self.model, self.ops, self.flow, extra_loads=f_pt)
        flow0 = FlowConditions(V=self.flow.V, rho=self.flow.rho, alpha=0.0)
        c = static_aeroelastic(self.model, self.ops, flow0, extra_loads=f_pt)
        assert np.allclose(b.u, a.u + c.u, atol=1e-12 + 1e-9 * np.abs(a.u).max())

    def test_nonlinear_matches_linear_at_low_q(self):
        flow = FlowConditions(V=5.0, rho=1.2, alpha=0.01)
        ops = aero_operators(self.lat, flow, self.model.nodes)
        lin = static_aeroelastic(self.model, ops, flow)
        non = static_aeroelastic(self.model, ops, flow, nonlinear=True)
        assert np.allclose(lin.u, non.u, rtol=1e-4, atol=1e-12)


class TestDivergence:
    def test_det_sign_flips_at_factor(self):
        model = wing_beam()
        flow = FlowConditions(V=30.0, rho=1.2)
        ops = aero_operators(wing_lattice(), flow, model.nodes)
        lam = divergence_factor(model, ops)
        assert np.isfinite(lam) and lam > 0
        ix = np.ix_(model.free, model.free)
        k, ka = model.stiffness()[ix], ops.K_a[ix]
        below = np.linalg.slogdet(k - 0.999 * lam * ka)[0]
        above = np.linalg.slogdet(k - 1.001 * lam * ka)[0]
        assert below > 0 > above

    def test_scaling_with_dynamic_pressure(self):
        model = wing_beam()
        lat = wing_lattice()
        f1 = FlowConditions(V=30.0, rho=1.2)
        f2 = FlowConditions(V=60.0, rho=1.2)
        l1 = divergence_factor(model, aero_operators(lat, f1, model.nodes))
        l2 = divergence_factor(model, aero_operators(lat, f2, model.nodes))
        assert l1 == pytest.approx(4.0 * l2, rel=1e-8)

    def test_stiffer_wing_diverges_later(self):
        lat = wing_lattice()
        flow = FlowConditions(V=30.0, rho=1.2)
        soft = wing_beam(gj=3e4)
        hard = wing_beam(gj=6e4)
        l_soft = divergence_factor(soft, aero_operators(lat, flow, soft.nodes))
        l_hard = divergence_factor(hard, aero_operators(lat, flow, hard.nodes))
        assert l_hard > l_soft


class TestDynamic:
    def test_stable_at_low_speed(self):
        model = wing_beam()
        flow = FlowConditions(V=2.0, rho=1.2)
        ops = aero_operators(wing_lattice(), flow, model.nodes)
        res = dynamic_stability(model, ops)
        assert res.max_real < 0.0
        assert res.eigenvalues.size == 10
        assert np.all(np.diff(res.eigenvalues.real) <= 1e-12)

    def test_rayleigh_targets_modal_damping(self):
        model = wing_beam()
        c_s = rayleigh_damping(model, zeta=0.005)
        modes = model.modal(2)
        for k in range(2):
            phi = modes.shapes[:, k]
            zeta_k = (phi @ c_s @ phi) / (2 * modes.omega[k])
            assert zeta_k == pytest.approx(0.005, rel=1e-9)

    def test_flutter_bracketed_and_found(self):
        model = wing_beam(cg_aft=0.12, gj=1.2e4, ei2=1.7e5, ip=0.35)
        lat = wing_lattice()

        def flow_of_v(v):
            return FlowConditions(V=v, rho=1.2)

        grid = np.linspace(5.0, 120.0, 24)
        margins = stability_sweep(model, lat, flow_of_v, grid)
        assert margins[0] < 0.0 and margins[-1] > 0.0
        vc = critical_speed(model, lat, flow_of_v, 5.0, 120.0, tol=1e-5)
        c_s = rayleigh_damping(model)
        below = dynamic_stability(
            model, aero_operators(lat, flow_of_v(0.99 * vc), model.nodes), c_s=c_s
        ).max_real
        above = dynamic_stability(
            model, aero_operators(lat, flow_of_v(1.01 * vc), model.nodes), c_s=c_s
        ).max_real
        assert below < 0.0 < above

    def test_bad_bracket_raises(self):
        model = wing_beam()
        lat = wing_lattice()

        def flow_of_v(v):
            return FlowConditions(V=v, rho=1.2)

        with pytest.raises(ValueError, match="no instability"):
            critical_speed(model, lat, flow_of_v, 1.0, 2.0)


class TestAileron:
    AIL = AileronDef(y_start=0.6 * SPAN, y_end=0.95 * SPAN, rows=1)

    def test_effectiveness_below_unity(self):
        model = wing_beam()
        flow = FlowConditions(V=45.0, rho=1.2)
        res = aileron_effectiveness(model, wing_lattice(), flow, self.AIL)
        assert 0.0 < res.eta < 1.0

    def test_stiffer_wing_more_effective(self):
        # both speeds stay below the antisymmetric divergence point
        flow = FlowConditions(V=45.0, rho=1.2)
        lat = wing_lattice()
        soft = aileron_effectiveness(wing_beam(gj=4e4), lat, flow, self.AIL)
        hard = aileron_effectiveness(wing_beam(gj=8e4), lat, flow, self.AIL)
        assert soft.eta < hard.eta < 1.0

    def test_effectiveness_drops_with_speed(self):
        model = wing_beam(gj=8e4)
        lat = wing_lattice()
        etas = [
            aileron_effectiveness(model, lat, FlowConditions(V=v, rho=1.2), self.AIL).eta
            for v in (20.0, 45.0, 60.0)
        ]
        assert etas[0] > etas[1] > etas[2]

    def test_empty_aileron_rejected(self):
        model = wing_beam()
        with pytest.raises(ValueError, match="aileron"):
            aileron_effectiveness(
                model,
                wing_lattice(),
                FlowConditions(V=45.0, rho=1.2),
                AileronDef(y_start=2 * SPAN, y_end=3 * SPAN),
            )
