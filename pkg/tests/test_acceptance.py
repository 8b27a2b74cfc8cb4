"""Release gates: each test pins one externally checkable guarantee.

Structural solvers are held to closed-form prismatic results, the lattice
to thin-airfoil and conservation limits, aeroelastic roots to independent
brute-force oracles, constraint derivatives to fresh central differences,
the optimizer to its single-fidelity baseline, and the model comparisons
to the expected coarse/refined discrepancy patterns.  Wall-clock budgets
guard against performance regressions.
"""

import time

import numpy as np

from aerotail.aero import (
    FlowConditions,
    Planform,
    aero_operators,
    build_lattice,
    coupling_maps,
    steady_solve,
)
from aerotail.aeroelastic import (
    AileronDef,
    critical_speed,
    divergence_factor,
    dynamic_stability,
    rayleigh_damping,
)
from aerotail.beam import BeamModel, ElementDef, cantilever_model
from aerotail.compare import compare_aeroelastic, compare_modal, compare_static
from aerotail.constraints import LoadCase, constraint_length, pack_design
from aerotail.fidelity import (
    FidelityConfig,
    WingDefinition,
    build_wing_model,
    make_hf,
    make_lf,
)
from aerotail.laminate import (
    LaminationParameters,
    MaterialProperties,
    PanelDesign,
    feasibility_residuals,
    lp_from_stack,
)
from aerotail.mfopt import (
    build_correction,
    quadratic_benchmark_pair,
    trmm_optimize,
    verify_consistency,
)
from aerotail.section import (
    SectionProperties,
    _inertia_map,
    box_section,
    prescribed_section,
)

E_ISO = 71.0e9
NU_ISO = 0.33
G_ISO = E_ISO / (2.0 * (1.0 + NU_ISO))

ISO = MaterialProperties(
    E1=E_ISO,
    E2=E_ISO,
    G12=G_ISO,
    nu12=NU_ISO,
    rho=2700.0,
    Xt=400e6,
    Xc=400e6,
    Yt=400e6,
    Yc=400e6,
    S=200e6,
)

CFRP = MaterialProperties(
    E1=117.9e9,
    E2=9.7e9,
    G12=4.8e9,
    nu12=0.35,
    rho=1550.0,
    Xt=1648e6,
    Xc=1034e6,
    Yt=64e6,
    Yc=228e6,
    S=71e6,
)

QI = LaminationParameters(np.zeros(4), np.zeros(4))


def toy_wing(supported_mass: float) -> WingDefinition:
    """Two design panels on one zone spanning three bays."""
    return WingDefinition(
        planform=Planform(semi_span=4.0, root_chord=1.0, tip_chord=0.6),
        n_bays=3,
        box_chord_frac=(0.15, 0.6),
        box_height_frac=0.10,
        material=CFRP,
        zone_bounds=(0.0, 1.0),
        wall_panels=({"upper": 0, "lower": 0, "front": 1, "rear": 1},),
        zone_regions=(0,),
        aoa_stations=(0.4, 0.9),
        aileron=AileronDef(y_start=2.4, y_end=3.8),
        supported_mass=supported_mass,
        fixed_mass=5.0,
    )


def merit(report, weight=100.0):
    return report.f_best + weight * report.violation_best


def test_cantilever_tip_response_matches_closed_form():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    for _ in range(12):
        ea = 10.0 ** rng.uniform(8, 10)
        ga = 10.0 ** rng.uniform(7, 9)
        gj = 10.0 ** rng.uniform(4, 6)
        ei2 = 10.0 ** rng.uniform(4, 6)
        ei3 = 10.0 ** rng.uniform(4, 6)
        length = rng.uniform(1.5, 4.0)
        n_elem = int(rng.integers(1, 9))
        sec = prescribed_section(ea, ga, ga, gj, ei2, ei3, mu=5.0, i_polar=1e-2)
        m = cantilever_model(sec, length, n_elem)
        tip = 6 * (m.n_nodes - 1)

        force = rng.choice([-1.0, 1.0]) * rng.uniform(1e2, 2e3)
        f = np.zeros(m.n_dof)
        f[tip + 2] = force
        w = m.static_solve(f)[tip + 2]
        expect = force * length**3 / (3.0 * ei2) + force * length / ga
        assert abs(w - expect) <= 1e-8 * abs(expect)

        torque = rng.choice([-1.0, 1.0]) * rng.uniform(1e1, 2e2)
        f = np.zeros(m.n_dof)
        f[tip + 3] = torque
        rx = m.static_solve(f)[tip + 3]
        expect = torque * length / gj
        assert abs(rx - expect) <= 1e-8 * abs(expect)
    assert time.perf_counter() - t0 < 1.0


def test_box_section_stiffness_matches_thin_wall_theory():
    t0 = time.perf_counter()
    w, h, t = 0.9, 0.24, 4.0e-3
    walls = {k: PanelDesign(QI, t) for k in ("upper", "lower", "front", "rear")}
    c = box_section(w, h, walls, ISO).build().C
    per = 2.0 * (w + h)
    ea = E_ISO * t * per
    ei2 = E_ISO * t * (w * h**2 / 2.0 + h**3 / 6.0)
    ei3 = E_ISO * t * (h * w**2 / 2.0 + w**3 / 6.0)
    gj = 4.0 * (w * h) ** 2 * G_ISO * t / per
    for got, expect in ((c[0, 0], ea), (c[4, 4], ei2), (c[5, 5], ei3), (c[3, 3], gj)):
        assert abs(got - expect) <= 1e-6 * expect
    assert time.perf_counter() - t0 < 1.0


def test_cantilever_bending_frequencies_match_euler_bernoulli():
    t0 = time.perf_counter()
    mu, ei, length = 7.5, 1.2e5, 2.7
    # bending about one soft axis; everything else stiff, rotary inertia tiny
    sec = prescribed_section(1e9, 1e9, 1e9, 4e5, ei, 7 * ei, mu=mu, i_polar=1e-8)
    m = cantilever_model(sec, length, 64)
    res = m.modal(10)
    beta_l = np.array([1.8751040687119611, 4.694091132974175, 7.854757438237613])
    expect = beta_l**2 * np.sqrt(ei / (mu * length**4))
    trans = np.concatenate([np.arange(i, m.n_dof, 6) for i in (0, 1, 2)])
    z_modes = [
        k
        for k in range(res.omega.size)
        if np.linalg.norm(res.shapes[2::6, k])
        > 0.9 * np.linalg.norm(res.shapes[trans, k])
    ]
    got = res.omega[z_modes[:3]]
    assert np.all(np.abs(got - expect) <= 1e-2 * expect)
    gram = res.shapes.T @ m.mass() @ res.shapes
    assert np.abs(gram - np.eye(res.omega.size)).max() < 1e-10
    assert time.perf_counter() - t0 < 5.0


def test_buckling_matches_euler_load_and_determinant_sweep():
    ei, length, p_ref = 1.2e5, 2.7, 1.0e3
    sec = prescribed_section(2.1e9, 1e12, 1e12, 3.5e5, ei, 4.1e5, mu=7.5, i_polar=2.1e-2)

    def axial_tip_load(m):
        f = np.zeros(m.n_dof)
        f[6 * (m.n_nodes - 1)] = -p_ref
        return f

    m64 = cantilever_model(sec, length, 64)
    lam64 = m64.buckling(axial_tip_load(m64), n_modes=1).factors[0]
    euler = np.pi**2 * ei / (4.0 * length**2)
    assert abs(lam64 * p_ref - euler) <= 2e-2 * euler

    # independent root find: sweep the determinant sign, then bisect
    m4 = cantilever_model(sec, length, 4)
    f4 = axial_tip_load(m4)
    lam4 = m4.buckling(f4, n_modes=1).factors[0]
    ix = np.ix_(m4.free, m4.free)
    k = m4.stiffness()[ix]
    kg = m4.geometric_stiffness(m4.static_solve(f4))[ix]

    def det_sign(s):
        return np.linalg.slogdet(k + s * kg)[0]

    grid = np.linspace(0.02 * lam4, 3.0 * lam4, 2001)
    signs = np.array([det_sign(s) for s in grid])
    first = int(np.flatnonzero(signs[:-1] * signs[1:] < 0)[0])
    lo, hi = grid[first], grid[first + 1]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if det_sign(mid) > 0:
            lo = mid
        else:
            hi = mid
    lam_det = 0.5 * (lo + hi)
    assert abs(lam4 - lam_det) <= 5e-3 * lam_det


def test_lattice_limits_and_load_transfer_conservation():
    # high aspect ratio recovers the thin-airfoil lift slope
    lat = build_lattice(Planform(50.0, 1.0, 1.0), nx=1, ny=40)
    alpha = 1e-3
    res = steady_solve(lat, FlowConditions(V=40.0, rho=1.0, alpha=alpha))
    assert abs(res.cl / alpha - 2.0 * np.pi) <= 0.05 * 2.0 * np.pi

    # no incidence, no circulation
    lat0 = build_lattice(Planform(10.0, 1.2, 0.8), nx=2, ny=8)
    res0 = steady_solve(lat0, FlowConditions(V=50.0, rho=1.2, alpha=0.0))
    assert np.abs(res0.gamma).max() < 1e-12
    assert abs(res0.cl) < 1e-12

    # nodal transfer preserves total force and moment
    span = 9.0
    lat_c = build_lattice(Planform(span, 1.4, 0.7), nx=2, ny=10)
    y = np.linspace(0.0, span, 7)
    nodes = np.column_stack([np.full(7, 0.35), y, np.zeros(7)])
    t_load, _, _ = coupling_maps(lat_c, nodes)
    res_c = steady_solve(lat_c, FlowConditions(V=60.0, rho=1.1, alpha=0.03))
    f = t_load @ res_c.panel_lift
    assert abs(f[2::6].sum() - res_c.total_lift) <= 1e-13 * abs(res_c.total_lift)
    mx = f[3::6].sum() + np.sum(nodes[:, 1] * f[2::6])
    my = f[4::6].sum() - np.sum(nodes[:, 0] * f[2::6])
    mx_ref = np.sum(lat_c.load_pts[:, 1] * res_c.panel_lift)
    my_ref = -np.sum(lat_c.load_pts[:, 0] * res_c.panel_lift)
    assert abs(mx - mx_ref) <= 1e-13 * abs(mx_ref)
    assert abs(my - my_ref) <= 1e-13 * abs(my_ref)


def test_divergence_and_flutter_match_independent_oracles():
    t0 = time.perf_counter()

    # rigid wing on a root torsion spring: the one-dof pitch closed form
    # q_div = K_alpha / (e c S CL_alpha) with every factor measured
    gj_s, l_s, big = 2.0e4, 0.25, 1.0e9
    spring = prescribed_section(big, big, big, gj_s, big, big, mu=1.0, i_polar=1e-3)
    rigid = prescribed_section(big, big, big, big, big, big, mu=1.0, i_polar=1e-3)
    nodes = np.array([[0.4, -l_s, 0.0], [0.4, 0.0, 0.0], [0.4, 4.0, 0.0]])
    model = BeamModel(
        nodes,
        [ElementDef((0, 1), spring), ElementDef((1, 2), rigid)],
        fixed_dofs=np.arange(6),
    )
    lat = build_lattice(Planform(4.0, 1.0, 1.0), nx=2, ny=8)
    flow = FlowConditions(V=30.0, rho=1.2)
    ops = aero_operators(lat, flow, model.nodes)
    k_alpha = gj_s / l_s
    lift_slope = ops.f_alpha[2::6].sum()  # dL/dalpha at this q
    mom_slope = ops.f_alpha[4::6].sum()  # dM/dalpha about the axis (nodes on it)
    cl_alpha = lift_slope / (flow.q * lat.area)
    offset = mom_slope / lift_slope  # e times c
    q_formula = k_alpha / (offset * lat.area * cl_alpha)
    q_code = divergence_factor(model, ops) * flow.q
    assert abs(q_code - q_formula) <= 2e-2 * q_formula

    # flutter crossing against a speed sweep plus plain bisection
    span, x_ea = 8.0, 0.4
    mu_w, ip, cg_aft = 18.0, 0.35, 0.12
    # local y points forward (upstream), so an aft cg sits at negative y
    m_sec = mu_w * _inertia_map(-cg_aft, 0.0)
    m_sec[3, 3] += ip
    m_sec[4, 4] += 0.5 * ip
    m_sec[5, 5] += 0.5 * ip
    sec = SectionProperties(
        C=np.diag([1e9, 1e8, 1e8, 1.2e4, 1.7e5, 4e6]).astype(float),
        M=m_sec,
        mu=mu_w,
        reference=np.zeros(2),
        enclosed_area=0.0,
        recovery=(),
        panel_arc_length={},
    )
    yw = np.linspace(0.0, span, 9)
    wnodes = np.column_stack([np.full(yw.size, x_ea), yw, np.zeros(yw.size)])
    wing = BeamModel(
        wnodes,
        [ElementDef((i, i + 1), sec) for i in range(8)],
        fixed_dofs=np.arange(6),
    )
    wlat = build_lattice(Planform(span, 1.0, 1.0), nx=2, ny=12)

    def flow_of_v(v):
        return FlowConditions(V=v, rho=1.2)

    c_s = rayleigh_damping(wing)

    def margin(v):
        ops_v = aero_operators(wlat, flow_of_v(v), wing.nodes)
        return dynamic_stability(wing, ops_v, c_s=c_s).max_real

    grid = np.linspace(5.0, 120.0, 47)
    vals = np.array([margin(v) for v in grid])
    first = int(np.flatnonzero((vals[:-1] < 0.0) & (vals[1:] >= 0.0))[0])
    lo, hi = grid[first], grid[first + 1]
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if margin(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    v_oracle = 0.5 * (lo + hi)
    vc = critical_speed(wing, wlat, flow_of_v, 5.0, 120.0, tol=1e-5)
    assert abs(vc - v_oracle) <= 2e-2 * v_oracle
    assert time.perf_counter() - t0 < 30.0


def test_constraint_gradients_match_central_differences():
    t0 = time.perf_counter()
    defn = toy_wing(supported_mass=150.0)
    lc = LoadCase(
        V=70.0, rho=1.225, load_factor=2.5, alpha_min=-0.3, alpha_max=0.6, eta_min=0.05
    )
    lf = make_lf(defn, [lc], FidelityConfig(mesh_factor=1, lattice_nx=2, lattice_ny=6))
    lay = lf.layout
    # feasibility rows and the mass gradient are exact; eigenvalue-backed
    # rows get the loose band; the remaining rows are smooth solves and are
    # probed at a step distinct from the one the analysis differentiates at
    eigen_rows = np.array([cat in ("b", "ds") for cat in lay.category])
    closed_rows = np.array([cat == "feas" for cat in lay.category])

    rng = np.random.default_rng(7)
    for _ in range(5):
        stacks = [
            rng.uniform(-np.pi / 2, np.pi / 2, size=rng.integers(4, 9))
            for _ in range(2)
        ]
        ts = rng.uniform(2.5e-3, 3.5e-3, size=2)
        x = pack_design(
            [PanelDesign(lp_from_stack(s), t) for s, t in zip(stacks, ts)]
        )
        out = lf.evaluate(x)
        assert np.max(out.c[lay.rows(-1, "feas")]) <= 1e-9  # realizable draw
        gr = lf.gradients(x)

        fd = np.empty_like(gr.grad_c)
        fd_f = np.empty(x.size)
        for i in range(x.size):
            h = 3.0e-6 * (1.0 + abs(x[i]))
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            op, om = lf.evaluate(xp), lf.evaluate(xm)
            fd[:, i] = (op.c - om.c) / (2.0 * h)
            fd_f[i] = (op.f - om.f) / (2.0 * h)

        assert np.max(np.abs(gr.grad_f - fd_f) / (1.0 + np.abs(fd_f))) <= 1e-7
        live = out.mask & ~gr.nonsmooth
        diff = np.abs(gr.grad_c - fd) / (
            1.0 + np.maximum(np.abs(gr.grad_c), np.abs(fd))
        )
        assert np.nanmax(diff[closed_rows & live]) <= 1e-7
        assert np.nanmax(diff[eigen_rows & live]) <= 1e-4
        assert np.nanmax(diff[live & ~closed_rows & ~eigen_rows]) <= 1e-4
    assert time.perf_counter() - t0 < 120.0


def test_random_symmetric_stacks_satisfy_feasibility_residuals():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = -np.inf
    for _ in range(10_000):
        n = int(rng.integers(1, 13))
        lp = lp_from_stack(rng.uniform(-np.pi / 2, np.pi / 2, size=n))
        worst = max(worst, float(feasibility_residuals(lp).max()))
    assert worst <= 1e-9
    assert time.perf_counter() - t0 < 10.0


def test_corrected_model_consistent_at_every_trust_center():
    # the loop re-checks this internally each iteration and raises on a
    # breach; here the corrections are rebuilt from scratch at every center
    # the run accepted and verified independently
    lf, hf, x0, _, _ = quadratic_benchmark_pair()
    rep = trmm_optimize(lf, hf, x0, budget=60)
    centers = [e.x for e in rep.trace if e.accepted]
    assert centers
    for xc in centers:
        lo, ho = lf.evaluate(xc), hf.evaluate(xc)
        lg, hg = lf.gradients(xc), hf.gradients(xc)
        corr = build_correction(xc, lo, ho, lg, hg)
        e_val, e_grad = verify_consistency(corr, lo, ho, lg, hg)
        assert e_val <= 1e-12
        assert e_grad <= 1e-10


def test_multifidelity_matches_baseline_with_half_the_evaluations():
    t0 = time.perf_counter()

    # closed-form pair
    lf_a, hf_a, x0_a, _, _ = quadratic_benchmark_pair()
    mf_a = trmm_optimize(lf_a, hf_a, x0_a, budget=200)
    sf_a = trmm_optimize(hf_a, hf_a, x0_a, budget=400)
    assert mf_a.violation_best <= 1e-8 and sf_a.violation_best <= 1e-8
    assert abs(merit(mf_a) - merit(sf_a)) <= 1e-4
    assert mf_a.n_hf_evals <= 0.5 * sf_a.n_hf_evals

    # two-panel wing against the torsion-knocked-down refined level
    defn = toy_wing(supported_mass=1200.0)
    lc = LoadCase(
        V=90.0, rho=1.225, load_factor=2.5, alpha_min=-0.3, alpha_max=0.6, eta_min=0.05
    )
    lf = make_lf(defn, [lc], FidelityConfig(mesh_factor=1, lattice_nx=2, lattice_ny=6))
    hf = make_hf(
        defn,
        [lc],
        FidelityConfig(mesh_factor=2, lattice_nx=2, lattice_ny=12, torsion_knockdown=0.8),
    )
    # ply angles below are radians; they wrap onto a mixed laminate whose
    # design point is interior-feasible at both levels
    x0 = pack_design(
        [
            PanelDesign(lp_from_stack([45.0, -45.0, 0.0, 90.0, 0.0, -45.0, 45.0]), 3.0e-3),
            PanelDesign(lp_from_stack([45.0, -45.0, 45.0, -45.0]), 2.8e-3),
        ]
    )
    assert lf.evaluate(x0).max_violation() <= 1e-8
    assert hf.evaluate(x0).max_violation() <= 1e-8
    mf = trmm_optimize(lf, hf, x0, budget=40, max_iter=30)
    sf = trmm_optimize(hf, hf, x0, budget=4000, max_iter=30)
    assert mf.violation_best <= 1e-6
    assert sf.violation_best <= 1e-6
    assert abs(merit(mf) - merit(sf)) <= 1e-2 * merit(sf)
    assert mf.n_hf_evals <= 0.5 * sf.n_hf_evals
    assert time.perf_counter() - t0 < 600.0


def test_model_comparisons_reproduce_expected_patterns():
    t0 = time.perf_counter()
    defn = toy_wing(supported_mass=150.0)
    panels = [
        PanelDesign(lp_from_stack(np.deg2rad([45, -45, 0, 90, 0, -45, 45])), 2.5e-3),
        PanelDesign(lp_from_stack(np.deg2rad([45, -45, 45, -45])), 2.0e-3),
    ]

    def build(mesh, knockdown=1.0, ny=6):
        fid = FidelityConfig(
            mesh_factor=mesh, lattice_nx=2, lattice_ny=ny, torsion_knockdown=knockdown
        )
        return build_wing_model(defn, panels, fid)

    # knocked-down torsion shows up in twist, not bending
    rep1 = compare_static(build(1), build(2, knockdown=0.76))
    assert rep1.relative_errors["bending"] < 0.10
    assert rep1.relative_errors["torsion"] > 0.15
    assert rep1.flags["bending_below_threshold"]
    assert rep1.flags["torsion_above_threshold"]

    # same physics, refined mesh: the first five modes stay paired
    rep2 = compare_modal(build(1), build(2), n_modes=8)
    assert np.all(np.diag(rep2.mac)[:5] > 0.95)
    assert rep2.flags["matched_modes"]

    # high subsonic flow point on a converged mesh pair, complex shapes
    flow = FlowConditions(V=140.0, rho=0.36, mach=0.69)
    rep3 = compare_aeroelastic(build(4, ny=12), build(8, ny=12), flow)
    assert np.all(np.diag(rep3.mac)[:5] > 0.9)
    assert rep3.flags["matched_modes"]
    assert time.perf_counter() - t0 < 300.0


def test_constraint_layout_length_and_bit_determinism():
    cfg = FidelityConfig(mesh_factor=1, lattice_nx=2, lattice_ny=6)
    lc = LoadCase(V=60.0, rho=1.225, load_factor=1.0, eta_min=0.05)
    lc2 = LoadCase(V=70.0, rho=1.0, load_factor=1.5, eta_min=0.05)
    lc3 = LoadCase(V=50.0, rho=1.1, load_factor=1.0, eta_min=0.05)

    defn_a = toy_wing(supported_mass=150.0)
    x_a = pack_design(
        [
            PanelDesign(lp_from_stack(np.deg2rad([45, -45, 0, 90, 0, -45, 45])), 2.5e-3),
            PanelDesign(lp_from_stack(np.deg2rad([45, -45, 45, -45])), 2.0e-3),
        ]
    )

    defn_b = WingDefinition(
        planform=Planform(semi_span=6.0, root_chord=1.4, tip_chord=0.7),
        n_bays=4,
        box_chord_frac=(0.2, 0.65),
        box_height_frac=0.11,
        material=CFRP,
        zone_bounds=(0.0, 0.5, 1.0),
        wall_panels=(
            {"upper": 0, "lower": 0, "front": 1, "rear": 1},
            {"upper": 2, "lower": 2, "front": 3, "rear": 3},
        ),
        zone_regions=(0, 1),
        aoa_stations=(0.3, 0.6, 0.9),
        aileron=AileronDef(y_start=3.6, y_end=5.4),
        supported_mass=200.0,
        fixed_mass=8.0,
    )
    x_b = pack_design(
        [
            PanelDesign(lp_from_stack(np.deg2rad([45, -45, 0, 90])), 3.0e-3),
            PanelDesign(lp_from_stack(np.deg2rad([45, -45, 45, -45])), 2.6e-3),
            PanelDesign(lp_from_stack(np.deg2rad([0, 45, -45, 90])), 2.8e-3),
            PanelDesign(lp_from_stack(np.deg2rad([30, -30, 0])), 2.4e-3),
        ]
    )

    defn_c = WingDefinition(
        planform=Planform(semi_span=6.0, root_chord=1.4, tip_chord=0.7),
        n_bays=3,
        box_chord_frac=(0.2, 0.65),
        box_height_frac=0.11,
        material=CFRP,
        zone_bounds=(0.0, 1.0),
        wall_panels=({"upper": 0, "lower": 0, "front": 0, "rear": 0},),
        zone_regions=(0,),
        aoa_stations=(0.5,),
        aileron=AileronDef(y_start=3.6, y_end=5.4),
        supported_mass=120.0,
        fixed_mass=4.0,
    )
    x_c = pack_design([PanelDesign(lp_from_stack(np.deg2rad([45, -45, 0, 90])), 2.8e-3)])

    for defn, lcs, x in (
        (defn_a, [lc], x_a),
        (defn_b, [lc, lc2], x_b),
        (defn_c, [lc, lc2, lc3], x_c),
    ):
        ana = make_lf(defn, lcs, cfg)
        n = constraint_length(
            len(lcs), defn.n_panels, defn.n_regions, len(defn.aoa_stations)
        )
        assert ana.layout.size == n
        assert ana.evaluate(x).c.size == n

    # identical bits from repeated evaluation, same object or a fresh one
    ana = make_lf(defn_a, [lc], cfg)
    first = ana.evaluate(x_a)
    again = ana.evaluate(x_a)
    fresh = make_lf(defn_a, [lc], cfg).evaluate(x_a)
    for other in (again, fresh):
        assert other.f == first.f
        assert other.c.tobytes() == first.c.tobytes()
        assert np.array_equal(other.mask, first.mask)
