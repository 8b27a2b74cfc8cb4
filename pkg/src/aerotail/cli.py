"""Command-line entry point.

Subcommands: analyze (one analysis at one fidelity level), compare (one of
the three cross-model cases), optimize (trust-region mass minimization), and
validate-config.  Reports land in the output directory as CSV, JSON, and SVG;
the directory comes from --out, the AEROTAIL_OUT environment variable, or the
config document, in that order of precedence.

Exit codes: 0 success, 2 configuration rejected, 3 analysis failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .aero import FlowConditions, aero_operators
from .aeroelastic import dynamic_stability, static_aeroelastic
from .compare import compare_aeroelastic, compare_modal, compare_static
from .config import ConfigError, load_config
from .constraints import GRAVITY
from .fidelity import make_hf, make_lf
from .mfopt import trmm_optimize
from .report import (
    comparison_rows,
    convergence_trace,
    eigenvalue_scatter,
    mac_heatmap,
    report_payload,
    write_csv,
    write_json,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ANALYSIS = 3

ANALYZE_CASES = ("static", "modal", "buckling", "flutter", "trim")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="aerotail",
        description="Composite wingbox aeroelastic tailoring toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run one analysis on one model")
    pa.add_argument("--case", required=True, choices=ANALYZE_CASES)
    pa.add_argument("--config", required=True)
    pa.add_argument("--level", default="LF", choices=("LF", "HF"))
    pa.add_argument("--modes", type=int, default=8)
    pa.add_argument("--out", default=None)

    pc = sub.add_parser("compare", help="cross-check the two models")
    pc.add_argument("--case", required=True, type=int, choices=(1, 2, 3))
    pc.add_argument("--config", required=True)
    pc.add_argument("--out", default=None)

    po = sub.add_parser("optimize", help="trust-region mass minimization")
    po.add_argument("--config", required=True)
    po.add_argument("--budget", type=int, default=None,
                    help="override the configured high-fidelity budget")
    po.add_argument("--out", default=None)

    pv = sub.add_parser("validate-config", help="check a config document")
    pv.add_argument("--config", required=True)
    return p


def _output_dir(args, cfg) -> str:
    out = args.out or os.environ.get("AEROTAIL_OUT") or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    return out


def _flow(lc) -> FlowConditions:
    return FlowConditions(V=lc.V, rho=lc.rho, alpha=lc.alpha, mach=lc.mach)


def _build(cfg, level):
    if level == "LF":
        return make_lf(cfg.definition, cfg.loadcases, cfg.lf_fidelity)
    return make_hf(cfg.definition, cfg.loadcases, cfg.hf_fidelity)


def _analyze(args, cfg, out) -> None:
    analysis = _build(cfg, args.level)
    model = analysis.build_model(cfg.initial_design())
    beam = model.beam
    tag = f"{args.case}_{args.level}"
    if args.case == "static":
        tip = beam.n_nodes - 1
        fz = np.zeros(beam.n_dof)
        fz[6 * tip + 2] = 1.0
        my = np.zeros(beam.n_dof)
        my[6 * tip + 4] = 1.0
        uz = beam.static_solve(fz)
        ur = beam.static_solve(my)
        payload = {
            "case": "static",
            "level": args.level,
            "tip_deflection_per_unit_force": uz[6 * tip + 2],
            "tip_twist_per_unit_torque": ur[6 * tip + 4],
        }
        write_json(os.path.join(out, f"{tag}.json"), payload)
    elif args.case == "modal":
        res = beam.modal(args.modes)
        write_csv(
            os.path.join(out, f"{tag}.csv"),
            ["index", "omega_rad_s", "frequency_hz"],
            [[i, w, w / (2.0 * np.pi)] for i, w in enumerate(res.omega)],
        )
        write_json(
            os.path.join(out, f"{tag}.json"),
            {"case": "modal", "level": args.level, "omega": res.omega},
        )
    elif args.case == "buckling":
        lc = cfg.loadcases[0]
        flow = _flow(lc)
        ops = aero_operators(model.lattice, flow, beam.nodes)
        factor = lc.load_factor if lc.load_factor is not None else 1.0
        fe = beam.gravity_load(g=GRAVITY * factor)
        trim = None
        if lc.load_factor is not None:
            trim = lc.load_factor * GRAVITY * (
                cfg.definition.supported_mass + beam.total_mass()
            )
        res = static_aeroelastic(beam, ops, flow, extra_loads=fe, trim_lift=trim)
        loads = ops.K_a @ res.u + ops.f_alpha * res.alpha + fe
        buck = beam.buckling(loads, n_modes=8)
        payload = {
            "case": "buckling",
            "level": args.level,
            "load_case": lc.name,
            "factors": buck.factors,
            "note": "" if buck.factors.size else
            "no compressive prestress under this load case",
        }
        write_json(os.path.join(out, f"{tag}.json"), payload)
        write_csv(
            os.path.join(out, f"{tag}.csv"),
            ["index", "factor"],
            [[i, v] for i, v in enumerate(buck.factors)],
        )
    elif args.case == "flutter":
        rows = []
        eigs_per_case = {}
        for lc in cfg.loadcases:
            ops = aero_operators(model.lattice, _flow(lc), beam.nodes)
            res = dynamic_stability(beam, ops, n_keep=args.modes)
            eigs_per_case[lc.name or f"case_{len(eigs_per_case)}"] = res.eigenvalues
            for i, z in enumerate(res.eigenvalues):
                rows.append([i, lc.name, z.real, z.imag])
        write_csv(
            os.path.join(out, f"{tag}.csv"),
            ["index", "load_case", "real", "imag"],
            rows,
        )
        write_json(
            os.path.join(out, f"{tag}.json"),
            {
                "case": "flutter",
                "level": args.level,
                "eigenvalues": eigs_per_case,
                "max_real": max(float(v[0].real) for v in eigs_per_case.values()),
            },
        )
        first = next(iter(eigs_per_case.values()))
        eigenvalue_scatter(
            os.path.join(out, f"{tag}.svg"), first, first,
            title=f"State eigenvalues ({args.level})",
        )
    else:  # trim
        results = {}
        rows = []
        for lc in cfg.loadcases:
            ops = aero_operators(model.lattice, _flow(lc), beam.nodes)
            factor = lc.load_factor if lc.load_factor is not None else 1.0
            fe = beam.gravity_load(g=GRAVITY * factor)
            trim = None
            if lc.load_factor is not None:
                trim = lc.load_factor * GRAVITY * (
                    cfg.definition.supported_mass + beam.total_mass()
                )
            res = static_aeroelastic(beam, ops, _flow(lc), extra_loads=fe,
                                     trim_lift=trim)
            tip = beam.n_nodes - 1
            name = lc.name or f"case_{len(results)}"
            results[name] = {
                "alpha_rad": res.alpha,
                "total_lift": res.total_lift,
                "tip_deflection": res.u[6 * tip + 2],
                "tip_twist": res.u[6 * tip + 4],
            }
            rows.append([len(rows), name, res.alpha, res.total_lift,
                         res.u[6 * tip + 2], res.u[6 * tip + 4]])
        write_json(os.path.join(out, f"{tag}.json"),
                   {"case": "trim", "level": args.level, "results": results})
        write_csv(
            os.path.join(out, f"{tag}.csv"),
            ["index", "load_case", "alpha_rad", "total_lift", "tip_deflection",
             "tip_twist"],
            rows,
        )


def _compare(args, cfg, out) -> None:
    lf = _build(cfg, "LF").build_model(cfg.initial_design())
    hf = _build(cfg, "HF").build_model(cfg.initial_design())
    if args.case == 1:
        rep = compare_static(lf, hf)
        header, rows = comparison_rows(
            rep.lf_values, rep.hf_values,
            {"tip_deflection": rep.relative_errors["bending"],
             "tip_twist": rep.relative_errors["torsion"]},
        )
        write_csv(os.path.join(out, "case1_comparison.csv"), header, rows)
        write_json(os.path.join(out, "case1_report.json"), report_payload(rep))
        return
    if args.case == 2:
        rep = compare_modal(lf, hf)
        header, rows = comparison_rows(rep.lf_values, rep.hf_values,
                                       rep.relative_errors)
        write_csv(os.path.join(out, "case2_frequencies.csv"), header, rows)
        mac_heatmap(os.path.join(out, "case2_mac.svg"), rep.mac,
                    title="Structural MAC")
        write_json(os.path.join(out, "case2_report.json"), report_payload(rep))
        return
    lc = cfg.loadcases[0]
    rep = compare_aeroelastic(lf, hf, _flow(lc))
    lf_eigs = rep.eigenvalue_tables["lf_eigenvalues"]
    hf_eigs = rep.eigenvalue_tables["hf_eigenvalues"]
    for part, name in ((np.real, "real"), (np.imag, "imag")):
        a = part(lf_eigs)
        b = part(hf_eigs)
        rows = [
            [i, a[i], b[i],
             abs(a[i] - b[i]) / abs(b[i]) if b[i] != 0.0 else 0.0]
            for i in range(len(a))
        ]
        write_csv(
            os.path.join(out, f"case3_eigenvalues_{name}.csv"),
            ["index", "lf_value", "hf_value", "relative_error"],
            rows,
        )
    eigenvalue_scatter(os.path.join(out, "case3_eigenvalues.svg"), lf_eigs,
                       hf_eigs, title="Aeroelastic eigenvalues")
    mac_heatmap(os.path.join(out, "case3_mac.svg"), rep.mac,
                title="Aeroelastic complex MAC")
    write_json(os.path.join(out, "case3_report.json"), report_payload(rep))


def _optimize(args, cfg, out) -> None:
    lf, hf = cfg.analyses()
    kwargs = cfg.optimizer.kwargs()
    if args.budget is not None:
        kwargs["budget"] = args.budget
    report = trmm_optimize(lf, hf, cfg.initial_design(), **kwargs)
    payload = report.summary()
    payload["x_best"] = report.x_best
    payload["trace"] = [
        {
            "f_hf": t.f_hf,
            "violation": t.violation,
            "delta": t.delta,
            "rho": t.rho,
            "accepted": t.accepted,
            "restoration": t.restoration,
        }
        for t in report.trace
    ]
    write_json(os.path.join(out, "optimize.json"), payload)
    write_csv(
        os.path.join(out, "optimize_trace.csv"),
        ["index", "f_hf", "violation", "delta", "rho", "accepted"],
        [
            [i, t.f_hf, t.violation, t.delta, t.rho, int(t.accepted)]
            for i, t in enumerate(report.trace)
        ],
    )
    convergence_trace(os.path.join(out, "optimize_trace.svg"), report.trace)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate-config":
        print(
            f"config OK: {cfg.definition.n_panels} panels, "
            f"{len(cfg.loadcases)} load cases, "
            f"{cfg.definition.n_variables} design variables"
        )
        return EXIT_OK

    out = _output_dir(args, cfg)
    try:
        if args.command == "analyze":
            _analyze(args, cfg, out)
        elif args.command == "compare":
            _compare(args, cfg, out)
        else:
            _optimize(args, cfg, out)
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: analysis: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    print(f"wrote {args.command} outputs to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
