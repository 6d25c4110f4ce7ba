"""Command-line front end.

Exit status: 0 on success, 1 for invalid input or configuration, 2 for a
numerical failure (including failed verification criteria).
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .beam_modal import CANTILEVER_ROOTS, PointForce, cantilever_frequencies
from .circuit_synthesis import ComponentCatalog, synthesize, tuning_crossing, tuning_curve
from .config import ProjectConfig, bundled_config_path, load_config
from .coupled_simulator import assemble, comparison_suite, from_modal_data, frequency_response
from .electric_network import LatticeNetwork, build_lattice_matrix, electric_modes
from .exceptions import InfeasibleTargetError, ModelInputError, SolverError
from .io import write_csv, write_report, write_text
from .network_optimizer import boundary_scan, design_network
from .pipeline import actuator_drive, coupling_inputs, physics_model
from .verification import run_all

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class Context:
    def __init__(self, args):
        path = args.config or bundled_config_path()
        self.cfg: ProjectConfig
        self.cfg, self.hash = load_config(path)
        self.out = Path(args.out or self.cfg.output.directory)
        self.mode = args.mode or self.cfg.default_mode()
        self.args = args

    def csv(self, name, columns, rows, units, description=""):
        path = write_csv(self.out / name, columns, rows, self.hash, units, description)
        print(f"wrote {path}")

    def report(self, name, payload, units):
        path = write_report(self.out / name, payload, self.hash, units)
        print(f"wrote {path}")


def _boundaries(ctx: Context, gamma_row, chi):
    net = ctx.cfg.network
    if net.alpha0 is not None:
        return (net.alpha0, net.alpha_n), None
    scan = boundary_scan(gamma_row, chi, net.scan_resolution)
    return scan.argmax, scan


def cmd_modal(ctx: Context) -> int:
    assembly, basis, couplings = physics_model(ctx.cfg)
    f_hz = basis.frequencies / (2 * math.pi)
    rows = [(i + 1, f_hz[i], basis.frequencies[i], basis.tip[i]) for i in range(basis.count)]
    print("mode  f [Hz]        omega [rad/s]")
    for r in rows:
        print(f"{r[0]:4d}  {r[1]:12.6f}  {r[2]:14.6f}")
    ctx.csv("modes.csv", ["mode", "f_hz", "omega_rad_s", "tip_shape"], rows, "Hz, rad/s, dimensionless")
    x = np.linspace(0.0, basis.length, 201)
    shapes = basis.deflection(x)
    ctx.csv(
        "mode_shapes.csv",
        ["x_m"] + [f"w{i + 1}" for i in range(basis.count)],
        [(x[k], *shapes[k]) for k in range(len(x))],
        "m, dimensionless (mass-normalized)",
    )
    if couplings is not None:
        ctx.csv(
            "couplings.csv",
            ["mode"] + [f"gamma_{j + 1}" for j in range(couplings.n)],
            [(i + 1, *couplings.gamma[i]) for i in range(couplings.modes)],
            "dimensionless",
        )
    if not assembly.patches and assembly.actuator is None:
        count = min(basis.count, len(CANTILEVER_ROOTS))
        exact = cantilever_frequencies(assembly.k_beam, assembly.rho_beam, assembly.length, count)
        err = np.abs(basis.frequencies[:count] / exact - 1)
        ok = bool(np.all(err[:3] <= 1e-3))
        print(f"analytic cantilever frequency check {'PASS' if ok else 'FAIL'} "
              f"(relative errors {', '.join(f'{e:.1e}' for e in err)})")
        return EXIT_OK if ok else EXIT_NUMERIC
    return EXIT_OK


def cmd_network(ctx: Context) -> int:
    table, _, _ = coupling_inputs(ctx.cfg, ctx.mode)
    g = table.gamma[0]
    (a0, an), _ = _boundaries(ctx, g, table.chi)
    lat = build_lattice_matrix(table.n, a0, an)
    modes = electric_modes(lat, table.chi)
    gammas = np.abs(g @ modes.vectors)
    print(f"boundaries alpha0 = {a0:g}, alpha_n = {an:g}; {lat.size} active nodes")
    print("mode  lambda          gamma (mechanical mode 1)")
    for h in range(modes.size):
        print(f"{h + 1:4d}  {modes.eigenvalues[h]:.10f}  {gammas[h]:.6f}")
    ctx.csv(
        "electric_modes.csv",
        ["mode", "lambda", "gamma"] + [f"psi_{j + 1}" for j in range(table.n)],
        [(h + 1, modes.eigenvalues[h], gammas[h], *modes.vectors[:, h]) for h in range(modes.size)],
        "dimensionless",
        f"alpha0={a0:g} alpha_n={an:g}",
    )
    return EXIT_OK


def cmd_boundary_scan(ctx: Context) -> int:
    table, _, _ = coupling_inputs(ctx.cfg, ctx.mode)
    res = ctx.args.grid or ctx.cfg.network.scan_resolution
    scan = boundary_scan(table.gamma[0], table.chi, res)
    ctx.csv("boundary_scan.csv", ["alpha0", "alpha_n", "gamma"], scan.triples(), "dimensionless",
            f"{int(scan.flagged.sum())} degenerate cells reported as nan")
    print(f"max gamma {scan.max:.6f} at (alpha0, alpha_n) = ({scan.argmax[0]:g}, {scan.argmax[1]:g}); "
          f"polished {scan.polished_max:.6f} at ({scan.polished[0]:.6g}, {scan.polished[1]:.6g})")
    return EXIT_OK


def _design(ctx: Context, kind: str):
    table, basis, assembly = coupling_inputs(ctx.cfg, ctx.mode)
    net = ctx.cfg.network
    alphas = (net.alpha0, net.alpha_n) if net.alpha0 is not None else None
    return design_network(
        kind, table.gamma[0], table.capacitances, table.omega1, alphas=alphas,
        rule=net.damping_rule, resolution=net.scan_resolution, source=ctx.mode,
    ), table, basis, assembly


def cmd_optimize(ctx: Context, kind: str) -> int:
    (report, _), _, _, _ = _design(ctx, kind)
    print(f"{kind.upper()} network, boundaries ({report.alpha0:g}, {report.alpha_n:g}), gamma = {report.gamma:.5f}")
    if report.L is not None:
        print(f"L_opt = {report.L:.2f} H")
    print(f"R_opt = {report.R / 1e3:.2f} kOhm")
    print(f"peak mobility = {report.hinf:.4f}")
    for k, v in sorted(report.extras.items()):
        print(f"  {k} = {v:.6g}" if isinstance(v, float) else f"  {k} = {v}")
    ctx.report(f"optimize_{kind}.json", report.to_dict(), "SI (H, Ohm, F, rad/s); gamma, beta, delta dimensionless")
    return EXIT_OK


def _zeta(ctx: Context, modes: int):
    raw = ctx.args.damping
    values = [float(v) for v in raw.split(",")] if raw else list(ctx.cfg.solver.zeta)
    if not values:
        return None
    if len(values) == 1:
        return values[0]
    if len(values) != modes:
        raise ModelInputError(f"--damping needs 1 or {modes} values, got {len(values)}")
    return np.array(values)


def cmd_respond(ctx: Context) -> int:
    (rl_rep, rl_net), table, basis, assembly = _design(ctx, "rl")
    r_rep, r_net = design_network("r", table.gamma[0], table.capacitances, table.omega1,
                                  alphas=(rl_rep.alpha0, rl_rep.alpha_n))
    if basis is not None:
        modes = min(ctx.cfg.solver.modes, basis.count)
        zeta = _zeta(ctx, modes)

        def make(net):
            return assemble(basis, table, net, zeta=zeta, modes=modes)

        drive = actuator_drive(assembly) or PointForce(basis.length)
        output = "tip"
    else:
        ratios = ctx.cfg.measured.frequency_ratios or [1.0]
        zeta = _zeta(ctx, len(ratios))

        def make(net):
            return from_modal_data(ratios, table.gamma, net, table.c, table.omega1, zeta=zeta)

        drive, output = None, "modal"
    variants = {"short": make(None), "R": make(r_net), "RL": make(rl_net)}
    points = ctx.args.grid or ctx.cfg.solver.grid_points
    top = ctx.cfg.solver.omega_max
    grid = np.linspace(top / points, top, points)
    hz = ctx.args.hz
    if hz:
        grid = grid * table.omega1 / (2 * math.pi)
    for name, sys_ in variants.items():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            resp = frequency_response(sys_, drive, grid, output=output, hz=hz)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        units = ("Hz" if hz else "dimensionless frequency") + (
            "; tip velocity per unit load (m/s per V or N)" if output == "tip" else "; modal mobility"
        )
        ctx.csv(
            f"response_{name}.csv",
            ["frequency", "real", "imag", "magnitude", "phase_rad"],
            zip(resp.frequency, resp.values.real, resp.values.imag, resp.magnitude, resp.phase),
            units,
            f"variant={name} structural_damping={sys_.metadata['structural_damping']}",
        )
    table_cmp = comparison_suite(variants, baseline="short", drive=drive, output=output)
    path = write_text(ctx.out / "comparison.csv", table_cmp.to_csv(), ctx.hash, "dimensionless frequency; peak magnitude; percent")
    print(f"wrote {path}")
    print(table_cmp.to_csv(), end="")
    ratio = table_cmp.peak("R", 1) / table_cmp.peak("RL", 1)
    print(f"mode-1 peak ratio R/RL = {ratio:.3f} (damping rule {ctx.cfg.network.damping_rule})")
    return EXIT_OK


def cmd_synth(ctx: Context) -> int:
    s = ctx.cfg.synthesis
    if not s.capacitors:
        raise ModelInputError("synthesis.capacitors is empty")
    cat = ComponentCatalog.standard(s.capacitors, s.resistor_min, s.resistor_max, s.extra_resistors)
    cat = ComponentCatalog(cat.resistors, cat.capacitors, s.tolerance, s.dielectric)
    table, _, _ = coupling_inputs(ctx.cfg, ctx.mode)
    if ctx.cfg.network.L_line is not None:
        L_line = ctx.cfg.network.L_line
    else:
        (rep, _), _, _, _ = _design(ctx, "rl")
        L_line = rep.L
    line = synthesize(L_line, "deboo-floating", cat, s.compose_capacitors)
    crossing = tuning_crossing(L_line, table.gamma[0], table.chi, table.c, table.omega1)
    target5 = s.terminal_target or crossing
    term = synthesize(target5, "antoniou-grounded", cat, s.compose_capacitors)
    print(f"line inductor, target {L_line:.4g} H:")
    print(line.netlist(), end="")
    print(f"terminal inductor (beta = 1 at L5 = {crossing:.3f} H), target {target5:.4g} H:")
    print(term.netlist(), end="")
    ctx.report("synthesis.json", {"line": line.to_dict(), "terminal": term.to_dict(), "beta_crossing_L5": crossing},
               "H, Ohm, F")
    path = write_text(ctx.out / "netlist.txt", line.netlist() + term.netlist(), ctx.hash, "H, Ohm, F")
    print(f"wrote {path}")
    L5 = np.linspace(0.0, L_line, 101)
    tc = tuning_curve(L_line, L5, table.gamma[0], table.chi, table.c, table.omega1)
    ctx.csv("tuning_curve.csv", ["L5_H", "alpha_n", "beta", "gamma", "lambda1"], tc.rows(), "H, dimensionless")
    return EXIT_OK


def cmd_verify(ctx: Context) -> int:
    results = run_all()
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {', '.join(map(str, failed))}" if failed else ""))
    return EXIT_NUMERIC if failed else EXIT_OK


COMMANDS = {
    "modal": (cmd_modal, "beam modes, shapes and couplings (physics mode)"),
    "network": (cmd_network, "electric eigenpairs of the lattice"),
    "boundary-scan": (cmd_boundary_scan, "first-mode coupling over the boundary square"),
    "optimize-rl": (lambda c: cmd_optimize(c, "rl"), "optimal RL network"),
    "optimize-r": (lambda c: cmd_optimize(c, "r"), "optimal R network"),
    "respond": (cmd_respond, "frequency responses: shorted, R and RL networks"),
    "synth": (cmd_synth, "synthetic inductor components and tuning curve"),
    "verify": (cmd_verify, "acceptance checks on the bundled dataset"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pemdamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pemdamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML configuration (default: bundled prototype)")
        p.add_argument("--out", help="output directory (default: output.directory from the config)")
        p.add_argument("--grid", type=int, help="grid size: frequency points, or scan points per axis")
        units = p.add_mutually_exclusive_group()
        units.add_argument("--hz", dest="hz", action="store_true", help="frequencies in Hz")
        units.add_argument("--dimensionless", dest="hz", action="store_false", help="frequencies scaled by omega1 (default)")
        p.add_argument("--mode", choices=("physics", "measured"), help="input mode (default: measured if present)")
        p.add_argument("--damping", help="modal damping ratios, comma separated (one value applies to all modes)")
        p.set_defaults(hz=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.grid is not None and args.grid < 3:
        print("error: --grid must be >= 3", file=sys.stderr)
        return EXIT_INPUT
    try:
        ctx = Context(args)
        return COMMANDS[args.command][0](ctx)
    except InfeasibleTargetError as exc:
        print(f"error: {exc} (achievable bounds {exc.bounds[0]:.4g} to {exc.bounds[1]:.4g} H)", file=sys.stderr)
        return EXIT_INPUT
    except (ModelInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        keys = ", ".join(sorted(exc.details)) or "none"
        print(f"numerical failure: {exc} (diagnostics: {keys})", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
