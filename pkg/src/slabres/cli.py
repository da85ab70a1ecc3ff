"""Command-line interface.

Subcommands: solve, sweep, modes, trace, model, fit, validate.  All data
files are written atomically with a provenance header; repeated invocations
with identical arguments and config produce byte-identical output.

Exit codes: 0 success, 1 usage error, 2 invalid config/model, 3 numerical
failure, 4 requested point outside the single-order region without
--allow-outside.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .anomaly import (figure_data, make_degenerate_model, make_full_background_model,
                      make_generic_model, model_eval, model_from_dict, model_to_dict,
                      validate_model)
from .errors import (ConfigError, ConvergenceError, DiscontinuityError,
                     GrazingOrderError, OutsideDiamondError, SingularSolveError,
                     SlabresError)
from .fitter import anomaly_report
from .modes import find_guided_modes, trace_dispersion
from .reports import (atomic_write_text, load_json_report, provenance_line,
                      render_matplotlib_figure, svg_transmittance_plot,
                      write_data_file, write_json_report)
from .scatter import SweepRow, SweepTable, format_sweep_csv, solve_scattering, transmittance_sweep
from .structure import load_config

_USAGE_EXIT = 1
_CONFIG_EXIT = 2
_NUMERICAL_EXIT = 3
_DIAMOND_EXIT = 4

#: flags whose values may start with '-' (negative numbers, ranges);
#: merged into --flag=value form before argparse sees them
_NUMERIC_FLAGS = {
    "--kappa", "--omega", "--window", "--kappa0", "--omega0", "--offsets",
    "--ktilde", "--wtilde", "--ell1", "--r1", "--r2", "--t2", "--r0", "--t0",
    "--gamma", "--sign", "--mark-omega",
}


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)
    log: str = ""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage to 1
        raise _UsageError(message)


def _merge_negative_values(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _NUMERIC_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse_grid(text: str) -> np.ndarray:
    """Grid syntax: 'lo:hi:count' for linspace, else a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise _UsageError(f"range must be lo:hi:count, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise _UsageError(f"range count must be >= 1, got {count}")
        return np.linspace(lo, hi, count)
    return np.array([float(v) for v in text.split(",") if v != ""])


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise _UsageError(f"window must be lo:hi, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_pair_or_scalar(text: str):
    vals = [complex(v) for v in text.split(",") if v != ""]
    if len(vals) == 1:
        return vals[0]
    return vals


def _build_parser() -> _Parser:
    parser = _Parser(prog="slabres", description=__doc__)
    parser.add_argument("--version", action="version", version=f"slabres {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="structure JSON document")
        p.add_argument("--nx", type=int, default=128)
        p.add_argument("--nz", type=int, default=128)
        p.add_argument("--out", help="output data file")
        p.add_argument("--svg", help="SVG figure output")
        p.add_argument("--fig", help="matplotlib figure output (png/pdf)")
        p.add_argument("--allow-outside", action="store_true")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("solve", help="single scattering solve")
    common(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--side", choices=("left", "right"), default="left")

    p = sub.add_parser("sweep", help="transmittance over a (kappa, omega) grid")
    common(p)
    p.add_argument("--kappa", required=True, help="comma list of kappa values")
    p.add_argument("--omega", required=True, help="omega grid lo:hi:count or comma list")
    p.add_argument("--mark-omega", type=float, help="vertical marker for figures")

    p = sub.add_parser("modes", help="locate guided modes in a frequency window")
    common(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--window", required=True, help="omega window lo:hi")
    p.add_argument("--coarse", type=int, default=200)

    p = sub.add_parser("trace", help="trace the complex dispersion root")
    common(p)
    p.add_argument("--kappa0", type=float, required=True)
    p.add_argument("--omega0", type=float, required=True)
    p.add_argument("--offsets", required=True, help="comma list of kappa offsets")

    p = sub.add_parser("model", help="evaluate an anomaly expansion model")
    common(p, config=False)
    p.add_argument("--family", required=True,
                   choices=("generic", "full_background", "degenerate"))
    p.add_argument("--ell1", default="0", help="scalar (pair for degenerate)")
    p.add_argument("--r1", help="pair for full_background")
    p.add_argument("--r2", help="scalar or pair")
    p.add_argument("--t2", help="scalar or pair")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--sign", type=int, default=1)
    p.add_argument("--direction", choices=("full_transmission", "full_reflection"),
                   default="full_transmission")
    p.add_argument("--ktilde", required=True, help="comma list of kappa offsets")
    p.add_argument("--wtilde", required=True, help="omega-offset grid lo:hi:count")
    p.add_argument("--save-model", help="write the validated model JSON")

    p = sub.add_parser("fit", help="fit anomaly coefficients from solver extrema")
    common(p)
    p.add_argument("--kappa0", type=float, required=True)
    p.add_argument("--omega0", type=float)
    p.add_argument("--window", help="mode-search window lo:hi when --omega0 absent")
    p.add_argument("--offsets", default="0.01,0.015,0.02,0.03")
    p.add_argument("--no-curves", action="store_true",
                   help="skip the extremal-curve continuation")

    p = sub.add_parser("validate", help="check an anomaly model document")
    p.add_argument("--model", required=True, help="model JSON document")
    p.add_argument("--out", help="write the validation report JSON")

    return parser


def _load_structure(path: str):
    try:
        with open(path) as handle:
            return load_config(handle.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _figures(args, curves, xlabel, marker, provenance, artifacts, title=""):
    if getattr(args, "svg", None):
        # provenance embedded as an XML comment; a '#' line would break SVG
        svg = svg_transmittance_plot(curves, xlabel, marker=marker, provenance=provenance)
        atomic_write_text(args.svg, svg)
        artifacts.append(args.svg)
    if getattr(args, "fig", None):
        render_matplotlib_figure(curves, xlabel, args.fig, marker=marker, title=title)
        artifacts.append(args.fig)


def _sweep_curves(table: SweepTable):
    curves = []
    for kappa in sorted({r.kappa for r in table.rows}):
        rows = [r for r in table.rows if r.kappa == kappa]
        x = np.array([r.omega for r in rows])
        y = np.array([r.transmittance for r in rows])
        curves.append((f"kappa={kappa:g}", x, y))
    return curves


def _cmd_solve(args, prov):
    s = _load_structure(args.config)
    sol = solve_scattering(s, args.kappa, args.omega, args.side, args.nx, args.nz,
                           allow_outside=args.allow_outside)
    log = (f"kappa={args.kappa:g} omega={args.omega:g} side={args.side}\n"
           f"R = {sol.R.real:+.12e} {sol.R.imag:+.12e}i\n"
           f"T = {sol.T.real:+.12e} {sol.T.imag:+.12e}i\n"
           f"transmittance = {sol.transmittance:.12e}\n"
           f"energy_defect = {sol.energy_defect:.3e}\n")
    artifacts = []
    if args.out:
        row = SweepRow(kappa=sol.kappa, omega=sol.omega, R=sol.R, T=sol.T,
                       transmittance=sol.transmittance, energy_defect=sol.energy_defect)
        write_data_file(args.out, format_sweep_csv(SweepTable((row,))), prov)
        artifacts.append(args.out)
    return CommandOutcome(0, artifacts, log)


def _cmd_sweep(args, prov):
    s = _load_structure(args.config)
    kappas = _parse_grid(args.kappa)
    omegas = _parse_grid(args.omega)
    table = transmittance_sweep(s, kappas, omegas, args.nx, args.nz,
                                allow_outside=args.allow_outside, threads=args.threads)
    artifacts = []
    if args.out:
        write_data_file(args.out, format_sweep_csv(table), prov)
        artifacts.append(args.out)
    _figures(args, _sweep_curves(table), "omega", getattr(args, "mark_omega", None),
             prov, artifacts)
    log = f"{len(table)} sweep points written\n"
    return CommandOutcome(0, artifacts, log)


def _cmd_modes(args, prov):
    s = _load_structure(args.config)
    lo, hi = _parse_window(args.window)
    modes = find_guided_modes(s, args.kappa, (lo, hi), args.nx, args.nz,
                              coarse=args.coarse)
    doc = {
        "kappa0": args.kappa,
        "window": [lo, hi],
        "nx": args.nx,
        "nz": args.nz,
        "modes": [{"omega0": om, "residual": res} for om, res in modes],
    }
    artifacts = []
    if args.out:
        write_json_report(args.out, doc, prov)
        artifacts.append(args.out)
    log = "".join(f"mode: omega0={om:.12g} residual={res:.3e}\n" for om, res in modes)
    return CommandOutcome(0, artifacts, log or "no modes found\n")


def _cmd_trace(args, prov):
    s = _load_structure(args.config)
    offsets = [float(v) for v in args.offsets.split(",") if v != ""]
    trace = trace_dispersion(s, args.kappa0, args.omega0, offsets, args.nx, args.nz)
    doc = {
        "kappa0": trace.kappa0,
        "omega0": trace.omega0,
        "residual": trace.fit_residual,
        "ell1": trace.ell1,
        "ell2": None if trace.ell2 is None else [trace.ell2.real, trace.ell2.imag],
        "samples": [[k, om.real, om.imag] for k, om in trace.samples],
        "failures": list(trace.failures),
    }
    artifacts = []
    if args.out:
        write_json_report(args.out, doc, prov)
        artifacts.append(args.out)
    log = (f"{len(trace.samples)} roots traced; ell1={trace.ell1} ell2={trace.ell2}\n"
           + (f"failed offsets: {list(trace.failures)}\n" if trace.failures else ""))
    return CommandOutcome(0, artifacts, log)


def _build_model(args):
    if args.family == "generic":
        if args.r2 is None or args.t2 is None:
            raise _UsageError("generic model requires --r2 and --t2")
        return make_generic_model(complex(args.ell1).real, complex(args.r2),
                                  complex(args.t2), args.r0, args.t0, args.gamma)
    if args.family == "full_background":
        if args.r1 is None or args.r2 is None or args.t2 is None:
            raise _UsageError("full_background model requires --r1, --r2 and --t2")
        r1 = _parse_pair_or_scalar(args.r1)
        r2 = _parse_pair_or_scalar(args.r2)
        if not (isinstance(r1, list) and isinstance(r2, list)):
            raise _UsageError("--r1 and --r2 must be comma pairs for full_background")
        return make_full_background_model(complex(args.ell1).real, r1, r2,
                                          complex(args.t2), args.r0, args.gamma,
                                          args.sign, args.direction)
    ell1 = _parse_pair_or_scalar(args.ell1)
    r2 = _parse_pair_or_scalar(args.r2) if args.r2 else None
    t2 = _parse_pair_or_scalar(args.t2) if args.t2 else None
    if not (isinstance(ell1, list) and isinstance(r2, list) and isinstance(t2, list)):
        raise _UsageError("degenerate model requires comma pairs --ell1, --r2, --t2")
    return make_degenerate_model([v.real for v in ell1], r2, t2, args.r0, args.t0,
                                 args.gamma)


def _cmd_model(args, prov):
    model = _build_model(args)
    kts = [float(v.real) for v in map(complex, args.ktilde.split(","))]
    wts = _parse_grid(args.wtilde)
    rows = []
    for kt in kts:
        ell, a, b = model_eval(model, np.full(wts.shape, kt), wts)
        pa = np.abs(a) ** 2
        pb = np.abs(b) ** 2
        denom = pa + pb
        ok = (np.abs(ell) > 0) & (denom > 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            R = np.where(ok, a / np.where(np.abs(ell) > 0, ell, 1.0), np.nan)
            T = np.where(ok, b / np.where(np.abs(ell) > 0, ell, 1.0), np.nan)
            tr = np.where(ok, pb / np.where(denom > 0, denom, 1.0), np.nan)
        for i, wt in enumerate(wts):
            defect = (abs(R[i]) ** 2 + abs(T[i]) ** 2 - 1.0 if ok[i] else np.nan)
            rows.append(SweepRow(kappa=kt, omega=float(wt), R=complex(R[i]),
                                 T=complex(T[i]), transmittance=float(tr[i]),
                                 energy_defect=abs(defect)))
    rows.sort(key=lambda r: (r.kappa, r.omega))
    table = SweepTable(tuple(rows))
    artifacts = []
    if args.out:
        write_data_file(args.out,
                        format_sweep_csv(table, kappa_name="ktilde", omega_name="wtilde"),
                        prov)
        artifacts.append(args.out)
    if args.save_model:
        write_json_report(args.save_model, model_to_dict(model), prov)
        artifacts.append(args.save_model)
    fd = figure_data(model, kts, wts)
    curves = [(f"ktilde={kt:g}", fd.wtilde, fd.transmittance[i])
              for i, kt in enumerate(fd.ktilde)]
    _figures(args, curves, "wtilde", 0.0, prov, artifacts)
    return CommandOutcome(0, artifacts, f"{len(rows)} model points written\n")


def _cmd_fit(args, prov):
    s = _load_structure(args.config)
    omega0 = args.omega0
    if omega0 is None:
        if not args.window:
            raise _UsageError("fit requires --omega0 or --window")
        lo, hi = _parse_window(args.window)
        modes = find_guided_modes(s, args.kappa0, (lo, hi), args.nx, args.nz)
        if not modes:
            raise ConvergenceError("no guided mode found in the window")
        omega0 = modes[0][0]
    offsets = [float(v) for v in args.offsets.split(",") if v != ""]
    report = anomaly_report(s, args.kappa0, omega0, offsets, args.nx, args.nz,
                            trace_curves=not args.no_curves)
    artifacts = []
    if args.out:
        write_json_report(args.out, report, prov)
        artifacts.append(args.out)
    log = (f"omega0={report['omega0']:.12g} ell1={report['ell1']:.6g} "
           f"r2={report['r2']:.6g} t2={report['t2']:.6g} "
           f"r0={report['r0']:.6g} t0={report['t0']:.6g} "
           f"width_exponent={report['width_exponent']:.4g}\n")
    return CommandOutcome(0, artifacts, log)


def _cmd_validate(args, prov):
    try:
        doc = load_json_report(args.model)
        model = model_from_dict(doc, strict=False)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load model {args.model}: {exc}") from exc
    checks = validate_model(model)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        note = " (advisory)" if c.advisory else ""
        lines.append(f"[{status}] {c.constraint}{note}  residual={c.residual:.3e}")
    ok = all(c.passed for c in checks if not c.advisory)
    artifacts = []
    if args.out:
        write_json_report(args.out, {
            "model": doc,
            "checks": [{"constraint": c.constraint, "passed": c.passed,
                        "residual": c.residual, "advisory": c.advisory}
                       for c in checks],
            "valid": ok,
        }, prov)
        artifacts.append(args.out)
    return CommandOutcome(0 if ok else _CONFIG_EXIT, artifacts, "\n".join(lines) + "\n")


_DISPATCH = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "modes": _cmd_modes,
    "trace": _cmd_trace,
    "model": _cmd_model,
    "fit": _cmd_fit,
    "validate": _cmd_validate,
}


def run(argv: list[str]) -> CommandOutcome:
    """Dispatch a CLI invocation; never raises, errors map to exit codes."""
    argv = _merge_negative_values(list(argv))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        prov = provenance_line(args.subcommand, __version__, argv)
        return _DISPATCH[args.subcommand](args, prov)
    except _UsageError as exc:
        return CommandOutcome(_USAGE_EXIT, [], f"usage error: {exc}\n")
    except OutsideDiamondError as exc:
        return CommandOutcome(_DIAMOND_EXIT, [], f"outside diamond: {exc}\n")
    except ConfigError as exc:
        return CommandOutcome(_CONFIG_EXIT, [], f"invalid config: {exc}\n")
    except (ConvergenceError, GrazingOrderError, SingularSolveError,
            DiscontinuityError) as exc:
        return CommandOutcome(_NUMERICAL_EXIT, [], f"numerical failure: {exc}\n")
    except SlabresError as exc:
        return CommandOutcome(_NUMERICAL_EXIT, [], f"error: {exc}\n")
    except ValueError as exc:
        return CommandOutcome(_USAGE_EXIT, [], f"usage error: {exc}\n")


def main() -> None:
    outcome = run(sys.argv[1:])
    if outcome.log:
        stream = sys.stdout if outcome.exit_code == 0 else sys.stderr
        stream.write(outcome.log)
    sys.exit(outcome.exit_code)
