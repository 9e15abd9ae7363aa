"""giantspin command line.

    giantspin spectrum | barrier | resonance | wavefunction | sweep [options]

Defaults are the Fe8 parameters (S=10, D=0.275 K, E=0.046 K, g=2). A
``--config`` file of ``key = value`` lines (keys are flag names without the
leading dashes) supplies defaults; explicit flags win.

Exit codes: 0 ok, 2 usage / invalid parameters, 3 model domain, 4 numerical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import __version__, analytics, angle_model, giant_spin, sweep
from .core import (
    FE8,
    GiantSpinError,
    ModelDomainError,
    NumericalError,
    ParameterError,
    SpinParams,
    UnsupportedConfigurationError,
)
from .tables import FORMATS, Table

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4


def _flag(value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def _interval(value: str) -> str:
    if value not in angle_model.INTERVALS:
        raise argparse.ArgumentTypeError(f"interval must be one of {sorted(angle_model.INTERVALS)}")
    return value


def _format(value: str) -> str:
    if value not in FORMATS:
        raise argparse.ArgumentTypeError(f"format must be one of {FORMATS}")
    return value


# name -> (type, builtin default, help); None default means "derived"
OPTIONS: dict[str, tuple[Callable[[str], Any], Any, str]] = {
    "S": (float, FE8.S, "spin quantum number"),
    "D": (float, FE8.D, "axial anisotropy (K)"),
    "E": (float, FE8.E, "transverse anisotropy (K)"),
    "g": (float, FE8.g, "Lande g-factor"),
    "field": (float, 0.0, "parallel field H (T)"),
    "kmax": (int, None, "Fourier truncation |n| <= kmax (default 64 for S <= 10)"),
    "levels": (int, None, "number of levels / wavefunctions"),
    "grid-points": (int, angle_model.DEFAULT_GRID_POINTS, "wavefunction sample points"),
    "k-resonances": (int, 0, "locate minimum-gap fields for k = 1..K"),
    "format": (_format, "tsv", "output format: tsv or json"),
    "output": (str, None, "write output to this path instead of stdout"),
    "interval": (_interval, None, "sampling interval: standard (-pi, pi] or figure (-pi/2, 3pi/2]"),
    "companion": (_flag, False, "add V(phi) and M(phi) columns"),
    "angle": (_flag, False, "include angle-model levels in the sweep"),
    "h-max": (float, None, "sweep upper field (default 1.2 x cutoff)"),
    "points": (int, sweep.DEFAULT_SWEEP_POINTS, "number of sweep fields"),
    "matching-tol": (float, sweep.DEFAULT_MATCHING_TOL, "level matching tolerance (K)"),
    "workers": (int, 1, "processes for sweep evaluation"),
}

DEFAULT_LEVELS = {"spectrum": 4, "wavefunction": 2, "sweep": 10, "barrier": 4, "resonance": 4}


@dataclass
class RunConfig:
    command: str
    params: SpinParams
    options: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.options[key]

    @property
    def kmax(self) -> int:
        k = self.options.get("kmax")
        return angle_model.default_kmax(self.params.S) if k is None else k


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-")
            if not sep or key not in OPTIONS:
                raise ParameterError(f"{path}:{lineno}: unrecognised line {raw.strip()!r}")
            values[key] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name, (typ, _, help_text) in OPTIONS.items():
        if typ is _flag:
            common.add_argument(f"--{name}", type=typ, nargs="?", const=True, default=None, help=help_text)
        else:
            common.add_argument(f"--{name}", type=typ, default=None, help=help_text)
    common.add_argument("--locate", dest="k_resonances", type=int, default=None, help="alias of --k-resonances")
    common.add_argument("--config", default=None, help="key = value parameter file")

    parser = argparse.ArgumentParser(prog="giantspin", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "exact and angle-model levels"),
        ("barrier", "barrier heights and ground-state approximations"),
        ("resonance", "cutoff field and resonance increment"),
        ("wavefunction", "sampled angle-model wavefunctions"),
        ("sweep", "levels versus parallel field"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(ns.config) if ns.config else {}
    options: dict[str, Any] = {}
    for name, (typ, default, _) in OPTIONS.items():
        value = getattr(ns, name.replace("-", "_"))
        if value is None and name in file_values:
            try:
                value = typ(file_values[name])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ParameterError(f"config value for {name}: {exc}") from exc
        options[name] = default if value is None else value
    if options["levels"] is None:
        options["levels"] = DEFAULT_LEVELS[ns.command]
    if options["levels"] < 1:
        raise ParameterError("--levels must be positive")
    params = SpinParams(
        S=options["S"], D=options["D"], E=options["E"], g=options["g"], H_par=options["field"]
    )
    return RunConfig(ns.command, params, options)


def _provenance(config: RunConfig) -> dict[str, Any]:
    p = config.params
    return {"version": __version__, "S": p.S, "D": p.D, "E": p.E, "g": p.g, "H_par": p.H_par}


def cmd_spectrum(config: RunConfig) -> Table:
    p = config.params
    n = min(config["levels"], p.dim)
    exact = giant_spin.reference_spectrum(p, n)
    meta = _provenance(config)
    angle = None
    try:
        angle = angle_model.angle_spectrum(p, config.kmax, n)
        meta["kmax"] = config.kmax
        meta["angle_max_residual"] = angle.max_residual
    except ModelDomainError as exc:
        meta["angle_model"] = f"unavailable: {exc}"
    meta["exact_max_residual"] = exact.max_residual
    if p.H_par == 0:
        meta["splitting_exact"] = giant_spin.reference_splitting(p)
        if angle is not None:
            meta["splitting_angle"] = angle_model.angle_splitting(p, config.kmax)
    table = Table(
        "spectrum",
        ["level", "exact_K", "exact_parity", "exact_residual", "angle_K", "angle_sector", "angle_residual", "deviation_pct"],
        metadata=meta,
    )
    for i in range(n):
        e = float(exact.eigenvalues[i])
        row = [i, e, exact.labels[i] if exact.labels else None, float(exact.residuals[i])]
        if angle is not None and i < len(angle):
            a = float(angle.eigenvalues[i])
            dev = analytics.percent_deviation(a, e) if e != 0 else None
            row += [a, angle.labels[i], float(angle.residuals[i]), dev]
        else:
            row += [None, None, None, None]
        table.add(*row)
    return table


def cmd_barrier(config: RunConfig) -> Table:
    p = config.params
    if p.H_par != 0:
        raise UnsupportedConfigurationError("barrier analysis is defined at zero field")
    E_gs = angle_model.solve(p, config.kmax, 1)[0][0]
    E_ref = float(giant_spin.reference_spectrum(p, 1).eigenvalues[0])
    report = analytics.barrier_report(p, E_gs, E_ref)
    dev = report.deviations()
    meta = _provenance(config)
    meta.update(kmax=config.kmax, experimental_barrier_K=report.h_b_experimental)
    table = Table("barrier", ["quantity", "method", "value_K", "deviation_pct", "deviation_base"], metadata=meta)
    table.add("E_min", "potential minimum", report.E_min, None, None)
    table.add("V_max", "barrier top", report.V_max, None, None)
    table.add("E_gs", "exact", E_ref, None, None)
    for key, method in (("E_gs_numeric", "angle"), ("E_gs_harmonic", "harmonic"), ("E_gs_crude", "crude")):
        table.add("E_gs", method, getattr(report, key), *dev[key])
    table.add("omega", "harmonic", report.omega, None, None)
    for key, method in (("h_b_numeric", "angle"), ("h_b_harmonic", "harmonic"), ("h_b_crude", "crude")):
        table.add("h_b", method, getattr(report, key), *dev[key])
    table.add("h_b", "experimental", report.h_b_experimental, None, None)
    return table


def cmd_resonance(config: RunConfig) -> Table:
    p = config.params
    meta = _provenance(config)
    meta["experimental_H0_T"] = analytics.EXPERIMENTAL_H0_T
    table = Table("resonance", ["quantity", "k", "value_T", "reference_T", "deviation_pct", "gap_K"], metadata=meta)
    cutoff = analytics.field_cutoff(p)
    H0 = analytics.resonance_increment(p)
    table.add("field_cutoff", None, cutoff, None, None, None)
    table.add(
        "resonance_increment", 1, H0, analytics.EXPERIMENTAL_H0_T,
        analytics.percent_deviation(H0, analytics.EXPERIMENTAL_H0_T), None,
    )
    table.add("merge_field", None, analytics.merge_field(p), None, None, None)
    k_max = config["k-resonances"]
    if k_max:
        for match in sweep.locate_matchings(p, k_max):
            if match.k == 0:
                continue
            dev = None if not match.found else analytics.percent_deviation(match.H_min_gap, match.seed)
            table.add("min_gap_field", match.k, match.H_min_gap, match.seed, dev, match.gap)
    return table


def cmd_wavefunction(config: RunConfig) -> Table:
    p = config.params
    interval = config["interval"] or ("figure" if config["companion"] else "standard")
    levels = angle_model.solve(p, config.kmax, config["levels"], config["grid-points"], interval)
    meta = _provenance(config)
    meta.update(kmax=config.kmax, interval=interval)
    for energy, wf in levels:
        meta[f"psi{wf.level}_energy_K"] = energy
        meta[f"psi{wf.level}_parity"] = wf.parity if wf.harmonics is None else f"{wf.parity}/{wf.harmonics}"
    columns = ["phi"] + [f"psi{wf.level}" for _, wf in levels]
    if config["companion"]:
        columns += ["V_K", "M_per_K"]
    table = Table("wavefunction", columns, metadata=meta)
    phi = levels[0][1].phi
    V = angle_model.potential(phi, p)
    M = angle_model.effective_mass(phi, p)
    for j, x in enumerate(phi):
        row = [float(x)] + [float(wf.samples[j]) for _, wf in levels]
        if config["companion"]:
            row += [float(V[j]), float(M[j])]
        table.add(*row)
    return table


def cmd_sweep(config: RunConfig) -> Table:
    p = config.params
    h_max = config["h-max"]
    points = config["points"]
    if points < 1:
        raise ParameterError("--points must be positive")
    if h_max is None:
        grid = sweep.default_field_grid(p, points)
    else:
        grid = [h_max * i / max(points - 1, 1) for i in range(points)]
    n = min(config["levels"], p.dim)
    records = sweep.sweep_field(
        p, grid, include_angle=config["angle"], n_levels=n,
        matching_tol=config["matching-tol"], kmax=config.kmax, workers=config["workers"],
    )
    meta = _provenance(config)
    meta.update(matching_tol_K=config["matching-tol"], points=len(grid))
    if config["angle"]:
        meta["kmax"] = config.kmax
    columns = ["H_T", "blocked", "min_inverse_mass_K"] + [f"E{i}" for i in range(n)]
    if config["angle"]:
        columns += [f"A{i}" for i in range(n)]
    columns.append("matchings")
    table = Table("sweep", columns, metadata=meta)
    for rec in records:
        row = [rec.H_par, rec.blocked, rec.min_inverse_mass] + list(rec.levels_exact)
        if config["angle"]:
            row += list(rec.levels_angle)
        row.append(";".join(f"{m.lower}-{m.upper}:{m.gap:.10g}" for m in rec.matchings))
        table.add(*row)
    return table


COMMANDS = {
    "spectrum": cmd_spectrum,
    "barrier": cmd_barrier,
    "resonance": cmd_resonance,
    "wavefunction": cmd_wavefunction,
    "sweep": cmd_sweep,
}


def run(config: RunConfig) -> str:
    return COMMANDS[config.command](config).render(config["format"])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(ns)
        text = run(config)
    except ParameterError as exc:
        print(f"giantspin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelDomainError, UnsupportedConfigurationError) as exc:
        print(f"giantspin: model domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"giantspin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"giantspin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GiantSpinError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"giantspin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if config["output"]:
        with open(config["output"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
