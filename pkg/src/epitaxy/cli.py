"""Command-line front end: solve, sweep, locate the fold, cross-check.

Subcommands
-----------
solve     both stationary branches at one amplitude -> profiles + plot
sweep     branch diagram over a lambda range a:b:step
critical  bisect for the fold amplitude lambda_c inside [lo, hi]
oracle    minimize the discrete functional, export the minimizer
energy    re-evaluate both functionals on a stored profile CSV

Every run writes a JSON summary next to its data files.  An optional
config file of key=value lines supplies defaults; explicit flags win.
Exit status: 0 success, 1 no solutions at the requested amplitude,
2 configuration error (unknown keys, bad ranges, unusable input).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .branches import InvalidBracket, find_lambda_critical, sweep_lambda
from .energy import GridTooCoarse, HeightProfile, evaluate_functional
from .export import export_csv, export_svg, read_profile_csv, spec_echo, write_summary
from .model import BoundaryKind, ProblemSpec
from .oracle import DiscreteFunctional, minimize
from .shoot import NoSolutions, solve_branches

__all__ = ["RunConfig", "ConfigError", "run", "main", "ENV_OUTDIR"]

ENV_OUTDIR = "EPITAXY_OUTDIR"

_FORMATS = ("csv", "svg")


class ConfigError(ValueError):
    """Unusable run configuration (flags, config file, or input data)."""


@dataclass(frozen=True)
class RunConfig:
    """One fully merged invocation: command, overrides, output plan."""

    command: str
    bc: BoundaryKind
    lam: float | None
    epsilon: float
    step: float
    scan_range: float
    scan_points: int
    outdir: Path
    formats: tuple[str, ...]
    lambdas: str | None = None
    lo: float | None = None
    hi: float | None = None
    tol: float | None = None
    n: int = 512
    input: Path | None = None

    def spec(self, lam: float | None = None) -> ProblemSpec:
        amplitude = self.lam if lam is None else lam
        if amplitude is None:
            raise ConfigError("an explicit --lambda is required")
        return ProblemSpec(bc=self.bc, lam=amplitude, epsilon=self.epsilon,
                           step=self.step, scan_range=self.scan_range,
                           scan_points=self.scan_points)


# merged under flags: flag > config file > built-in default
_DEFAULTS = {
    "bc": "dirichlet",
    "epsilon": 1e-6,
    "step": 1e-4,
    "scan_range": 0.0,  # 0 -> boundary-kind default window
    "scan_points": 2000,
    "formats": "csv,svg",
    "n": 512,
}

# config-file key -> (namespace dest, converter)
_CONFIG_KEYS = {
    "bc": ("bc", str),
    "lambda": ("lam", float),
    "epsilon": ("epsilon", float),
    "step": ("step", float),
    "scan-range": ("scan_range", float),
    "scan-points": ("scan_points", int),
    "outdir": ("outdir", str),
    "formats": ("formats", str),
    "lambdas": ("lambdas", str),
    "lo": ("lo", float),
    "hi": ("hi", float),
    "tol": ("tol", float),
    "n": ("n", int),
    "input": ("input", str),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epitaxy",
        description="Radial stationary states of the fourth-order growth "
                    "model on the unit disk.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bc", choices=["dirichlet", "navier"],
                        help="edge condition (default dirichlet)")
    common.add_argument("--epsilon", type=float, help="inner cutoff radius")
    common.add_argument("--step", type=float, help="integrator step")
    common.add_argument("--scan-range", type=float, dest="scan_range",
                        help="half-width of the slope scan window")
    common.add_argument("--scan-points", type=int, dest="scan_points",
                        help="number of scan samples")
    common.add_argument("--outdir", help="output directory (default $%s or .)"
                        % ENV_OUTDIR)
    common.add_argument("--formats", help="comma list out of csv,svg "
                        "(JSON summary is always written)")
    common.add_argument("--config", help="key=value file merged under flags")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common],
                       help="both branches at one amplitude")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="forcing amplitude (required)")
    p = sub.add_parser("sweep", parents=[common],
                       help="branch diagram over a range")
    p.add_argument("--lambdas", help="amplitude range a:b:step (required)")
    p = sub.add_parser("critical", parents=[common],
                       help="bisect for the fold amplitude")
    p.add_argument("--lo", type=float, help="amplitude with two branches")
    p.add_argument("--hi", type=float, help="amplitude with none")
    p.add_argument("--tol", type=float, help="bisection stopping width")
    p = sub.add_parser("oracle", parents=[common],
                       help="minimize the discrete functional")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="forcing amplitude (required)")
    p.add_argument("--n", type=int, help="free grid nodes (default 512)")
    p = sub.add_parser("energy", parents=[common],
                       help="re-evaluate functionals on a stored profile")
    p.add_argument("--input", help="profile CSV to read (required)")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="forcing amplitude (required)")
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError("%s:%d: unknown entry %r" % (path, ln, line))
        dest, convert = _CONFIG_KEYS[key]
        try:
            values[dest] = convert(value)
        except ValueError as exc:
            raise ConfigError("%s:%d: bad value for %s: %r"
                              % (path, ln, key, value)) from exc
    return values


def _merge(ns: argparse.Namespace) -> RunConfig:
    layered = dict(_DEFAULTS)
    if getattr(ns, "config", None):
        layered.update(_read_config_file(ns.config))
    for key, value in vars(ns).items():
        if key not in ("command", "config") and value is not None:
            layered[key] = value

    try:
        bc = BoundaryKind(layered["bc"])
    except ValueError:
        raise ConfigError("bc must be dirichlet or navier, got %r"
                          % layered["bc"]) from None
    formats = tuple(x for x in str(layered["formats"]).split(",") if x)
    unknown = [x for x in formats if x not in _FORMATS]
    if unknown:
        raise ConfigError("unknown formats: %s" % ",".join(unknown))
    outdir = Path(layered.get("outdir") or os.environ.get(ENV_OUTDIR) or ".")
    return RunConfig(
        command=ns.command,
        bc=bc,
        lam=layered.get("lam"),
        epsilon=layered["epsilon"],
        step=layered["step"],
        scan_range=layered["scan_range"],
        scan_points=layered["scan_points"],
        outdir=outdir,
        formats=formats,
        lambdas=layered.get("lambdas"),
        lo=layered.get("lo"),
        hi=layered.get("hi"),
        tol=layered.get("tol"),
        n=int(layered["n"]),
        input=Path(layered["input"]) if layered.get("input") else None,
    )


def _with(base: Path, ext: str) -> Path:
    # not Path.with_suffix: %g-formatted amplitudes put dots in names
    return base.parent / (base.name + ext)


def _report(rep) -> dict:
    return {
        "quadratic": rep.quadratic,
        "cubic": rep.cubic,
        "forcing_term": rep.forcing_term,
        "total": rep.total,
    }


def _parse_lambda_range(text: str | None) -> list[float]:
    if not text:
        raise ConfigError("--lambdas a:b:step is required")
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--lambdas must look like a:b:step, got %r" % text)
    try:
        a, b, step = (float(x) for x in parts)
    except ValueError:
        raise ConfigError("--lambdas must be numeric, got %r" % text) from None
    if step <= 0.0 or b < a:
        raise ConfigError("--lambdas needs step > 0 and b >= a")
    count = int((b - a) / step + 1e-9) + 1
    return [a + k * step for k in range(count)]


def _cmd_solve(cfg: RunConfig) -> int:
    spec = cfg.spec()
    base = cfg.outdir / ("solve_%s_lam%g" % (spec.bc.value, spec.lam))
    out = solve_branches(spec)
    summary = {"command": "solve", "spec": spec_echo(spec)}
    files = []
    if isinstance(out, NoSolutions):
        if "svg" in cfg.formats:
            files.append(str(export_svg(out, _with(base, ".svg"))))
        summary.update(roots=None, energies=None, files=files)
        write_summary(_with(base, ".json"), summary)
        print("no solutions at lambda = %g (%s)" % (spec.lam, spec.bc.value),
              file=sys.stderr)
        return 1
    if "csv" in cfg.formats:
        files.append(str(export_csv(out.minimum.profile,
                                    base.parent / (base.name + "_min.csv"))))
        files.append(str(export_csv(out.mountain_pass.profile,
                                    base.parent / (base.name + "_mp.csv"))))
    if "svg" in cfg.formats:
        files.append(str(export_svg(out, _with(base, ".svg"))))
    summary.update(
        roots={"s_min": out.minimum.s, "s_mp": out.mountain_pass.s},
        energies={"min": _report(out.energy_min), "mp": _report(out.energy_mp)},
        fold_coincident=out.fold_coincident,
        files=files,
    )
    write_summary(_with(base, ".json"), summary)
    print("lambda = %g (%s): s_min = %.9g, s_mp = %.9g, "
          "E(min) = %.9g, E(mp) = %.9g"
          % (spec.lam, spec.bc.value, out.minimum.s, out.mountain_pass.s,
             out.energy_min.total, out.energy_mp.total))
    return 0


def _cmd_sweep(cfg: RunConfig) -> int:
    values = _parse_lambda_range(cfg.lambdas)
    diagram = sweep_lambda(cfg.bc, values, base_spec=cfg.spec(lam=0.0))
    base = cfg.outdir / ("sweep_%s" % cfg.bc.value)
    files = []
    if "csv" in cfg.formats:
        files.append(str(export_csv(diagram, _with(base, ".csv"))))
    if "svg" in cfg.formats:
        files.append(str(export_svg(diagram, _with(base, ".svg"))))
    summary = {
        "command": "sweep",
        "spec": spec_echo(cfg.spec(lam=0.0)),
        "lambdas": values,
        "points": [
            {"lambda": p.lam, "s_min": p.s_min, "s_mp": p.s_mp,
             "J_min": p.energy_min, "J_mp": p.energy_mp}
            for p in diagram.points
        ],
        "files": files,
    }
    write_summary(_with(base, ".json"), summary)
    solved = sum(p.solved for p in diagram.points)
    print("swept %d amplitudes (%s): %d solved, %d without solutions"
          % (len(values), cfg.bc.value, solved, len(values) - solved))
    return 0


def _cmd_critical(cfg: RunConfig) -> int:
    if cfg.lo is None or cfg.hi is None:
        raise ConfigError("--lo and --hi are required")
    est = find_lambda_critical(cfg.bc, base_spec=cfg.spec(lam=0.0),
                               bracket=(cfg.lo, cfg.hi), tol=cfg.tol)
    base = cfg.outdir / ("critical_%s" % cfg.bc.value)
    summary = {
        "command": "critical",
        "spec": spec_echo(cfg.spec(lam=0.0)),
        "bracket": [cfg.lo, cfg.hi],
        "lambda_critical": {"value": est.value, "uncertainty": est.uncertainty},
    }
    write_summary(_with(base, ".json"), summary)
    print("lambda_c = %.6f +/- %.6f (%s)"
          % (est.value, est.uncertainty, cfg.bc.value))
    return 0


def _cmd_oracle(cfg: RunConfig) -> int:
    if cfg.lam is None:
        raise ConfigError("an explicit --lambda is required")
    df = DiscreteFunctional(cfg.bc, cfg.n, cfg.lam)
    res = minimize(df)
    base = cfg.outdir / ("oracle_%s_lam%g_n%d" % (cfg.bc.value, cfg.lam, cfg.n))
    files = []
    if "csv" in cfg.formats:
        files.append(str(export_csv(df.as_height(res.u),
                                    _with(base, ".csv"))))
    summary = {
        "command": "oracle",
        "bc": cfg.bc.value,
        "lambda": cfg.lam,
        "n": cfg.n,
        "value": res.value,
        "gradient_norm": res.gradient_norm,
        "iterations": res.iterations,
        "converged": res.converged,
        "edge_laplacian": df.edge_laplacian(res.u),
        "files": files,
    }
    write_summary(_with(base, ".json"), summary)
    print("oracle %s n=%d lambda=%g: value = %.9g, |grad| = %.3g, "
          "converged = %s"
          % (cfg.bc.value, cfg.n, cfg.lam, res.value, res.gradient_norm,
             res.converged))
    return 0


def _cmd_energy(cfg: RunConfig) -> int:
    if cfg.input is None:
        raise ConfigError("--input FILE is required")
    if cfg.lam is None:
        raise ConfigError("an explicit --lambda is required")
    try:
        r, _w, u, up, upp = read_profile_csv(cfg.input)
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (cfg.input, exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    height = HeightProfile(radii=r, u=u, up=up, upp=upp)
    clamped = evaluate_functional(BoundaryKind.DIRICHLET, height, cfg.lam)
    hinged = evaluate_functional(BoundaryKind.NAVIER, height, cfg.lam)
    base = cfg.outdir / ("energy_%s" % cfg.input.stem)
    summary = {
        "command": "energy",
        "input": str(cfg.input),
        "lambda": cfg.lam,
        "clamped": _report(clamped),
        "hinged": _report(hinged),
    }
    write_summary(_with(base, ".json"), summary)
    print("clamped: %.12g   hinged: %.12g   (lambda = %g, %d points)"
          % (clamped.total, hinged.total, cfg.lam, len(r)))
    return 0


_DISPATCH = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "critical": _cmd_critical,
    "oracle": _cmd_oracle,
    "energy": _cmd_energy,
}


def run(argv=None) -> int:
    """Parse argv, execute one subcommand, return the exit status."""
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already reported on stderr
        return int(exc.code or 0)
    try:
        cfg = _merge(ns)
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        return _DISPATCH[cfg.command](cfg)
    except (ConfigError, InvalidBracket, GridTooCoarse, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
