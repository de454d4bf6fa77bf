"""Command-line front end: ``inerton-lab <scenario> [--config PATH] [--key value ...] [--out PATH]``.

Exit codes: 0 when every check passes, 1 when a check breaches its
threshold, 2 on usage, parse, domain or I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import action, crystallite, dirac, dynamics, spinfield, verification
from .core import ParticleParams, derive_scales
from .dynamics import Tolerance, format_float
from .errors import ConfigError, InertonLabError
from .trajectory import SpinPolarization

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SCENARIOS = ("derive", "simulate", "verify", "spectrum", "dispersion", "sweep")
SWEEPABLE = ("M0", "v0", "c", "h")
THREADS_ENV = "INERTON_LAB_THREADS"


def _to_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _to_vector(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.replace(" ", "").split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(parts)


# key -> converter; keys are case-sensitive
KEYS = {
    "scenario": str,
    "output_path": str,
    "M0": float,
    "m0": float,
    "free_m0": _to_bool,
    "v0": float,
    "c": float,
    "h": float,
    "N": _to_int,
    "abs_tol": float,
    "rel_tol": float,
    "pass_rtol": float,
    "periods": float,
    "samples_per_arc": _to_int,
    "polarization": SpinPolarization.parse,
    "r": _to_int,
    "spectrum": str,
    "B": float,
    "e": float,
    "hbar": float,
    "M": float,
    "n_points": _to_int,
    "Q_max": float,
    "p": _to_vector,
    "lattice_N": _to_int,
    "gamma": float,
    "m": float,
    "a": float,
    "sweep_parameter": str,
    "sweep_start": float,
    "sweep_stop": float,
    "sweep_steps": _to_int,
}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class RunConfig:
    particle: ParticleParams
    scenario: str
    output_path: str | None = None
    tolerances: Tolerance = field(default_factory=Tolerance)
    sweep: SweepSpec | None = None
    options: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.options.get(key, default)


def parse_pairs(text: str) -> dict[str, tuple[object, int]]:
    """``key = value`` lines into ``{key: (value, line)}``; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' at line {lineno}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r} at line {lineno}", key=key, line=lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r} at line {lineno}", key=key, line=lineno)
        try:
            out[key] = (KEYS[key](value), lineno)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r} at line {lineno}: {exc}", key=key, line=lineno) from exc
    return out


def build_config(pairs: dict) -> RunConfig:
    """Validate merged ``{key: (value, line)}`` pairs into a :class:`RunConfig`."""
    values = {k: v for k, (v, _) in pairs.items()}

    def where(key):
        line = pairs.get(key, (None, None))[1]
        return f" at line {line}" if line else ""

    if "scenario" not in values:
        raise ConfigError("missing required key 'scenario'", key="scenario")
    scenario = values.pop("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}{where('scenario')}; choose from {', '.join(SCENARIOS)}",
                          key="scenario", line=pairs["scenario"][1])

    particle_keys = ("M0", "v0", "c", "h", "N", "m0", "free_m0")
    try:
        particle = ParticleParams(**{k: values.pop(k) for k in particle_keys if k in values})
    except InertonLabError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        tol = Tolerance(abs=values.pop("abs_tol", dynamics.DEFAULT_ATOL),
                        rel=values.pop("rel_tol", dynamics.DEFAULT_RTOL))
    except InertonLabError as exc:
        raise ConfigError(str(exc)) from exc

    sweep = None
    sweep_keys = ("sweep_parameter", "sweep_start", "sweep_stop", "sweep_steps")
    given = [k for k in sweep_keys if k in values]
    if scenario == "sweep":
        for k in sweep_keys:
            if k not in values:
                raise ConfigError(f"missing required key {k!r} for the sweep scenario", key=k)
        sweep = SweepSpec(*(values.pop(k) for k in sweep_keys))
        if sweep.parameter not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {sweep.parameter!r}{where('sweep_parameter')}; "
                              f"choose from {', '.join(SWEEPABLE)}", key="sweep_parameter")
        if sweep.steps < 2:
            raise ConfigError(f"sweep needs steps >= 2, got {sweep.steps}", key="sweep_steps")
    elif given:
        raise ConfigError(f"key {given[0]!r}{where(given[0])} only applies to the sweep scenario", key=given[0])

    if scenario == "spectrum":
        mode = values.get("spectrum", "spin")
        if mode not in ("spin", "dirac"):
            raise ConfigError(f"spectrum must be 'spin' or 'dirac', got {mode!r}", key="spectrum")
        values["spectrum"] = mode
    output_path = values.pop("output_path", None)
    return RunConfig(particle=particle, scenario=scenario, output_path=output_path,
                     tolerances=tol, sweep=sweep, options=values)


def parse_config(text: str) -> RunConfig:
    return build_config(parse_pairs(text))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_float(v) for v in row])
    return buf.getvalue()


@dataclass
class Outcome:
    data: str
    summary: list[str]
    passed: bool = True


def run_derive(cfg: RunConfig) -> Outcome:
    params = cfg.particle
    sc = derive_scales(params)
    rows = [(k, v, "derived scale") for k, v in sc.as_dict().items()]
    rows += [(n, v, rel) for n, v, rel in action.derive_table(params) if n in ("J", "iota", "E")]
    summary = [f"{n:<14} {v:.12g}" for n, v, _ in rows]
    if params.m0_is_free:
        summary.append("note: free m0, exploratory run")
    return Outcome(_csv(("name", "value", "relation"), rows), summary)


def run_simulate(cfg: RunConfig) -> Outcome:
    params = cfg.particle
    pol = cfg.get("polarization", SpinPolarization.Up)
    system = dynamics.build_eom(params, pol, cfg.get("r", 0))
    periods = cfg.get("periods", 5.0)
    if not periods > 0:
        raise ConfigError(f"periods must be positive, got {periods!r}", key="periods")
    traj = dynamics.integrate(system, t_end=periods * system.T, tol=cfg.tolerances,
                              samples_per_arc=cfg.get("samples_per_arc", 64))
    report = dynamics.verify_against_analytic(traj, cfg.get("pass_rtol", dynamics.DEFAULT_PASS_RTOL))
    summary = [
        f"arcs {traj.integrator_meta['arcs']}, collisions {len(traj.collisions)}, samples {len(traj)}",
        *report.lines(),
    ]
    if traj.integrator_meta["free_m0"]:
        summary.append("note: free m0, exploratory run")
    return Outcome(traj.to_csv(), summary, report.passed)


def run_verify(cfg: RunConfig) -> Outcome:
    results = verification.run_all(cfg.particle)
    summary = []
    for res in results:
        budget = f" (limit {res.time_limit:.0f} s)" if res.time_limit else ""
        summary.append(f"{'PASS' if res.passed else 'FAIL'}  {res.name:<12} {res.seconds:7.3f} s{budget}")
        for c in res.checks:
            summary.append(f"      {c.status:<4} {c.check}: {c.value:.3e} (target {c.target:.3e}, tol {c.tolerance:.1e})")
    data = "\n".join(verification.report_lines(results)) + "\n"
    return Outcome(data, summary, all(r.passed for r in results))


def run_spectrum(cfg: RunConfig) -> Outcome:
    if cfg.get("spectrum") == "dirac":
        p = np.asarray(cfg.get("p", (0.0, 0.0, 0.0)))
        H = dirac.dirac_hamiltonian(p, cfg.particle.M0, cfg.particle.c)
        vals = dirac.dirac_spectrum(H)
        E = H.energy
        expected = np.array([-E, -E, E, E])
        err = float(np.max(np.abs(vals - expected))) / E
        rows = [(float(i), v, x) for i, (v, x) in enumerate(zip(vals, expected))]
        ok = err <= 1e-12
        return Outcome(_csv(("index", "eigenvalue", "expected"), rows),
                       [f"E = {E:.12g}", f"max relative deviation {err:.3e}: {'PASS' if ok else 'FAIL'}"], ok)
    B = cfg.get("B", 1.0)
    rows = spinfield.field_table([B], cfg.get("e", 1.0), cfg.get("hbar", 1.0), cfg.get("M", 1.0),
                                 cfg.get("n_points", 2001), cfg.get("Q_max", 10.0))
    _, eps, closed, _, _ = rows[0]
    err = abs(eps - closed) / closed if closed else abs(eps)
    ok = err <= 1e-6
    return Outcome(_csv(("B", "epsilon_numeric", "epsilon_closed", "eps_up", "eps_down"), rows),
                   [f"ground energy {eps:.12g} vs {closed:.12g}", f"relative error {err:.3e}: {'PASS' if ok else 'FAIL'}"],
                   ok)


def run_dispersion(cfg: RunConfig) -> Outcome:
    spec = crystallite.LatticeSpec.chain(cfg.get("lattice_N", 64), gamma=cfg.get("gamma", 1.0),
                                         m=cfg.get("m", 1.0), a=cfg.get("a", 1.0))
    rows = crystallite.dispersion_table(spec)
    cmp = crystallite.oracle_comparison(spec)
    ok = cmp.max_rel_mismatch_mapped <= 1e-10
    summary = [
        f"N {spec.N}, gamma {spec.gamma[0, 0]:g}, m {spec.m:g}, a {spec.a:g}",
        f"mapping {cmp.mapping}: max relative mismatch {cmp.max_rel_mismatch_mapped:.3e} "
        f"({'PASS' if ok else 'FAIL'})",
        f"without mapping: {cmp.max_rel_mismatch_unmapped:.3e}",
    ]
    return Outcome(_csv(("k", "omega_formula", "omega_numeric"), rows), summary, ok)


def sweep_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


SWEEP_HEADER = ("v0", "M0", "c", "h", "M", "lambda", "T", "Lambda", "lambdaTilde0", "lambdaTildeV0",
                "nuRel", "Lambda_v0_over_lambda_c", "res_Lambda_lambda", "res_lambda_tilde",
                "res_Lambda_tilde", "res_contraction")


def _sweep_row(params: ParticleParams):
    row = verification.scale_relations_row(params)
    row["Lambda_v0_over_lambda_c"] = row["Lambda"] * params.v0 / (row["lambda"] * params.c)
    row.update(M0=params.M0, c=params.c, h=params.h)
    return tuple(row[k] for k in SWEEP_HEADER)


def run_sweep(cfg: RunConfig) -> Outcome:
    sw = cfg.sweep
    try:
        # a tied cloud mass follows the swept value; a free one stays fixed
        tied = {} if cfg.particle.free_m0 else {"m0": None}
        points = [replace(cfg.particle, **tied, **{sw.parameter: float(v)}) for v in sw.values()]
    except InertonLabError as exc:
        raise ConfigError(f"sweep point rejected: {exc}", key=sw.parameter) from exc
    workers = max(1, min(sweep_threads(), len(points)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_sweep_row, points))
    res_cols = [SWEEP_HEADER.index(k) for k in SWEEP_HEADER if k.startswith("res_")]
    worst = max(row[j] for row in rows for j in res_cols)
    ok = worst <= verification.MACHINE_TOL
    summary = [f"{len(rows)} points over {sw.parameter} in [{sw.start:g}, {sw.stop:g}] on {workers} worker(s)",
               f"largest scale-identity residual {worst:.3e}: {'PASS' if ok else 'FAIL'}"]
    return Outcome(_csv(SWEEP_HEADER, rows), summary, ok)


RUNNERS = {
    "derive": run_derive,
    "simulate": run_simulate,
    "verify": run_verify,
    "spectrum": run_spectrum,
    "dispersion": run_dispersion,
    "sweep": run_sweep,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute a scenario. With an output path the data goes to that file and
    the summary to ``stdout``; otherwise data goes to ``stdout`` and the
    summary to ``stderr``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        outcome = RUNNERS[cfg.scenario](cfg)
    except (InertonLabError, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    summary_stream = stderr
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", newline="") as fh:
                fh.write(outcome.data)
        except OSError as exc:
            print(f"error: cannot write {cfg.output_path}: {exc}", file=stderr)
            return EXIT_USAGE
        summary_stream = stdout
    else:
        stdout.write(outcome.data)
    for line in outcome.summary:
        print(line, file=summary_stream)
    return EXIT_OK if outcome.passed else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(sp):
    sp.add_argument("--config", help="file of 'key = value' lines")
    sp.add_argument("--out", dest="output_path", help="write the CSV here instead of standard output")
    for key in ("M0", "m0", "v0", "c", "h"):
        sp.add_argument(f"--{key}", type=str)
    sp.add_argument("--N", type=str, help="total inerton count")
    sp.add_argument("--free-m0", dest="free_m0", action="store_const", const="true")
    sp.add_argument("--abs-tol", dest="abs_tol", type=str)
    sp.add_argument("--rel-tol", dest="rel_tol", type=str)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inerton-lab", description="Particle / inerton-cloud mechanics toolkit.")
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)

    _add_common(sub.add_parser("derive", help="derived scales and actions"))

    sp = sub.add_parser("simulate", help="integrate the equations of motion and compare to closed forms")
    _add_common(sp)
    sp.add_argument("--periods", type=str, help="integration length in collision periods")
    sp.add_argument("--samples-per-arc", dest="samples_per_arc", type=str)
    sp.add_argument("--polarization", type=str, choices=("up", "down"))
    sp.add_argument("--r", type=str, help="inerton index")
    sp.add_argument("--pass-rtol", dest="pass_rtol", type=str)

    _add_common(sub.add_parser("verify", help="run every verification suite"))

    sp = sub.add_parser("spectrum", help="spin oscillator or Dirac matrix spectrum")
    _add_common(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--spin", dest="spectrum", action="store_const", const="spin")
    mode.add_argument("--dirac", dest="spectrum", action="store_const", const="dirac")
    sp.add_argument("--p", type=str, help="momentum px,py,pz for --dirac")
    for key in ("B", "e", "hbar", "M", "Q_max"):
        sp.add_argument(f"--{key}", type=str)
    sp.add_argument("--n-points", dest="n_points", type=str)

    sp = sub.add_parser("dispersion", help="lattice dispersion against the dynamical matrix")
    _add_common(sp)
    # --N here is the lattice size, not the inerton count
    sp.set_defaults(lattice_alias=True)
    for key in ("gamma", "m", "a"):
        sp.add_argument(f"--{key}", type=str)

    sp = sub.add_parser("sweep", help="derived scales over a parameter range")
    _add_common(sp)
    sp.add_argument("sweep_parameter", nargs="?", help=f"one of {', '.join(SWEEPABLE)}")
    sp.add_argument("sweep_start", nargs="?")
    sp.add_argument("sweep_stop", nargs="?")
    sp.add_argument("sweep_steps", nargs="?")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    pairs = {}
    if args.config:
        try:
            with open(args.config) as fh:
                pairs = parse_pairs(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    opts = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "lattice_alias")}
    if getattr(args, "lattice_alias", False) and "N" in opts:
        opts["lattice_N"] = opts.pop("N")
    for key, raw in opts.items():
        if key not in KEYS:
            continue
        try:
            value = raw if key == "scenario" else KEYS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for --{key}: {exc}", key=key) from exc
        pairs[key] = (value, None)
    return build_config(pairs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
