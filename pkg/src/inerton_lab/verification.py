"""Verification suites: every analytic relation checked against an independent oracle.

Each suite returns :class:`Check` rows; a row passes when ``value`` is
within ``tolerance`` of ``target`` (absolute comparison on residual-type
values, which are already relative). Rows with ``kind="info"`` are
diagnostics and never fail a run.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import action, crystallite, dirac, dynamics, quadrature, spinfield
from . import trajectory as tr
from .core import ParticleParams, derive_scales
from .dynamics import Tolerance
from .trajectory import SpinPolarization

EPS = float(np.finfo(float).eps)
# "machine precision" for a handful of chained flops
MACHINE_TOL = 8 * EPS
REPORT_COLUMNS = ("check", "paper_ref", "value", "target", "tolerance", "status")


@dataclass(frozen=True)
class Check:
    check: str
    relation: str
    value: float
    target: float
    tolerance: float
    kind: str = "bound"

    @property
    def passed(self) -> bool:
        if self.kind == "info":
            return True
        if self.kind == "exact":
            return self.value == self.target
        return bool(abs(self.value - self.target) <= self.tolerance)

    @property
    def status(self) -> str:
        if self.kind == "info":
            return "INFO"
        return "PASS" if self.passed else "FAIL"

    def as_row(self) -> tuple[str, str, str, str, str, str]:
        return (self.check, self.relation, f"{self.value:.6e}", f"{self.target:.6e}",
                f"{self.tolerance:.1e}", self.status)


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    time_limit: float | None = None

    @property
    def passed(self) -> bool:
        in_time = self.time_limit is None or self.seconds <= self.time_limit
        return in_time and all(c.passed for c in self.checks)


def _max_rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)))


def closed_form_equivalence(params: ParticleParams, tol: Tolerance | None = None,
                            threshold: float = dynamics.DEFAULT_PASS_RTOL) -> list[Check]:
    """Integrated intrinsic motion of every inerton over its lifetime, and 5T of spatial motion."""
    tol = tol or Tolerance()
    scales = derive_scales(params)
    checks = []
    worst = 0.0
    for pol in SpinPolarization:
        for idx in tr.inerton_family(scales):
            if idx.Tr <= 0:
                continue
            system = dynamics.build_eom(params, pol, idx.r)
            traj = dynamics.integrate(system, t_end=idx.Tr, tol=tol, samples_per_arc=128)
            ref = np.column_stack(tr.inerton_state(traj.times, idx, pol, c=params.c))
            num = traj.states[:, 4:8].copy()
            # the closed form covers [0, Tr]; compare the pre-collision limit at Tr
            num[-1] = traj.collisions[-1].vector()[4:8]
            scale = np.max(np.abs(ref), axis=0)
            err = np.max(np.abs(num - ref), axis=0) / scale
            worst = max(worst, float(np.max(err)))
    checks.append(Check("intrinsic ODE vs closed form, all r, both e_alpha",
                        "intrinsic pulsation closed form", worst, 0.0, threshold))

    worst = 0.0
    for pol in SpinPolarization:
        system = dynamics.build_eom(params, pol)
        traj = dynamics.integrate(system, t_end=5 * scales.T, tol=tol, samples_per_arc=128)
        worst = max(worst, dynamics.verify_against_analytic(traj, threshold).max_rel)
    checks.append(Check("spatial ODE vs closed form over 5T with collisions",
                        "particle and cloud trajectory closed forms", worst, 0.0, threshold))
    return checks


def velocity_renewal(params: ParticleParams, tol: Tolerance | None = None,
                     n_collisions: int = 10) -> list[Check]:
    """Speed just before each collision returns to ``v0``; period-mean speed is ``v0 (1 - 2/pi)``."""
    scales = derive_scales(params)
    system = dynamics.build_eom(params, SpinPolarization.Up)
    traj = dynamics.integrate(system, t_end=n_collisions * scales.T, tol=tol or Tolerance())
    left = np.array([s.Xdot for s in traj.collisions])
    renewal = _max_rel(left, np.full_like(left, params.v0))

    def speed(t):
        return tr.particle_state(t, scales)[1]

    # the kink at T/2 sits on a panel edge for an even panel count
    mean = quadrature.integrate(speed, 0.0, scales.T, 4096) / scales.T
    target = params.v0 * (1 - 2 / math.pi)
    return [
        Check(f"Xdot(nT-) = v0, n=1..{n_collisions}", "velocity renewal at collisions",
              renewal, 0.0, 1e-8),
        Check("collisions reached", "velocity renewal at collisions",
              float(len(left)), float(n_collisions), 0.0, kind="exact"),
        Check("mean speed over one period", "mean speed v0(1 - 2/pi)",
              abs(mean - target) / target, 0.0, 1e-10),
    ]


def hamiltonian_conservation(params: ParticleParams, tol: Tolerance | None = None,
                             n_states: int = 200, seed: int = 7) -> list[Check]:
    """Coordinate/momentum forms agree on-shell; the energy function is constant on every arc."""
    rng = np.random.default_rng(seed)
    mismatch = 0.0
    for k in range(n_states):
        pol = SpinPolarization.Up if k % 2 == 0 else SpinPolarization.Down
        state = action.on_shell_state(rng, params, pol)
        mismatch = max(mismatch, abs(action.hamiltonians(state, pol, params).form_mismatch))

    scales = derive_scales(params)
    drift = 0.0
    h_drift = 0.0
    for pol in SpinPolarization:
        system = dynamics.build_eom(params, pol)
        traj = dynamics.integrate(system, t_end=5 * scales.T, tol=tol or Tolerance(), samples_per_arc=128)
        samples = traj.samples
        for idx in traj.arcs():
            arc = [samples[i] for i in idx]
            E = np.array([action.energy_function(s, pol, params) for s in arc])
            drift = max(drift, float(np.max(np.abs(E - E[0])) / abs(E[0])))
            H = np.array([action.hamiltonians(s, pol, params).H_momentum for s in arc])
            h_drift = max(h_drift, float(np.max(np.abs(H - H[0])) / abs(H[0])))
    return [
        Check("coordinate vs momentum Hamiltonian on-shell", "two closed forms of H",
              mismatch, 0.0, 1e-12),
        Check("energy-function drift per arc", "energy conservation between collisions",
              drift, 0.0, 1e-9),
        Check("momentum-form H drift per arc", "momentum form of H (not conserved)",
              h_drift, 0.0, 0.0, kind="info"),
    ]


def action_quantization(params: ParticleParams, quadrature_n: int = 10_000) -> list[Check]:
    scales = derive_scales(params)
    E = scales.kinetic_energy
    res = action.action_over_period(E, scales.T, quadrature_n, M=scales.M)
    q = action.quantize(params)
    return [
        Check("J = E*2T by quadrature", "action over one oscillator period",
              res.relative_error, 0.0, 1e-10),
        Check("lambda M v0 = h", "de Broglie relation",
              abs(q.lambda_check * scales.M * params.v0 - params.h) / params.h, 0.0, MACHINE_TOL),
        Check("E = h nu", "energy-frequency relation",
              abs(q.E - params.h * scales.nu) / q.E, 0.0, MACHINE_TOL),
        Check("iota(up) == iota(down)", "intrinsic action",
              res.iota_up, res.iota_down, 0.0, kind="exact"),
    ]


def spin_oscillator(B: float = 1.0, n_points: int = 2001, Q_max: float = 10.0) -> list[Check]:
    cfg = spinfield.FieldConfig(B=B)
    sol = spinfield.landau_ground_state(cfg, n_points, Q_max)
    rel = abs(sol.epsilon - cfg.level_spacing) / cfg.level_spacing
    slope, _, _ = spinfield.convergence_order(Q_max=Q_max, order=2)
    second = spinfield.landau_ground_state(cfg, n_points, Q_max, order=2)
    return [
        Check(f"ground energy = e hbar B/2M at {n_points} points", "spin energy",
              rel, 0.0, 1e-6),
        Check("L2 distance to Gaussian ground state", "oscillator ground state",
              spinfield.gaussian_distance(sol), 0.0, 1e-4),
        Check("convergence order, 3-point stencil", "second-order discretisation",
              slope, 2.0, 0.2),
        Check("3-point stencil error at same grid", "spin energy",
              abs(second.epsilon - cfg.level_spacing) / cfg.level_spacing, 0.0, 0.0, kind="info"),
    ]


def dirac_spectrum(params: ParticleParams, n_samples: int = 100, seed: int = 11) -> list[Check]:
    rng = np.random.default_rng(seed)
    spec_err = 0.0
    square = 0.0
    for _ in range(n_samples):
        p = rng.normal(size=3) * 2.0
        H = dirac.dirac_hamiltonian(p, params.M0, params.c)
        E = H.energy
        spec_err = max(spec_err, _max_rel(dirac.dirac_spectrum(H), [-E, -E, E, E]))
        square = max(square, H.square_residual())
    freq = dirac.frequency_equivalence(params)
    return [
        Check("eigenvalues = +-E, doubly degenerate", "Dirac matrix spectrum", spec_err, 0.0, 1e-12),
        Check("H^2 = E^2 I", "Dirac matrix square", square, 0.0, MACHINE_TOL),
        Check("nu_rel = M c^2/h = omega_kv0/2pi", "relativistic frequency",
              freq.relative_residual, 0.0, 1e-14),
    ]


def scale_rows(params: ParticleParams, v0_values) -> list[dict]:
    rows = []
    for v0 in v0_values:
        p = ParticleParams(M0=params.M0, v0=float(v0), c=params.c, h=params.h, N=params.N)
        rows.append(scale_relations_row(p))
    return rows


def scale_relations_row(params: ParticleParams) -> dict:
    """Derived scales plus the relative residual of each scale identity."""
    sc = derive_scales(params)
    c, v0 = params.c, params.v0
    row = {"v0": v0, **sc.as_dict()}
    row["res_Lambda_lambda"] = abs(sc.Lambda - sc.lambda_ * c / v0) / sc.Lambda
    row["res_lambda_tilde"] = abs(sc.lambda_ - sc.lambdaTildeV0 * c / v0) / sc.lambda_
    row["res_Lambda_tilde"] = abs(sc.Lambda - sc.lambdaTildeV0 * c**2 / v0**2) / sc.Lambda
    row["res_contraction"] = (abs(sc.lambdaTildeV0 - sc.lambdaTilde0 * math.sqrt(1 - (v0 / c) ** 2))
                              / sc.lambdaTildeV0)
    return row


def scale_relations(params: ParticleParams) -> list[Check]:
    rows = scale_rows(params, np.linspace(0.1, 0.9, 9) * params.c)
    names = {
        "res_Lambda_lambda": "Lambda = lambda c/v0",
        "res_lambda_tilde": "lambda = lambdaTildeV0 c/v0",
        "res_Lambda_tilde": "Lambda = lambdaTildeV0 c^2/v0^2",
        "res_contraction": "lambdaTildeV0 = lambdaTilde0 sqrt(1-v0^2/c^2)",
    }
    return [
        Check(f"{label}, v0 = 0.1c..0.9c", "gravitational range scales",
              max(r[key] for r in rows), 0.0, MACHINE_TOL)
        for key, label in names.items()
    ]


def crystallite_oracle(N: int = 64, gamma: float = 1.0, m: float = 1.0, a: float = 1.0,
                       hbar: float = 1.0) -> list[Check]:
    spec = crystallite.LatticeSpec.chain(N, gamma=gamma, m=m, a=a)
    cmp = crystallite.oracle_comparison(spec)
    k = spec.allowed_k()[1]
    omega = float(crystallite.dispersion(k, spec))
    q = crystallite.quantize_mode(hbar * omega, omega, hbar, mass=spec.total_mass)
    return [
        Check("dynamical matrix vs dispersion(k/2)", "coherent-mode dispersion",
              cmp.max_rel_mismatch_mapped, 0.0, 1e-10),
        Check("dynamical matrix vs dispersion(k), unmapped", "coherent-mode dispersion",
              cmp.max_rel_mismatch_unmapped, 0.0, 0.0, kind="info"),
        Check("omega(0) = 0", "zero mode", float(crystallite.dispersion(0.0, spec)), 0.0, 0.0,
              kind="exact"),
        Check("E_k = hbar omega_k at J = 2 pi hbar", "lattice mode quantization",
              q.E_check, hbar * omega, 0.0, kind="exact"),
        Check("J = 2 pi hbar", "lattice mode quantization",
              float(q.quantized), 1.0, 0.0, kind="exact"),
        Check("quadrature J vs E_k 2pi/omega_k", "action of the lattice mode",
              q.quadrature_rel_error, 0.0, 1e-10),
    ]


# (name, description, runner, time limit in seconds)
SUITES = (
    ("closed_form", "closed-form / ODE equivalence", lambda p: closed_form_equivalence(p), 5.0),
    ("renewal", "velocity renewal and mean speed", lambda p: velocity_renewal(p), None),
    ("hamiltonian", "Hamiltonian forms and energy conservation", lambda p: hamiltonian_conservation(p), None),
    ("action", "action-angle quantization", lambda p: action_quantization(p), None),
    ("spin", "spin oscillator eigenproblem", lambda p: spin_oscillator(), 10.0),
    ("dirac", "Dirac spectrum and frequencies", lambda p: dirac_spectrum(p), None),
    ("scales", "scale relations over a v0 sweep", lambda p: scale_relations(p), None),
    ("crystallite", "lattice oracle and mode quantization", lambda p: crystallite_oracle(), 5.0),
)


def run_suite(name: str, params: ParticleParams | None = None) -> SuiteResult:
    params = params or ParticleParams()
    for key, _, runner, limit in SUITES:
        if key == name:
            start = time.perf_counter()
            checks = runner(params)
            return SuiteResult(name=key, checks=checks, seconds=time.perf_counter() - start,
                               time_limit=limit)
    raise KeyError(name)


def run_all(params: ParticleParams | None = None) -> list[SuiteResult]:
    return [run_suite(key, params) for key, *_ in SUITES]


def report_lines(results: list[SuiteResult], timing: bool = False) -> list[str]:
    """CSV report rows. Wall-clock rows are opt-in so report files stay reproducible."""
    lines = [",".join(REPORT_COLUMNS)]
    for res in results:
        for c in res.checks:
            lines.append(",".join(f'"{v}"' if "," in v else v for v in c.as_row()))
        if timing and res.time_limit is not None:
            status = "PASS" if res.seconds <= res.time_limit else "FAIL"
            lines.append(f"{res.name} runtime,wall-clock budget,{res.seconds:.3f},"
                         f"{res.time_limit:.1f},0,{status}")
    return lines
