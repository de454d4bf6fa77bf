"""Numerical integration of the coupled particle / inerton-cloud equations of motion.

The spatial pair ``(X, x)`` and the intrinsic pair ``(Xi, xi)`` obey::

    X''  + (pi/T)(v0/c) x'            = 0
    x''  - (pi/T)(c/v0) (X' - v0)     = 0
    Xi'' + (pi/T)(v0/c) xi'           = 0
    xi'' - (pi/T)(c/v0) (Xi' - e v0)  = 0

Integration proceeds arc by arc over ``[nT, (n+1)T]``. At every collision
``t = nT`` the velocities are re-launched at their initial values while the
positions carry over, so the numerical solution can be compared pointwise
with the closed forms in :mod:`inerton_lab.trajectory`.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp

from . import trajectory as tr
from .core import ParticleParams, derive_scales
from .errors import DomainError, IntegrationError, NumericalBlowupError, UsageError
from .trajectory import ArcScales, InertonIndex, SpinPolarization

STATE_NAMES = ("X", "Xdot", "x", "xdot", "Xi", "Xidot", "xi", "xidot")
CSV_HEADER = ("t",) + STATE_NAMES

DEFAULT_ATOL = 1e-12
DEFAULT_RTOL = 1e-10
DEFAULT_PASS_RTOL = 1e-8


@dataclass(frozen=True)
class KinematicState:
    X: float
    Xdot: float
    x: float
    xdot: float
    Xi: float
    Xidot: float
    xi: float
    xidot: float
    t: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in STATE_NAMES], dtype=float)

    @classmethod
    def from_vector(cls, y, t: float) -> "KinematicState":
        return cls(*(float(v) for v in y), t=float(t))


@dataclass(frozen=True)
class Tolerance:
    abs: float = DEFAULT_ATOL
    rel: float = DEFAULT_RTOL

    def __post_init__(self):
        if not (self.abs > 0 and self.rel > 0):
            raise UsageError(f"tolerances must be positive, got abs={self.abs!r} rel={self.rel!r}")


@dataclass(frozen=True)
class ODESystem:
    """First-order form of the equations of motion for one speed/period pair.

    ``r = 0`` is the particle itself; ``r >= 1`` uses the reduced speed
    ``v0r`` and lifetime ``Tr`` of the r-th inerton.
    """

    params: ParticleParams
    pol: SpinPolarization
    r: int
    v0: float
    T: float
    c: float
    dim: int = 8

    @property
    def drag(self) -> float:
        """Coefficient ``(pi/T)(v0/c)`` coupling the cloud velocity into the particle."""
        return math.pi / self.T * self.v0 / self.c

    @property
    def pull(self) -> float:
        """Coefficient ``(pi/T)(c/v0)`` coupling the particle velocity into the cloud."""
        return math.pi / self.T * self.c / self.v0

    @property
    def arc_scales(self) -> ArcScales:
        return ArcScales(v0=self.v0, T=self.T, c=self.c)

    def rhs(self, t, y):
        X, Xd, x, xd, Xi, Xid, xi, xid = y
        e = self.pol.e_alpha
        k1, k2 = self.drag, self.pull
        return np.array([
            Xd, -k1 * xd,
            xd, k2 * (Xd - self.v0),
            Xid, -k1 * xid,
            xid, k2 * (Xid - e * self.v0),
        ])

    def launch_velocities(self) -> dict[str, float]:
        """Velocities at the start of every arc (initial condition and collision reset)."""
        e = self.pol.e_alpha
        return {"Xdot": self.v0, "xdot": self.c, "Xidot": e * self.v0, "xidot": e * self.c}

    def initial_state(self) -> KinematicState:
        return KinematicState(X=0.0, x=0.0, Xi=0.0, xi=0.0, t=0.0, **self.launch_velocities())


def build_eom(params: ParticleParams, pol: SpinPolarization, r: int = 0) -> ODESystem:
    scales = derive_scales(params)
    idx = InertonIndex.from_scales(r, scales)
    if idx.Tr <= 0 or idx.v0r <= 0:
        raise DomainError(f"inerton r={r} has zero speed or lifetime; no dynamics to integrate")
    return ODESystem(params=params, pol=pol, r=idx.r, v0=idx.v0r, T=idx.Tr, c=params.c)


@dataclass
class Trajectory:
    """Time-ordered samples of an integrated solution.

    ``collisions`` holds the pre-collision (left-limit) state reached at the
    end of every arc; the sample at a collision instant is the re-launched
    state.
    """

    times: np.ndarray
    states: np.ndarray
    params: ParticleParams
    system: ODESystem
    integrator_meta: dict
    collisions: list[KinematicState] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def samples(self) -> list[KinematicState]:
        return [KinematicState.from_vector(y, t) for t, y in zip(self.times, self.states)]

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        return self.states[:, STATE_NAMES.index(name)]

    def arcs(self) -> Iterable[np.ndarray]:
        """Index arrays of the samples on each inter-collision arc ``[nT, (n+1)T)``."""
        n = tr.period_index(self.times, self.system.T)
        last = int(n[-1])
        for k in range(last + 1):
            idx = np.flatnonzero(n == k)
            if len(idx):
                yield idx

    def to_csv(self, target=None) -> str:
        """Write ``t,X,Xdot,...`` rows (shortest round-trip floats); returns the text."""
        buf = io.StringIO()
        buf.write(",".join(CSV_HEADER) + "\n")
        for t, y in zip(self.times, self.states):
            buf.write(",".join(format_float(v) for v in (t, *y)) + "\n")
        text = buf.getvalue()
        if target is not None:
            if hasattr(target, "write"):
                target.write(text)
            else:
                with open(target, "w", newline="") as fh:
                    fh.write(text)
        return text


def format_float(value: float) -> str:
    """Shortest decimal string that round-trips (at most 17 significant digits)."""
    return repr(float(value))


def _reset(state: np.ndarray, system: ODESystem) -> np.ndarray:
    out = state.copy()
    for name, value in system.launch_velocities().items():
        out[STATE_NAMES.index(name)] = value
    return out


def integrate(
    system: ODESystem,
    init: KinematicState | None = None,
    t_end: float | None = None,
    tol: Tolerance | None = None,
    samples_per_arc: int = 64,
    method: str = "DOP853",
) -> Trajectory:
    """Integrate ``system`` from ``init`` to ``t_end`` arc by arc.

    ``t_end`` defaults to one period. A collision that falls exactly on
    ``t_end`` is applied, so the last sample is the re-launched state.
    """
    tol = tol or Tolerance()
    T = system.T
    if t_end is None:
        t_end = T
    if not t_end > 0:
        raise UsageError(f"t_end must be positive, got {t_end!r}")
    if samples_per_arc < 2:
        raise UsageError("samples_per_arc must be at least 2")
    default_init = system.initial_state()
    init = init or default_init
    if init.t != 0.0:
        raise UsageError("integration starts at t = 0")
    custom_init = not np.array_equal(init.vector(), default_init.vector())

    n_full = int(tr.period_index(t_end, T))
    ends_on_collision = math.isclose(n_full * T, t_end, rel_tol=tr.PERIOD_SNAP_RTOL)
    n_arcs = n_full if ends_on_collision else n_full + 1

    times: list[np.ndarray] = []
    states: list[np.ndarray] = []
    collisions: list[KinematicState] = []
    y = init.vector()
    nfev = 0
    steps = 0
    for k in range(n_arcs):
        t0 = k * T
        hits_collision = k < n_full
        t1 = (k + 1) * T if hits_collision else t_end
        if k == n_arcs - 1:
            t1 = t_end
        sol = solve_ivp(
            system.rhs, (t0, t1), y, method=method,
            rtol=tol.rel, atol=tol.abs, dense_output=True,
        )
        nfev += int(sol.nfev)
        if sol.status != 0:
            last = KinematicState.from_vector(sol.y[:, -1], sol.t[-1]) if sol.y.size else None
            raise IntegrationError(f"integration failed on arc {k}: {sol.message}", last_state=last)
        if not np.all(np.isfinite(sol.y)):
            good = np.flatnonzero(np.all(np.isfinite(sol.y), axis=0))
            last = KinematicState.from_vector(sol.y[:, good[-1]], sol.t[good[-1]]) if len(good) else None
            raise NumericalBlowupError(f"non-finite state on arc {k}", last_state=last)
        steps += len(sol.t) - 1
        grid = np.linspace(t0, t1, samples_per_arc + 1)
        dense = sol.sol(grid).T
        # the arc end is the next arc's start; keep it only on the final arc
        keep = slice(None) if k == n_arcs - 1 else slice(None, -1)
        times.append(grid[keep])
        states.append(dense[keep])
        y_end = sol.y[:, -1]
        if hits_collision:
            collisions.append(KinematicState.from_vector(y_end, t1))
            y = _reset(y_end, system)
        else:
            y = y_end

    times_arr = np.concatenate(times)
    states_arr = np.concatenate(states)
    if ends_on_collision:
        states_arr[-1] = y
    meta = {
        "method": method,
        "abs_tol": tol.abs,
        "rel_tol": tol.rel,
        "arcs": n_arcs,
        "steps": steps,
        "nfev": nfev,
        "non_default_initial_conditions": custom_init,
        "free_m0": system.params.m0_is_free,
    }
    return Trajectory(
        times=times_arr, states=states_arr, params=system.params, system=system,
        integrator_meta=meta, collisions=collisions,
    )


def tilde_transform(state: KinematicState, params: ParticleParams):
    """Shifted cloud velocities ``xdot - (pi/T) sqrt(M0/m0) X`` and the intrinsic analogue."""
    if not params.m0 > 0:
        raise DomainError("cloud rest mass m0 must be positive")
    k = math.pi / derive_scales(params).T * math.sqrt(params.M0 / params.m0)
    return state.xdot - k * state.X, state.xidot - k * state.Xi


def tilde_inverse(xtilde_dot: float, X: float, params: ParticleParams) -> float:
    if not params.m0 > 0:
        raise DomainError("cloud rest mass m0 must be positive")
    k = math.pi / derive_scales(params).T * math.sqrt(params.M0 / params.m0)
    return xtilde_dot + k * X


def closed_form_states(times, system: ODESystem) -> np.ndarray:
    """Closed-form ``(X, Xdot, x, xdot, Xi, Xidot, xi, xidot)`` at ``times`` for ``system``."""
    sc = system.arc_scales
    e = system.pol.e_alpha
    X, Xd = tr.particle_state(times, sc)
    q, qd = tr.cloud_state(times, sc)
    return np.column_stack([X, Xd, q, qd, e * X, e * Xd, e * q, e * qd])


@dataclass(frozen=True)
class VariableError:
    max_abs: float
    max_rel: float
    rms: float


@dataclass(frozen=True)
class ErrorReport:
    """Per-variable deviation of a trajectory from the closed forms.

    ``max_rel`` is normalised by the largest magnitude the reference reaches,
    so it stays meaningful where the variable itself passes through zero.
    """

    errors: dict
    threshold: float

    @property
    def max_rel(self) -> float:
        return max(err.max_rel for err in self.errors.values())

    @property
    def passed(self) -> bool:
        return self.max_rel <= self.threshold

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def lines(self) -> list[str]:
        out = [f"{'variable':<8} {'max_abs':>12} {'max_rel':>12} {'rms':>12}"]
        for name, err in self.errors.items():
            out.append(f"{name:<8} {err.max_abs:12.3e} {err.max_rel:12.3e} {err.rms:12.3e}")
        out.append(f"threshold {self.threshold:.1e}: {self.status}")
        return out


def compare_states(numeric: np.ndarray, reference: np.ndarray, threshold: float) -> ErrorReport:
    errors = {}
    for j, name in enumerate(STATE_NAMES):
        diff = numeric[:, j] - reference[:, j]
        scale = float(np.max(np.abs(reference[:, j])))
        max_abs = float(np.max(np.abs(diff)))
        errors[name] = VariableError(
            max_abs=max_abs,
            max_rel=max_abs / scale if scale > 0 else max_abs,
            rms=float(np.sqrt(np.mean(diff**2))),
        )
    return ErrorReport(errors=errors, threshold=threshold)


def verify_against_analytic(traj: Trajectory, threshold: float = DEFAULT_PASS_RTOL) -> ErrorReport:
    if traj is None or len(traj) == 0:
        raise UsageError("cannot verify an empty trajectory")
    reference = closed_form_states(traj.times, traj.system)
    return compare_states(traj.states, reference, threshold)


def trajectory_from_closed_form(system: ODESystem, t_end: float, samples_per_arc: int = 64) -> Trajectory:
    """Sample the closed forms on the same grid :func:`integrate` would use."""
    T = system.T
    n = max(1, int(math.ceil(t_end / T - tr.PERIOD_SNAP_RTOL)))
    times = np.unique(np.concatenate([
        np.linspace(k * T, min((k + 1) * T, t_end), samples_per_arc + 1) for k in range(n)
    ]))
    return Trajectory(
        times=times, states=closed_form_states(times, system), params=system.params,
        system=system, integrator_meta={"method": "closed-form"},
    )

