"""Kuramoto dynamics in deviation form, a fixed-step RK4 integrator, and run monitors."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .graph import Graph
from .state import FrequencyVector, energy, is_centered, sigma_norm

PIS_TOL = 1e-9


class SimulationError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


@dataclass(frozen=True)
class SimConfig:
    """Integrator settings. ``None`` fields are filled by :func:`resolve_config`."""

    step: float | None = None
    horizon: float | None = None
    sync_tol: float = 1e-8
    record_every: int = 1
    stop_on_sync: bool = True

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if self.horizon is not None and self.step is not None and self.horizon < self.step:
            raise ValueError("horizon must be at least one step")
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


def default_step(g: Graph, K: float) -> float:
    return min(0.01, 0.1 / max(1.0, K * max(g.degrees) / g.n))


def default_horizon(f: FrequencyVector) -> float:
    return 200.0 / max(sigma_norm(f), 0.1)


def resolve_config(cfg: SimConfig | None, g: Graph, f: FrequencyVector, K: float) -> SimConfig:
    cfg = cfg or SimConfig()
    step = cfg.step if cfg.step is not None else default_step(g, K)
    horizon = cfg.horizon if cfg.horizon is not None else default_horizon(f)
    return replace(cfg, step=step, horizon=max(horizon, step))


def _check_dims(g: Graph, f: FrequencyVector, phi: np.ndarray) -> None:
    if f.n != g.n or phi.shape != (g.n,):
        raise ValueError(
            f"dimension mismatch: graph n={g.n}, frequencies {f.n}, phases {phi.shape}")


def kuramoto_rhs(g: Graph, f: FrequencyVector, K: float, phi: np.ndarray) -> np.ndarray:
    """Phase velocities dev_i + (K/n) * sum_{k in N_i} sin(phi_k - phi_i)."""
    phi = np.asarray(phi, dtype=float)
    _check_dims(g, f, phi)
    if K < 0:
        raise ValueError("coupling K must be nonnegative")
    return _rhs(g, f.dev, K, phi)


def _rhs(g: Graph, dev: np.ndarray, K: float, phi: np.ndarray) -> np.ndarray:
    u, v = g.edge_index
    s = np.sin(phi[v] - phi[u])
    coupling = np.bincount(u, s, g.n) - np.bincount(v, s, g.n)
    return dev + (K / g.n) * coupling


def sync_residual(g: Graph, f: FrequencyVector, K: float, phi: np.ndarray) -> float:
    """Infinity norm of the phase velocities; zero exactly at an equilibrium."""
    return float(np.max(np.abs(kuramoto_rhs(g, f, K, phi))))


def lyapunov_value(g: Graph, f: FrequencyVector, K: float, phi: np.ndarray) -> float:
    """Potential -sum(dev_k phi_k) - (K/n) sum_{edges} cos(phi_i - phi_j)."""
    phi = np.asarray(phi, dtype=float)
    _check_dims(g, f, phi)
    u, v = g.edge_index
    return float(-np.dot(f.dev, phi) - (K / g.n) * np.cos(phi[u] - phi[v]).sum())


def energy_rate(g: Graph, f: FrequencyVector, K: float, phi: np.ndarray) -> float:
    """dE/dt = sum 2 phi_i phi_dot_i, evaluated from the right-hand side."""
    return float(2.0 * np.dot(phi, kuramoto_rhs(g, f, K, phi)))


def lemma2_residual(g: Graph, f: FrequencyVector, K: float, phi: np.ndarray, D: float) -> float:
    """Slack of the energy differential inequality; nonnegative whenever spread <= D < pi.

    slack = 2*sigma*sqrt(E) - 2*K*L*(sin D / D)*E - dE/dt
    """
    phi = np.asarray(phi, dtype=float)
    if not 0 < D < math.pi:
        raise ValueError("D must lie in (0, pi)")
    if not is_centered(phi):
        raise ValueError("phases must sum to zero")
    spread = float(phi.max() - phi.min())
    if spread > D + 1e-12:
        raise ValueError(f"inequality hypothesis violated: spread {spread:.6g} > D={D:.6g}")
    e = energy(phi)
    bound = 2 * sigma_norm(f) * math.sqrt(e) - 2 * K * g.constants.L * (math.sin(D) / D) * e
    return bound - energy_rate(g, f, K, phi)


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one run; ``states[i]`` is the phase vector at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    D: np.ndarray
    E: np.ndarray
    V: np.ndarray
    residual: np.ndarray
    K: float
    config: SimConfig

    @property
    def synced(self) -> bool:
        return bool(self.residual[-1] <= self.config.sync_tol)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _rk4(g: Graph, dev: np.ndarray, K: float, phi: np.ndarray, h: float,
         k1: np.ndarray) -> np.ndarray:
    k2 = _rhs(g, dev, K, phi + 0.5 * h * k1)
    k3 = _rhs(g, dev, K, phi + 0.5 * h * k2)
    k4 = _rhs(g, dev, K, phi + h * k3)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(g: Graph, f: FrequencyVector, K: float, phi0: np.ndarray,
              cfg: SimConfig | None = None) -> Trajectory:
    """Classical RK4 with re-centering after each step.

    An uncentered start is accepted: the mean phase is a conserved quantity of
    the flow, so the run keeps it fixed and the energy monitor is taken about
    it. The result is the centered run shifted by that mean. With ``stop_on_sync`` the run ends at the first step whose residual is at
    most ``sync_tol``; the state is then an equilibrium to that tolerance.
    """
    phi = np.array(phi0, dtype=float)
    _check_dims(g, f, phi)
    if K < 0:
        raise ValueError("coupling K must be nonnegative")
    offset = float(phi.mean())
    cfg = resolve_config(cfg, g, f, K)
    nsteps = max(1, math.ceil(cfg.horizon / cfg.step - 1e-9))
    h = cfg.horizon / nsteps
    dev = f.dev
    u, v = g.edge_index
    coef = K / g.n

    times, states, res = [], [], []

    def record(t, p, k1):
        times.append(t)
        states.append(p.copy())
        res.append(float(np.max(np.abs(k1))))

    k1 = _rhs(g, dev, K, phi)
    record(0.0, phi, k1)
    done = cfg.stop_on_sync and res[-1] <= cfg.sync_tol
    i = 0
    while not done and i < nsteps:
        i += 1
        t = i * h
        with np.errstate(over="ignore", invalid="ignore"):
            phi = _rk4(g, dev, K, phi, h, k1)
            phi -= phi.mean() - offset
        if not np.all(np.isfinite(phi)):
            raise SimulationError("non-finite state", t)
        k1 = _rhs(g, dev, K, phi)
        done = cfg.stop_on_sync and float(np.max(np.abs(k1))) <= cfg.sync_tol
        if done or i % cfg.record_every == 0 or i == nsteps:
            record(t, phi, k1)

    states_arr = np.array(states)
    spread = states_arr.max(axis=1) - states_arr.min(axis=1)
    centered = states_arr - offset
    en = np.einsum("ij,ij->i", centered, centered)
    pot = -states_arr @ dev - coef * np.cos(states_arr[:, u] - states_arr[:, v]).sum(axis=1)
    return Trajectory(np.array(times), states_arr, spread, en, pot, np.array(res), K, cfg)


class PISResult(NamedTuple):
    passed: bool
    first_violation: float | None


def pis_check(traj: Trajectory, D: float, tol: float = PIS_TOL) -> PISResult:
    """Pass iff the phase spread stays at or below ``D`` (plus ``tol``) at every sample."""
    if D < traj.D[0] - tol:
        raise ValueError(f"D={D:.6g} is below the initial spread {traj.D[0]:.6g}")
    bad = np.flatnonzero(traj.D > D + tol)
    if bad.size:
        return PISResult(False, float(traj.times[bad[0]]))
    return PISResult(True, None)
