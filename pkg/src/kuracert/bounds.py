"""Closed-form coupling bounds, initial-phase constraints and the combined certificate."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graph import Graph, pairwise_difference_norm
from .optimizer import N_RANDOM_STARTS, KStarResult, k_star
from .state import FrequencyVector, energy, sigma_norm

SLACK = 1e-12


def _lt(a: float, b: float) -> bool:
    """Strict a < b, conservatively requiring a margin of SLACK."""
    return a < b - SLACK


class Bound(NamedTuple):
    """A lower bound on K; ``value`` is nan when the bound does not apply."""

    value: float
    feasible: bool
    energy_only: bool = False


INFEASIBLE = Bound(math.nan, False)


def sinc(x: float) -> float:
    """Unnormalised sinc, sin(x)/x."""
    return 1.0 if x == 0 else math.sin(x) / x


def k_bound_energy(sigma: float, D: float, E0: float, L: float) -> float:
    """K that keeps the phase energy below its initial value: sigma*D / (sqrt(E0)*L*sin D)."""
    if E0 <= 0:
        raise ValueError("all initial phases equal: E0 must be positive")
    if not 0 < D < math.pi:
        raise ValueError("D must lie in (0, pi)")
    if not 0 < L <= 1:
        raise ValueError("L must lie in (0, 1]")
    return sigma * D / (math.sqrt(E0) * L * math.sin(D))


def k_bound_analytic(n: int, delta: int, dev: np.ndarray, D: float, E0: float) -> Bound:
    """Closed-form pairwise bound n*|dev_i - dev_j| / (2*delta*sin(D/2 - sqrt(E0 - D^2/2))).

    Applies for 0 < D <= pi/2 and E0 < 3D^2/4. Below E0 < D^2/2 it is not needed
    and the result is 0 with ``energy_only`` set.
    """
    if not (0 < D <= math.pi / 2) or not _lt(E0, 0.75 * D * D):
        return INFEASIBLE
    if _lt(E0, D * D / 2):
        return Bound(0.0, True, energy_only=True)
    dev = np.asarray(dev, dtype=float)
    spread = float(dev.max() - dev.min())
    if spread == 0.0:
        return Bound(0.0, True)
    arg = D / 2 - math.sqrt(max(0.0, E0 - D * D / 2))
    return Bound(n * spread / (2 * delta * math.sin(arg)), True)


def k_bound_ref3(n: int, w: np.ndarray, lambda2: float, phi0: np.ndarray) -> Bound:
    """Algebraic-connectivity bound 2n*|B_c^T w| / (lambda2 * pi * sinc(gamma_max)).

    gamma_max = max(pi/2, |B_c^T phi0|); applicable when |B_c^T phi0| < pi.
    """
    gap = pairwise_difference_norm(phi0)
    if not _lt(gap, math.pi):
        return INFEASIBLE
    gamma = max(math.pi / 2, gap)
    return Bound(2 * n * pairwise_difference_norm(w) / (lambda2 * math.pi * sinc(gamma)), True)


def ref5_spread(E0: float) -> float:
    return max(math.pi / 2, math.sqrt(2 * E0))


def k_bound_ref5(sigma: float, E0: float, Lstar: float) -> Bound:
    """Diameter-based bound sqrt(2)*sigma / (L* sin D) with D = max(pi/2, sqrt(2 E0)).

    With that choice of D the phase condition E0 < D^2/2 reduces to E0 < pi^2/8.
    """
    if E0 <= 0:
        raise ValueError("E0 must be positive")
    D = ref5_spread(E0)
    if not _lt(E0, math.pi ** 2 / 8) or not D < math.pi:
        return INFEASIBLE
    return Bound(math.sqrt(2) * sigma / (Lstar * math.sin(D)), True)


class PhaseFlags(NamedTuple):
    ours: bool
    ref3: bool
    ref5: bool

    @property
    def all(self) -> bool:
        return self.ours and self.ref3 and self.ref5


def phase_constraint_flags(phi0: np.ndarray, D: float | None = None) -> PhaseFlags:
    """Initial-phase constraints of the three conditions; ``D`` defaults to D0."""
    phi0 = np.asarray(phi0, dtype=float)
    E0 = energy(phi0)
    if D is None:
        D = float(phi0.max() - phi0.min())
    return PhaseFlags(
        ours=_lt(E0, D * D) and _lt(D, math.pi),
        ref3=_lt(pairwise_difference_norm(phi0), math.pi),
        ref5=_lt(E0, math.pi ** 2 / 8),
    )


@dataclass(frozen=True)
class SyncCertificate:
    """Every bound and precondition for one instance.

    Absent or inapplicable bounds are nan. ``k_ours`` is the coupling our
    condition certifies (nan if none applies) and ``winner`` names the term
    that sets it: trivial, energy, analytic, optimization or none.
    """

    D: float
    D0: float
    E0: float
    k_energy: float
    k_analytic: float
    k_star: float
    k_ref3: float
    k_ref5: float
    flags: dict[str, bool]
    k_ours: float
    winner: str
    star: KStarResult | None = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        return not math.isnan(self.k_ours)


def certificate(g: Graph, f: FrequencyVector, phi0: np.ndarray, D: float | None = None,
                with_k_star: bool = True, seed: int = 0,
                n_random: int = N_RANDOM_STARTS) -> SyncCertificate:
    """Evaluate all bounds for one instance; infeasibility is reported, not raised.

    ``phi0`` must be centered. ``D`` defaults to the initial spread D0. Our
    bound is max(energy bound, K*) when the optimisation applies, otherwise
    max(energy bound, analytic bound) when that applies.
    """
    phi0 = np.asarray(phi0, dtype=float)
    if phi0.shape != (g.n,) or f.n != g.n:
        raise ValueError("instance dimensions do not match the graph")
    consts = g.constants
    E0 = energy(phi0)
    D0 = float(phi0.max() - phi0.min())
    D = D0 if D is None else float(D)
    sigma = sigma_norm(f)
    homogeneous = float(f.dev.max() - f.dev.min()) == 0.0
    pf = phase_constraint_flags(phi0, D)

    flags = {
        "d_range": 0 < D0 <= D <= math.pi / 2,
        "e_three_quarters": _lt(E0, 0.75 * D * D),
        "e_half": _lt(E0, D * D / 2),
        "e_full": _lt(E0, D * D),
        "ours": pf.ours,
        "ref3": pf.ref3,
        "ref5": pf.ref5,
    }

    energy_ok = E0 > 0 and 0 < D < math.pi and D0 <= D
    k_en = k_bound_energy(sigma, D, E0, consts.L) if energy_ok else math.nan

    k_an = math.nan
    if energy_ok and flags["d_range"] and flags["e_three_quarters"]:
        k_an = k_bound_analytic(g.n, consts.delta, f.dev, D, E0).value

    k_st, star = math.nan, None
    if with_k_star and energy_ok and flags["e_full"]:
        star = k_star(g, f, E0, D, seed=seed, n_random=n_random)
        k_st = star.value

    r3 = k_bound_ref3(g.n, f.w, consts.lambda2, phi0)
    r5 = k_bound_ref5(sigma, E0, consts.Lstar) if E0 > 0 else INFEASIBLE

    if not math.isnan(k_st):
        k_ours, other, other_name = max(k_en, k_st), k_st, "optimization"
    elif not math.isnan(k_an):
        k_ours, other, other_name = max(k_en, k_an), k_an, "analytic"
    elif homogeneous and E0 == 0:
        k_ours, other, other_name = 0.0, 0.0, "trivial"
    else:
        k_ours, other, other_name = math.nan, math.nan, "none"

    if math.isnan(k_ours):
        winner = "none"
    elif k_ours == 0.0:
        winner = "trivial"
    elif k_en >= other:
        winner = "energy"
    else:
        winner = other_name

    return SyncCertificate(
        D=D, D0=D0, E0=E0, k_energy=k_en, k_analytic=k_an, k_star=k_st,
        k_ref3=r3.value, k_ref5=r5.value, flags=flags, k_ours=k_ours,
        winner=winner, star=star,
    )
