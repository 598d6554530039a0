"""Optimisation-based coupling bound: per-pair minimum of the sine-sum denominator.

For every pair (k, l) we minimise

    sum_{i in N_k} sin(phi_k - phi_i) + sum_{j in N_l} sin(phi_j - phi_l)

over phase vectors with phi_k = phi_l + D, sum(phi) = 0, sum(phi^2) <= E0 and
phi_l <= phi_m <= phi_k, and turn the minimum into K_kl = n |dev_k - dev_l| / min.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import Graph
from .state import FrequencyVector, energy

N_RANDOM_STARTS = 64
TOL = 1e-10
MAX_ITER = 5000
STEP = 1.0
FEAS_TOL = 1e-8

STATUS_CONVERGED = "converged"
STATUS_BOUNDARY = "boundary"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class PairProblem:
    """Minimise the denominator for pair (k, l); k holds the max phase, l the min."""

    graph: Graph
    k: int
    l: int
    D: float
    E0: float

    def __post_init__(self):
        n = self.graph.n
        if self.k == self.l or not (1 <= self.k <= n and 1 <= self.l <= n):
            raise ValueError(f"invalid pair ({self.k}, {self.l}) for n={n}")
        if not 0 < self.D < math.pi:
            raise ValueError("D must lie in (0, pi)")
        if self.E0 < 0:
            raise ValueError("E0 must be nonnegative")

    @property
    def radius2(self) -> float:
        """Energy left for the interior phases once the pair sits at +-D/2."""
        return self.E0 - self.D ** 2 / 2

    def interior(self) -> list[int]:
        return [m for m in range(1, self.graph.n + 1) if m not in (self.k, self.l)]


@dataclass(frozen=True)
class PairBoundResult:
    k: int
    l: int
    min_denominator: float
    argmin: np.ndarray | None = field(repr=False)
    K_kl: float
    starts_used: int
    status: str


def denominator(g: Graph, k: int, l: int, phi: np.ndarray) -> float:
    """Sine-sum denominator evaluated directly on a full phase vector (1-indexed k, l)."""
    phi = np.asarray(phi, dtype=float)
    top = sum(math.sin(phi[k - 1] - phi[i - 1]) for i in g.neighbors(k))
    bottom = sum(math.sin(phi[j - 1] - phi[l - 1]) for j in g.neighbors(l))
    return top + bottom


def constraint_violation(prob: PairProblem, phi: np.ndarray) -> float:
    """Largest violation among the four constraints (0 when feasible)."""
    phi = np.asarray(phi, dtype=float)
    pk, pl = phi[prob.k - 1], phi[prob.l - 1]
    return max(
        abs(pk - pl - prob.D),
        abs(float(phi.sum())),
        max(0.0, energy(phi) - prob.E0),
        max(0.0, float(pl - phi.min())),
        max(0.0, float(phi.max() - pk)),
    )


def _encode(prob: PairProblem):
    g = prob.graph
    inner = prob.interior()
    nk, nl = set(g.neighbors(prob.k)), set(g.neighbors(prob.l))
    a = np.array([1.0 if i in nk else 0.0 for i in inner])
    b = np.array([1.0 if i in nl else 0.0 for i in inner])
    const = 2.0 * math.sin(prob.D) if prob.l in nk else 0.0
    return inner, a, b, const


def _lift(prob: PairProblem, inner: list[int], u: np.ndarray) -> np.ndarray:
    n = prob.graph.n
    c = -float(u.sum()) / n
    phi = np.empty(n)
    phi[prob.k - 1] = c + prob.D / 2
    phi[prob.l - 1] = c - prob.D / 2
    for idx, m in enumerate(inner):
        phi[m - 1] = c + u[idx]
    return phi


def _pair_rng(seed: int, k: int, l: int) -> np.random.Generator:
    return np.random.default_rng([seed, min(k, l), max(k, l)])


def minimize_pair(prob: PairProblem, seed: int = 0, n_random: int = N_RANDOM_STARTS,
                  numerator: float = 0.0) -> PairBoundResult:
    """Multistart projected-gradient minimisation of the pair denominator.

    The problem for (l, k) is the reflection phi -> -phi of the one for (k, l),
    so both orientations are solved in the (min, max) index order and the
    argmin is reflected back; this makes the result exactly orientation-free.
    ``numerator`` is n |dev_k - dev_l|, used only to fill ``K_kl``.
    """
    if prob.k > prob.l:
        res = minimize_pair(PairProblem(prob.graph, prob.l, prob.k, prob.D, prob.E0),
                            seed, n_random, numerator)
        argmin = None if res.argmin is None else -res.argmin
        return PairBoundResult(prob.k, prob.l, res.min_denominator, argmin, res.K_kl,
                               res.starts_used, res.status)

    r2 = prob.radius2
    if r2 < 0:
        return PairBoundResult(prob.k, prob.l, math.nan, None, math.nan, 0, STATUS_INFEASIBLE)

    inner, a, b, const = _encode(prob)
    h = prob.D / 2
    n = prob.graph.n
    if not inner or r2 <= 1e-15:
        # feasible set is the single point with every interior phase at the centre
        u = np.zeros(len(inner))
        phi = _lift(prob, inner, u)
        den = denominator(prob.graph, prob.k, prob.l, phi)
        return PairBoundResult(prob.k, prob.l, den, phi, _k_value(numerator, den), 1,
                               STATUS_BOUNDARY)

    m = len(inner)
    rng = _pair_rng(seed, prob.k, prob.l)
    starts = np.vstack([
        np.zeros((1, m)),
        np.full((1, m), -h),
        rng.uniform(-h, h, size=(n_random, m)),
    ])
    values, sols, _, conv = _kernels.multistart(starts, a, b, const, h, r2, float(n),
                                                STEP, TOL, MAX_ITER)
    best = int(np.argmin(values))
    phi = _lift(prob, inner, sols[best])
    den = denominator(prob.graph, prob.k, prob.l, phi)
    status = STATUS_CONVERGED if conv[best] else STATUS_BOUNDARY
    return PairBoundResult(prob.k, prob.l, den, phi, _k_value(numerator, den),
                           len(starts), status)


def _k_value(numerator: float, den: float) -> float:
    if numerator == 0.0:
        return 0.0
    return numerator / den if den > 0 else math.inf


@dataclass(frozen=True)
class KStarResult:
    value: float
    pair: tuple[int, int] | None
    pairs: list[PairBoundResult] = field(repr=False)


def k_star(g: Graph, f: FrequencyVector, phi0_or_E0, D: float, seed: int = 0,
           n_random: int = N_RANDOM_STARTS) -> KStarResult:
    """Maximum of K_kl over all n(n-1)/2 pairs; infeasible pairs are skipped.

    ``phi0_or_E0`` is either the centered initial phase vector (then D0 <= D is
    checked) or the energy budget E0 directly.
    """
    if np.ndim(phi0_or_E0) == 0:
        E0 = float(phi0_or_E0)
    else:
        phi0 = np.asarray(phi0_or_E0, dtype=float)
        E0 = energy(phi0)
        D0 = float(phi0.max() - phi0.min())
        if not 0 < D0 <= D + 1e-12:
            raise ValueError(f"need 0 < D0 <= D, got D0={D0:.6g}, D={D:.6g}")
    if not 0 < D < math.pi:
        raise ValueError("D must lie in (0, pi)")
    if not E0 < D ** 2:
        raise ValueError("the energy budget must satisfy E0 < D^2")
    if f.n != g.n:
        raise ValueError("frequency vector does not match graph size")

    results = []
    best, best_pair = 0.0, None
    for k, l in itertools.combinations(range(1, g.n + 1), 2):
        num = g.n * abs(float(f.dev[k - 1] - f.dev[l - 1]))
        res = minimize_pair(PairProblem(g, k, l, D, E0), seed, n_random, num)
        results.append(res)
        if res.status != STATUS_INFEASIBLE and res.K_kl > best:
            best, best_pair = res.K_kl, (k, l)
    if best_pair is None and any(r.status != STATUS_INFEASIBLE for r in results):
        best_pair = (1, 2)
    return KStarResult(best, best_pair, results)


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin: np.ndarray | None = field(repr=False)
    spacing: float
    lipschitz: float
    feasible_points: int

    @property
    def feasible(self) -> bool:
        return self.argmin is not None

    @property
    def tolerance(self) -> float:
        return self.lipschitz * self.spacing + 1e-8


def brute_force_oracle(prob: PairProblem, grid_points: int = 2001,
                       chunk: int = 1 << 20) -> OracleResult:
    """Grid search over the interior phases for small n.

    Uses a parametrisation independent of :func:`minimize_pair`: the interior
    phases x (sum S) are gridded over [-D, D] and the pair is recovered from
    the two equalities, phi_k = (D - S)/2 and phi_l = (-D - S)/2.
    """
    g, k, l, D, E0 = prob.graph, prob.k, prob.l, prob.D, prob.E0
    n = g.n
    if n > 5:
        raise ValueError("brute-force oracle is limited to n <= 5")
    inner = prob.interior()
    m = len(inner)
    lip = float(n * (n - 1))
    if m == 0:
        phi = np.zeros(n)
        phi[k - 1], phi[l - 1] = D / 2, -D / 2
        ok = energy(phi) <= E0 + 1e-12
        return OracleResult(denominator(g, k, l, phi) if ok else math.nan,
                            phi if ok else None, 0.0, lip, int(ok))

    axis = np.linspace(-D, D, grid_points)
    spacing = float(axis[1] - axis[0])
    pos = {mm: i for i, mm in enumerate(inner)}
    best_val, best_phi, count = math.inf, None, 0
    total = grid_points ** m
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        x = np.empty((flat.size, m))
        rem = flat
        for j in range(m - 1, -1, -1):
            x[:, j] = axis[rem % grid_points]
            rem = rem // grid_points
        S = x.sum(axis=1)
        pk = (D - S) / 2
        pl = (-D - S) / 2
        en = (x * x).sum(axis=1) + pk ** 2 + pl ** 2
        ok = (en <= E0) & np.all(x >= pl[:, None], axis=1) & np.all(x <= pk[:, None], axis=1)
        if not ok.any():
            continue
        x, pk, pl = x[ok], pk[ok], pl[ok]
        count += int(ok.sum())

        def phase(i):
            if i == k:
                return pk
            if i == l:
                return pl
            return x[:, pos[i]]

        val = np.zeros(x.shape[0])
        for i in g.neighbors(k):
            val += np.sin(pk - phase(i))
        for j in g.neighbors(l):
            val += np.sin(phase(j) - pl)
        idx = int(np.argmin(val))
        if val[idx] < best_val:
            best_val = float(val[idx])
            best_phi = np.empty(n)
            best_phi[k - 1], best_phi[l - 1] = pk[idx], pl[idx]
            for mm in inner:
                best_phi[mm - 1] = x[idx, pos[mm]]
    if best_phi is None:
        return OracleResult(math.nan, None, spacing, lip, 0)
    return OracleResult(best_val, best_phi, spacing, lip, count)
