"""Phase and frequency vectors and the scalar summaries derived from them.

Phases are plain float arrays in radians and are never wrapped modulo 2*pi.
A phase vector is "centered" when it sums to zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .graph import Graph

TIE_TOL = 1e-9


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"{name} must be a 1-d vector with at least 2 entries")
    return arr


def is_centered(phi: np.ndarray) -> bool:
    return abs(float(np.sum(phi))) <= 1e-9 * len(phi)


def center_phases(phi: Sequence[float] | np.ndarray) -> np.ndarray:
    """Subtract the mean phase so the result sums to zero."""
    phi = _as_vector(phi, "phases")
    return phi - phi.mean()


@dataclass(frozen=True)
class FrequencyVector:
    """Natural frequencies ``w`` split into mean ``wbar`` and deviations ``dev``."""

    w: np.ndarray
    wbar: float
    dev: np.ndarray

    @property
    def n(self) -> int:
        return self.dev.size

    def scaled(self, c: float) -> "FrequencyVector":
        return deviations(self.w * c)


def deviations(w: Sequence[float] | np.ndarray) -> FrequencyVector:
    w = _as_vector(w, "frequencies").copy()
    wbar = float(w.mean())
    return FrequencyVector(w=w, wbar=wbar, dev=w - wbar)


def energy(phi: np.ndarray) -> float:
    """Squared Euclidean norm of the phase vector."""
    phi = np.asarray(phi, dtype=float)
    return float(np.dot(phi, phi))


def sigma_norm(f: FrequencyVector) -> float:
    return float(np.linalg.norm(f.dev))


class Spread(NamedTuple):
    D: float
    argmax: tuple[int, ...]  # 1-indexed
    argmin: tuple[int, ...]


def max_phase_spread(phi: np.ndarray, tol: float = TIE_TOL) -> Spread:
    """Max pairwise phase difference with every index attaining the max and min.

    Indices within ``tol`` of the extreme value count as ties.
    """
    phi = np.asarray(phi, dtype=float)
    hi, lo = phi.max(), phi.min()
    imax = tuple(int(i) + 1 for i in np.flatnonzero(phi >= hi - tol))
    imin = tuple(int(i) + 1 for i in np.flatnonzero(phi <= lo + tol))
    return Spread(float(hi - lo), imax, imin)


def edge_difference_sum(g: Graph, phi: np.ndarray) -> float:
    u, v = g.edge_index
    d = phi[u] - phi[v]
    return float(np.dot(d, d))


def lemma1_sandwich(g: Graph, phi: np.ndarray) -> tuple[float, float, float]:
    """Return ``(L*n*E, sum over edges of (phi_i - phi_j)^2, n*E)``.

    For a centered phase vector the middle term lies between the outer two.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.size != g.n:
        raise ValueError(f"phase vector has {phi.size} entries, graph has {g.n} nodes")
    if not is_centered(phi):
        raise ValueError("phases must sum to zero")
    e = energy(phi)
    return g.constants.L * g.n * e, edge_difference_sum(g, phi), g.n * e
