"""File formats: graph text files, instance JSON, CSV outputs and run manifests."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bounds import SyncCertificate
from .dynamics import Trajectory
from .experiments import ComparisonRow, FeasibilityRow
from .graph import Graph, GraphError, build_graph
from .optimizer import PairBoundResult
from .state import FrequencyVector, center_phases, deviations


class InstanceError(ValueError):
    """Malformed graph or instance file; the message carries file and line."""


# -- graph text format ----------------------------------------------------------

def parse_graph_text(text: str, source: str = "<graph>") -> Graph:
    """First non-comment line ``n m``, then ``m`` lines ``u v``; ``#`` starts a comment."""
    header = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise InstanceError(f"{source}:{lineno}: expected integers, got {raw.strip()!r}")
        if len(nums) != 2:
            raise InstanceError(f"{source}:{lineno}: expected two integers, got {len(nums)}")
        if header is None:
            header = nums
        else:
            edges.append((nums[0], nums[1]))
    if header is None:
        raise InstanceError(f"{source}: empty graph file")
    n, m = header
    if len(edges) != m:
        raise InstanceError(f"{source}: header announces {m} edges, found {len(edges)}")
    try:
        return build_graph(n, edges)
    except GraphError as exc:
        raise InstanceError(f"{source}: {exc}") from exc


def read_graph_file(path: str | Path) -> Graph:
    path = Path(path)
    return parse_graph_text(path.read_text(), str(path))


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# -- instance JSON ----------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    graph: Graph
    freqs: FrequencyVector
    phases: np.ndarray  # centered

    def to_json(self) -> str:
        return json.dumps({
            "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.edges]},
            "frequencies": self.freqs.w.tolist(),
            "initial_phases": self.phases.tolist(),
        }, indent=2)


def parse_instance(text: str, source: str = "<instance>") -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        gdoc = doc["graph"]
        g = build_graph(int(gdoc["n"]), [tuple(e) for e in gdoc["edges"]])
        w = np.asarray(doc["frequencies"], dtype=float)
        phi = np.asarray(doc["initial_phases"], dtype=float)
    except KeyError as exc:
        raise InstanceError(f"{source}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{source}: {exc}") from exc
    if w.shape != (g.n,) or phi.shape != (g.n,):
        raise InstanceError(
            f"{source}: frequencies and initial_phases must each have n={g.n} entries")
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(phi))):
        raise InstanceError(f"{source}: non-finite number in instance")
    return Instance(g, deviations(w), center_phases(phi))


def read_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), str(path))


# -- CSV ------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "" if math.isnan(x) else repr(x)
    return str(x)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence],
              comment: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    return path


CERT_HEADER = ("instance_id", "D", "D0", "E0", "k_energy", "k_analytic", "k_star", "k_ref3",
               "k_ref5", "flag_ours", "flag_ref3", "flag_ref5", "winner")
PAIR_HEADER = ("k", "l", "min_denominator", "K_kl", "status", "starts_used")
EXP1_HEADER = ("n", "frac_ours", "frac_ref3", "frac_ref5")
EXP2_HEADER = ("topology", "n", "feasible_count", "mean_ours", "mean_ref3", "mean_ref5",
               "frac_beat_ref3", "frac_beat_ref5")


def certificate_row(instance_id: str, c: SyncCertificate) -> tuple:
    return (instance_id, c.D, c.D0, c.E0, c.k_energy, c.k_analytic, c.k_star, c.k_ref3,
            c.k_ref5, c.flags["ours"], c.flags["ref3"], c.flags["ref5"], c.winner)


def write_certificates(path, items: Iterable[tuple[str, SyncCertificate]]) -> Path:
    return write_csv(path, CERT_HEADER, (certificate_row(i, c) for i, c in items))


def write_pair_report(path, pairs: Iterable[PairBoundResult]) -> Path:
    return write_csv(path, PAIR_HEADER,
                     ((p.k, p.l, p.min_denominator, p.K_kl, p.status, p.starts_used)
                      for p in pairs))


def trajectory_header(n: int) -> list[str]:
    return ["t"] + [f"phi_{i}" for i in range(1, n + 1)] + ["D_t", "E_t", "V", "residual"]


def write_trajectory(path, traj: Trajectory) -> Path:
    n = traj.states.shape[1]
    rows = (
        [traj.times[i], *traj.states[i], traj.D[i], traj.E[i], traj.V[i], traj.residual[i]]
        for i in range(traj.times.size)
    )
    return write_csv(path, trajectory_header(n), rows)


def write_experiment1(path, rows: Sequence[FeasibilityRow], seed: int, samples: int) -> Path:
    return write_csv(path, EXP1_HEADER,
                     ((r.n, r.frac_ours, r.frac_ref3, r.frac_ref5) for r in rows),
                     comment=f"seed={seed} samples={samples}")


def write_experiment2(path, rows: Sequence[ComparisonRow], seed: int, samples: int) -> Path:
    return write_csv(path, EXP2_HEADER,
                     ((r.topology, r.n, r.feasible_count, r.mean_ours, r.mean_ref3,
                       r.mean_ref5, r.frac_beat_ref3, r.frac_beat_ref5) for r in rows),
                     comment=f"seed={seed} samples={samples}")


def read_csv_rows(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- manifests ------------------------------------------------------------------

def manifest_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def write_manifest(output: str | Path, manifest: dict) -> Path:
    path = manifest_path(output)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
