"""Vietoris-Rips persistent homology in dimensions 0..2.

Filtration values follow the diameter (edge-length) convention: a simplex
enters at the maximum pairwise distance of its vertices, vertices at 0.
Homology is over Z/2 via boundary-matrix column reduction (compiled kernel
with pure-Python fallback, see topomargin.backend).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .backend import reduce_boundary
from .ingest import PointCloud


class ResourceLimitError(RuntimeError):
    """Simplex budget exceeded before enumeration finished."""


DEFAULT_SIMPLEX_BUDGET = 5_000_000


@dataclass
class Filtration:
    """Sorted simplex list of a finite filtered complex.

    simplices: list of (vertex tuple, filtration value), sorted by
    (value, dimension, lexicographic vertices); faces therefore never
    appear after cofaces. max_dim bounds simplex dimension
    (= homology bound + 1).
    """

    simplices: list
    max_dim: int
    max_radius: float = math.inf

    def __len__(self) -> int:
        return len(self.simplices)

    def validate(self) -> None:
        """Check sortedness and face-before-coface; raises on violation."""
        order = {}
        prev_key = None
        for idx, (verts, value) in enumerate(self.simplices):
            key = (value, len(verts), verts)
            if prev_key is not None and key < prev_key:
                raise ValueError(f"simplices out of order at index {idx}")
            prev_key = key
            order[verts] = idx
        for verts, _ in self.simplices:
            if len(verts) == 1:
                continue
            for facet in combinations(verts, len(verts) - 1):
                if facet not in order:
                    raise ValueError(f"missing face {facet} of {verts}")
                if order[facet] > order[verts]:
                    raise ValueError(f"face {facet} appears after coface {verts}")


@dataclass
class PersistenceDiagram:
    """Per-dimension multisets of (birth, death) pairs.

    bars maps homology dimension k in {0, 1, 2} to an (m, 2) float array
    with death = inf for essential classes; rows sorted by (birth, death).
    """

    id: str = ""
    bars: dict = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for k in (0, 1, 2):
            arr = np.asarray(self.bars.get(k, np.empty((0, 2))), dtype=np.float64)
            if arr.size == 0:
                arr = np.empty((0, 2))
            arr = arr.reshape(-1, 2)
            if np.any(arr[:, 0] > arr[:, 1]):
                raise ValueError(f"bar with birth > death in dimension {k}")
            idx = np.lexsort((arr[:, 1], arr[:, 0]))
            norm[k] = arr[idx]
        self.bars = norm

    def n_bars(self, dim: int) -> int:
        return self.bars[dim].shape[0]

    def total_bars(self) -> int:
        return sum(self.bars[k].shape[0] for k in (0, 1, 2))


def rips_filtration(pc: PointCloud, max_dim: int = 3,
                    max_radius: float = math.inf,
                    budget: int = DEFAULT_SIMPLEX_BUDGET) -> Filtration:
    """Enumerate all simplices of dimension <= max_dim with diameter
    <= max_radius, by expanding cliques of the distance graph.

    Raises ResourceLimitError as soon as the simplex count would exceed
    `budget` (never hangs on oversized input).
    """
    if pc.n_points < 1:
        raise ValueError("point cloud must contain at least one point")
    if max_dim not in (1, 2, 3):
        raise ValueError(f"max_dim must be 1, 2 or 3, got {max_dim}")
    n = pc.n_points
    diff = pc.coords[:, None, :] - pc.coords[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))

    simplices = [((i,), 0.0) for i in range(n)]
    count = n
    if count > budget:
        raise ResourceLimitError(f"simplex budget {budget} exceeded")
    # forward neighbor lists under the radius cutoff
    nbrs = [np.nonzero(dist[i, i + 1:] <= max_radius)[0] + i + 1 for i in range(n)]

    stack = []
    for u in range(n):
        stack.append(((u,), nbrs[u], 0.0))
    while stack:
        verts, cands, diam = stack.pop()
        if len(verts) > max_dim:
            continue
        for pos in range(len(cands)):
            w = int(cands[pos])
            d = diam
            for v in verts:
                dvw = dist[v, w]
                if dvw > d:
                    d = dvw
            new_verts = verts + (w,)
            count += 1
            if count > budget:
                raise ResourceLimitError(
                    f"simplex budget {budget} exceeded at dimension {len(new_verts) - 1}")
            simplices.append((new_verts, float(d)))
            if len(new_verts) <= max_dim:
                rest = cands[pos + 1:]
                keep = rest[dist[w, rest] <= max_radius]
                stack.append((new_verts, keep, float(d)))
    simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return Filtration(simplices=simplices, max_dim=max_dim, max_radius=max_radius)


def _boundary_csr(f: Filtration):
    """Flatten the filtration into the (offsets, rows, dims, values) CSR
    form the reduction kernels consume. Column i holds the sorted indices
    of simplex i's facets."""
    m = len(f.simplices)
    index = {verts: i for i, (verts, _) in enumerate(f.simplices)}
    dims = np.empty(m, dtype=np.int64)
    values = np.empty(m, dtype=np.float64)
    offsets = np.empty(m + 1, dtype=np.int64)
    rows_list = []
    offsets[0] = 0
    for i, (verts, value) in enumerate(f.simplices):
        dims[i] = len(verts) - 1
        values[i] = value
        if len(verts) > 1:
            facets = sorted(index[fc] for fc in combinations(verts, len(verts) - 1))
            rows_list.extend(facets)
        offsets[i + 1] = len(rows_list)
    return offsets, np.array(rows_list, dtype=np.int64), dims, values


def compute_persistence(f: Filtration, id: str = "") -> PersistenceDiagram:
    """Reduce the filtration's Z/2 boundary matrix and read off bars.

    Bars with zero persistence (birth == death, an empty half-open
    interval) are discarded; unpaired simplices of dimension < max_dim
    yield infinite bars.
    """
    offsets, rows, dims, values = _boundary_csr(f)
    m = len(f.simplices)
    partner = reduce_boundary(offsets, rows, dims, f.max_dim)

    bars = {k: [] for k in range(f.max_dim)}
    for i in range(m):
        k = int(dims[i])
        j = int(partner[i])
        if j == -1:
            if k < f.max_dim:
                bars.setdefault(k, []).append((float(values[i]), math.inf))
        elif j > i:
            if values[j] > values[i]:
                bars[k].append((float(values[i]), float(values[j])))
    return PersistenceDiagram(id=id, bars={k: np.array(v).reshape(-1, 2) for k, v in bars.items()})


def filter_noise(pd: PersistenceDiagram, cutoff: float = 0.01,
                 dims: tuple = (1, 2)) -> PersistenceDiagram:
    """Drop finite bars with persistence < cutoff in the listed dimensions.

    Dimension 0 is untouched by default; infinite bars are never removed.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    out = {}
    for k in (0, 1, 2):
        arr = pd.bars[k]
        if k in dims and arr.size:
            keep = np.isinf(arr[:, 1]) | (arr[:, 1] - arr[:, 0] >= cutoff)
            arr = arr[keep]
        out[k] = arr.copy()
    return PersistenceDiagram(id=pd.id, bars=out)


def diagram_to_obj(pd: PersistenceDiagram) -> dict:
    """JSON-ready object; infinite deaths serialize as the string "inf"."""
    dims_obj = {}
    for k in (0, 1, 2):
        rows = []
        for b, d in pd.bars[k]:
            rows.append([float(b), "inf" if math.isinf(d) else float(d)])
        dims_obj[str(k)] = rows
    return {"id": pd.id, "dims": dims_obj}


def diagram_from_obj(obj: dict) -> PersistenceDiagram:
    bars = {}
    for key, rows in obj["dims"].items():
        arr = np.array(
            [[float(b), math.inf if d == "inf" else float(d)] for b, d in rows],
        ).reshape(-1, 2)
        bars[int(key)] = arr
    return PersistenceDiagram(id=obj.get("id", ""), bars=bars)


def save_diagram(pd: PersistenceDiagram, path) -> None:
    with open(path, "w") as fh:
        json.dump(diagram_to_obj(pd), fh, sort_keys=True)
        fh.write("\n")


def load_diagram(path) -> PersistenceDiagram:
    with open(path) as fh:
        return diagram_from_obj(json.load(fh))
