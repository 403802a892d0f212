"""Structure ingestion: Cα point clouds and residue contact graphs.

Two input formats: fixed-column PDB ATOM records, and a plain xyz text
format (one whitespace-separated point per line, ``#`` comments) for
synthetic clouds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ParseError(ValueError):
    """Malformed input line; message carries the 1-based line number."""


class EmptyStructureError(ValueError):
    """Structurally valid input that yields zero points."""


@dataclass
class PointCloud:
    """Finite point set in d-dimensional Euclidean space.

    coords is (n, dim) float64; row order follows the source. All
    coordinates must be finite.
    """

    coords: np.ndarray
    id: str = ""
    label: Optional[int] = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2:
            if self.coords.size == 0:
                self.coords = self.coords.reshape(0, 3)
            else:
                raise ValueError("coords must be a 2-D array of shape (n, dim)")
        if not np.isfinite(self.coords).all():
            raise ValueError(f"non-finite coordinates in point cloud {self.id!r}")

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass
class ContactGraph:
    """Undirected unweighted graph over residue indices.

    Edge (i, j), i < j, present iff the Euclidean distance of the source
    points is strictly below `threshold`.
    """

    n_nodes: int
    edges: tuple = field(default_factory=tuple)  # sorted (i, j) pairs, i < j
    threshold: float = 5.0

    def __post_init__(self):
        self.edges = tuple(sorted((min(i, j), max(i, j)) for i, j in self.edges))
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"edge ({i},{j}) out of range for {self.n_nodes} nodes")

    def adjacency(self) -> list:
        """Sorted neighbor lists, one int64 array per node."""
        nbrs = [[] for _ in range(self.n_nodes)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return [np.array(sorted(a), dtype=np.int64) for a in nbrs]

    def has_edge(self, i: int, j: int) -> bool:
        a, b = (i, j) if i < j else (j, i)
        return (a, b) in set(self.edges)


# PDB fixed columns (1-indexed, inclusive): record name 1-6, atom name 13-16,
# altLoc 17, chain 22, resSeq 23-26, iCode 27, x 31-38, y 39-46, z 47-54.
def parse_pdb(data: bytes | str, id: str = "") -> PointCloud:
    """Extract one point per Cα ATOM record from PDB text.

    Record order is preserved. Only the first occurrence per
    (chain, residue number, insertion code) is kept, which also collapses
    altLoc duplicates and repeated NMR models. HETATM records are skipped.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    coords = []
    seen = set()
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.startswith("ATOM"):
            continue
        if line[12:16].strip() != "CA":
            continue
        key = (line[21:22], line[22:26], line[26:27])
        if key in seen:
            continue
        try:
            x = float(line[30:38])
            y = float(line[38:46])
            z = float(line[46:54])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: malformed coordinate field: {exc}") from None
        seen.add(key)
        coords.append((x, y, z))
    if not coords:
        raise EmptyStructureError(f"no CA atoms in structure {id!r}")
    return PointCloud(np.array(coords, dtype=np.float64), id=id)


def parse_xyz(data: bytes | str, id: str = "") -> PointCloud:
    """Parse the synthetic xyz format: one point per line, whitespace
    separated, `#` starts a comment line. All rows must share one dimension.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = []
    dim = None
    for lineno, line in enumerate(data.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: malformed coordinate field: {exc}") from None
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise ParseError(f"line {lineno}: expected {dim} coordinates, got {len(row)}")
        rows.append(row)
    if not rows:
        raise EmptyStructureError(f"no points in source {id!r}")
    return PointCloud(np.array(rows, dtype=np.float64), id=id)


def parse_structure(data: bytes | str, id: str = "", format: str = "auto") -> PointCloud:
    """Parse PDB or xyz input into a point cloud.

    format: "pdb", "xyz", or "auto" (PDB if any line starts with ATOM/HETATM/
    HEADER, else xyz).
    """
    if format == "pdb":
        return parse_pdb(data, id=id)
    if format == "xyz":
        return parse_xyz(data, id=id)
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    for line in text.splitlines():
        if line.startswith(("ATOM", "HETATM", "HEADER", "REMARK", "MODEL")):
            return parse_pdb(text, id=id)
    return parse_xyz(text, id=id)


def write_xyz(pc: PointCloud, path) -> None:
    """Write a cloud in the xyz format with full round-trip precision."""
    with open(path, "w") as fh:
        fh.write(f"# {pc.id}\n" if pc.id else "")
        for row in pc.coords:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def contact_graph(pc: PointCloud, threshold: float = 5.0) -> ContactGraph:
    """Contact graph on the cloud: edge iff pairwise distance < threshold
    (strict; ties at exactly threshold are excluded)."""
    if pc.n_points == 0:
        raise ValueError("cannot build a contact graph from an empty cloud")
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    diff = pc.coords[:, None, :] - pc.coords[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    ii, jj = np.nonzero(np.triu(dist < threshold, k=1))
    edges = tuple(zip(ii.tolist(), jj.tolist()))
    return ContactGraph(n_nodes=pc.n_points, edges=edges, threshold=threshold)
