"""Distances between persistence diagrams and pairwise distance matrices.

A diagram distance is the weighted sum over homology dimensions 0..2 of a
per-dimension set distance between the (birth, death) point sets. Two set
distances are provided: symmetric Hausdorff (the default; a true metric on
the preprocessed diagrams) and the literal maximum over point pairs, which
is not a metric (d(X,X) != 0 in general) but kept behind a flag.

Infinite deaths must be truncated before distance computation; see
truncate_infinities. The truncation constant is dataset-wide and recorded
in run manifests.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .persistence import PersistenceDiagram

MODES = ("hausdorff", "max-pairwise")
DEFAULT_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def check_weights(w) -> tuple:
    w = tuple(float(x) for x in w)
    if len(w) != 3:
        raise ValueError(f"weight vector must have 3 entries, got {len(w)}")
    if any(x < 0 for x in w):
        raise ValueError(f"weights must be nonnegative, got {w}")
    if not any(x > 0 for x in w):
        raise ValueError("weights must not all be zero")
    return w


def truncation_constant(diagrams) -> float:
    """Dataset-wide replacement value for infinite deaths: 1.1 x the largest
    finite birth/death observed, or 1.0 if every value is zero."""
    top = 0.0
    for pd in diagrams:
        for k in (0, 1, 2):
            arr = pd.bars[k]
            if arr.size:
                finite = arr[np.isfinite(arr)]
                if finite.size:
                    top = max(top, float(finite.max()))
    return 1.1 * top if top > 0 else 1.0


def truncate_infinities(diagrams, constant: float | None = None):
    """Replace infinite deaths by `constant` (computed from these diagrams
    when None). Returns (new diagrams, constant used)."""
    if constant is None:
        constant = truncation_constant(diagrams)
    out = []
    for pd in diagrams:
        bars = {}
        for k in (0, 1, 2):
            arr = pd.bars[k].copy()
            if arr.size:
                arr[np.isinf(arr[:, 1]), 1] = constant
            bars[k] = arr
        out.append(PersistenceDiagram(id=pd.id, bars=bars))
    return out, constant


def component_distance(a: np.ndarray, b: np.ndarray, mode: str = "hausdorff") -> float:
    """Set distance between two bar multisets (rows are (birth, death)).

    hausdorff: max of the two directed sup-inf distances. max-pairwise:
    max over all cross pairs. Empty/empty gives 0; exactly one empty gives
    the largest distance-to-diagonal, max (death - birth)/sqrt(2), of the
    nonempty side. Inputs must be finite (truncate infinities first).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    if a.size and not np.isfinite(a).all() or b.size and not np.isfinite(b).all():
        raise ValueError("non-finite bar coordinates; truncate infinities first")
    if a.shape[0] == 0 and b.shape[0] == 0:
        return 0.0
    if a.shape[0] == 0 or b.shape[0] == 0:
        pts = b if a.shape[0] == 0 else a
        return float((pts[:, 1] - pts[:, 0]).max() / math.sqrt(2.0))
    diff = a[:, None, :] - b[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    if mode == "max-pairwise":
        return float(dist.max())
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def diagram_distance(x: PersistenceDiagram, y: PersistenceDiagram,
                     weights=DEFAULT_WEIGHTS, mode: str = "hausdorff") -> float:
    """Weighted sum of per-dimension component distances."""
    w = check_weights(weights)
    return sum(
        w[k] * component_distance(x.bars[k], y.bars[k], mode) for k in (0, 1, 2)
    )


@dataclass
class DistanceMatrix:
    """Symmetric pairwise diagram distances with row/column ids."""

    ids: list
    values: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id"] + list(self.ids))
            for i, row_id in enumerate(self.ids):
                writer.writerow([row_id] + [repr(float(v)) for v in self.values[i]])

    def to_json_obj(self) -> dict:
        return {"ids": list(self.ids), "values": self.values.tolist()}

    @classmethod
    def from_json_obj(cls, obj) -> "DistanceMatrix":
        return cls(ids=list(obj["ids"]), values=np.array(obj["values"], dtype=np.float64))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, sort_keys=True)
            fh.write("\n")


def distance_matrix(diagrams, weights=DEFAULT_WEIGHTS, mode: str = "hausdorff") -> DistanceMatrix:
    """All pairwise diagram distances; upper triangle computed, mirrored."""
    n = len(diagrams)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            d = diagram_distance(diagrams[i], diagrams[j], weights, mode)
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(ids=[pd.id for pd in diagrams], values=values)


def cross_distances(x: PersistenceDiagram, landmarks,
                    weights=DEFAULT_WEIGHTS, mode: str = "hausdorff") -> np.ndarray:
    """Distances from one diagram to each landmark, in landmark order."""
    return np.array(
        [diagram_distance(x, lm, weights, mode) for lm in landmarks], dtype=np.float64
    )
