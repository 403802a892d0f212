"""Synthetic two-class point-cloud dataset: noisy circles vs. blob pairs.

Class +1 is a noisy circle (one prominent loop); class -1 is two Gaussian
blobs (no loop, a late component merge). The classes are separable through
their diagrams, which makes the set a pipeline-level ground truth. All
randomness flows from a single documented seed through per-cloud sub-seeds
(combine(seed, class_tag, index)), so the dataset is a pure function of
its arguments.
"""

from __future__ import annotations

import math

from ._rng import SplitMix64, combine
from .ingest import PointCloud

CIRCLE_TAG = 1
BLOBS_TAG = 2


def _gauss(rng: SplitMix64) -> float:
    u1 = 1.0 - rng.next_double()
    u2 = rng.next_double()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def noisy_circle(n_points: int, noise: float, seed: int,
                 radius: float = 1.0, id: str = "circle") -> PointCloud:
    """n_points evenly spaced on a radius-`radius` circle, plus isotropic
    Gaussian jitter with standard deviation `noise`."""
    if n_points < 1:
        raise ValueError("need at least one point")
    rng = SplitMix64(seed)
    pts = []
    for i in range(n_points):
        t = 2.0 * math.pi * i / n_points
        pts.append([
            radius * math.cos(t) + noise * _gauss(rng),
            radius * math.sin(t) + noise * _gauss(rng),
        ])
    return PointCloud(coords=pts, id=id, label=1)


def two_blobs(n_per_blob: int, separation: float, noise: float, seed: int,
              id: str = "blobs") -> PointCloud:
    """Two Gaussian blobs of n_per_blob points each, centers separated by
    `separation` along the x axis, standard deviation `noise`."""
    if n_per_blob < 1:
        raise ValueError("need at least one point per blob")
    rng = SplitMix64(seed)
    half = separation / 2.0
    pts = []
    for cx in (-half, half):
        for _ in range(n_per_blob):
            pts.append([cx + noise * _gauss(rng), noise * _gauss(rng)])
    return PointCloud(coords=pts, id=id, label=-1)


def synth_dataset(seed: int = 0, n_per_class: int = 50,
                  circle_noise: float = 0.01, blob_noise: float = 0.08,
                  separation: float = 1.2) -> list:
    """The benchmark set: n_per_class circles (20-24 points, label +1) and
    n_per_class blob pairs (12+12 points, label -1). Cloud i of each class
    uses sub-seed combine(seed, class_tag, i)."""
    clouds = []
    for i in range(n_per_class):
        sub = combine(seed, CIRCLE_TAG, i)
        n_points = 20 + SplitMix64(combine(sub, 0)).next_below(5)
        clouds.append(noisy_circle(
            n_points, circle_noise, combine(sub, 1), id=f"circle{i:03d}"
        ))
    for i in range(n_per_class):
        sub = combine(seed, BLOBS_TAG, i)
        clouds.append(two_blobs(
            12, separation, blob_noise, combine(sub, 1), id=f"blobs{i:03d}"
        ))
    return clouds
