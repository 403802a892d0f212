"""Feature vectors from persistence diagrams.

Four methods:

* ``bs`` — the vector of diagram distances to a fixed, ordered list of
  landmark diagrams (the training set). Row i of the training distance
  matrix is exactly the bs vector of training diagram i.
* ``stat1`` — bar counts per dimension, dim-0 count scaled by 0.01.
* ``stat2`` — 25 values: (max, min, population variance, mean, median)
  for each of five series: dim0 deaths, dim1 births, dim1 deaths,
  dim2 births, dim2 deaths. Dim-0 births are identically zero under a
  Rips filtration and carry no information, so they are not a series.
* ``stat3`` — 126 values: per dimension and per series (births, deaths,
  midpoints, lifespans) the 10-tuple (mean, sd, median, IQR, min, max,
  p10, p25, p75, p90), then (count, lifespan sum) per dimension.

Statistics use population variance / standard deviation (divide by n) and
linearly interpolated percentiles. Empty series contribute zeros. Inputs
to stat2/stat3 and bs must have infinite deaths truncated first.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .persistence import PersistenceDiagram

METHODS = ("bs", "stat1", "stat2", "stat3")

STAT2_LENGTH = 25
STAT3_LENGTH = 126


@dataclass
class FeatureVector:
    id: str
    values: np.ndarray
    method: str
    landmark_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.isfinite(self.values).all():
            raise ValueError(f"feature vector {self.id!r} has non-finite entries")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def _finite_bars(pd: PersistenceDiagram, k: int) -> np.ndarray:
    arr = pd.bars[k]
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(
            f"diagram {pd.id!r} has infinite deaths; truncate before vectorizing"
        )
    return arr


def bs_vectorize(x: PersistenceDiagram, landmarks,
                 weights=metrics.DEFAULT_WEIGHTS, mode: str = "hausdorff") -> FeatureVector:
    """Distances from x to each landmark diagram, in landmark order."""
    landmarks = list(landmarks)
    if not landmarks:
        raise ValueError("bs vectorization needs at least one landmark diagram")
    values = metrics.cross_distances(x, landmarks, weights, mode)
    return FeatureVector(
        id=x.id, values=values, method="bs", landmark_ids=[lm.id for lm in landmarks]
    )


def stats_vector_1(pd: PersistenceDiagram) -> FeatureVector:
    counts = [pd.bars[k].shape[0] for k in (0, 1, 2)]
    return FeatureVector(
        id=pd.id,
        values=np.array([0.01 * counts[0], counts[1], counts[2]]),
        method="stat1",
    )


def _five_stats(series: np.ndarray) -> list:
    # (max, min, population variance, mean, median); zeros when empty
    if series.size == 0:
        return [0.0, 0.0, 0.0, 0.0, 0.0]
    return [
        float(series.max()),
        float(series.min()),
        float(series.var()),
        float(series.mean()),
        float(np.median(series)),
    ]


def stats_vector_2(pd: PersistenceDiagram) -> FeatureVector:
    b0 = _finite_bars(pd, 0)
    b1 = _finite_bars(pd, 1)
    b2 = _finite_bars(pd, 2)
    series = [
        b0[:, 1] if b0.size else b0.reshape(0),
        b1[:, 0] if b1.size else b1.reshape(0),
        b1[:, 1] if b1.size else b1.reshape(0),
        b2[:, 0] if b2.size else b2.reshape(0),
        b2[:, 1] if b2.size else b2.reshape(0),
    ]
    values = []
    for s in series:
        values.extend(_five_stats(s))
    return FeatureVector(id=pd.id, values=np.array(values), method="stat2")


def _ten_stats(series: np.ndarray) -> list:
    # (mean, sd, median, IQR, min, max, p10, p25, p75, p90); zeros when empty
    if series.size == 0:
        return [0.0] * 10
    p10, p25, p75, p90 = (float(v) for v in np.percentile(series, [10, 25, 75, 90]))
    return [
        float(series.mean()),
        float(series.std()),
        float(np.median(series)),
        p75 - p25,
        float(series.min()),
        float(series.max()),
        p10,
        p25,
        p75,
        p90,
    ]


def stats_vector_3(pd: PersistenceDiagram) -> FeatureVector:
    values = []
    tail = []
    for k in (0, 1, 2):
        arr = _finite_bars(pd, k)
        if arr.size:
            births = arr[:, 0]
            deaths = arr[:, 1]
        else:
            births = deaths = np.zeros(0)
        mids = (births + deaths) / 2.0
        lifes = deaths - births
        for s in (births, deaths, mids, lifes):
            values.extend(_ten_stats(s))
        tail.extend([float(arr.shape[0]), float(lifes.sum())])
    values.extend(tail)
    assert len(values) == STAT3_LENGTH
    return FeatureVector(id=pd.id, values=np.array(values), method="stat3")


_STAT_FUNCS = {"stat1": stats_vector_1, "stat2": stats_vector_2, "stat3": stats_vector_3}


def vectorize(diagrams, method: str, landmarks=None,
              weights=metrics.DEFAULT_WEIGHTS, mode: str = "hausdorff") -> list:
    """Vectorize a batch of diagrams with one method. For bs, landmarks fix
    the coordinate order (pass the training diagrams)."""
    if method == "bs":
        if not landmarks:
            raise ValueError("bs vectorization needs landmarks")
        return [bs_vectorize(pd, landmarks, weights, mode) for pd in diagrams]
    if method in _STAT_FUNCS:
        return [_STAT_FUNCS[method](pd) for pd in diagrams]
    raise ValueError(f"unknown method {method!r}")


def feature_matrix(features) -> np.ndarray:
    """Stack equally long feature vectors into an (n, m) matrix."""
    lengths = {fv.values.shape[0] for fv in features}
    if len(lengths) > 1:
        raise ValueError(f"inconsistent feature lengths {sorted(lengths)}")
    return np.stack([fv.values for fv in features]) if features else np.zeros((0, 0))


def standardize_fit(train: np.ndarray):
    """Per-column mean and scale from training rows; zero-variance columns
    get scale 1 so they map to constant 0."""
    mean = train.mean(axis=0)
    scale = train.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


def standardize_apply(x: np.ndarray, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return (x - mean) / scale


def save_features(features, path, manifest: dict | None = None) -> None:
    """CSV with an id column plus f0..f{m-1}; sidecar manifest JSON at
    path + '.manifest.json' records method, landmark ids, and whatever the
    caller adds (weights, mode, truncation constant)."""
    features = list(features)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        width = features[0].values.shape[0] if features else 0
        writer.writerow(["id"] + [f"f{i}" for i in range(width)])
        for fv in features:
            writer.writerow([fv.id] + [repr(float(v)) for v in fv.values])
    meta = dict(manifest or {})
    if features:
        meta.setdefault("method", features[0].method)
        if features[0].method == "bs":
            meta.setdefault("landmark_ids", list(features[0].landmark_ids))
    with open(str(path) + ".manifest.json", "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=None)
        fh.write("\n")


def load_features(path) -> list:
    """Inverse of save_features (manifest sidecar required)."""
    with open(str(path) + ".manifest.json") as fh:
        meta = json.load(fh)
    method = meta.get("method", "bs")
    landmark_ids = meta.get("landmark_ids", [])
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            out.append(FeatureVector(
                id=row[0],
                values=np.array([float(v) for v in row[1:]]),
                method=method,
                landmark_ids=list(landmark_ids),
            ))
    return out
