"""Benchmark harness: seeded stratified splits, repeated evaluation sweeps,
misclassification taxonomy, and the function-prediction workflow.

Protocol: for each training fraction (default 0.3, 0.5, 0.8) draw `repeats`
independent stratified splits (Monte-Carlo, not folds; sub-seed =
combine(seed, fraction_index, repeat)), train on the training side only,
report per-repeat and mean accuracy. For the bs method the landmark list
is the repeat's training set, and test items are only ever compared
against training diagrams — never against each other. The infinite-death
truncation constant is likewise fitted on the training diagrams of the
repeat and then applied to its test diagrams.

Report JSON is byte-reproducible for a fixed config: wall-clock times go
to a separate timing sidecar, never into the report itself.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import classify, metrics, vectorize
from ._rng import SplitMix64, combine

DEFAULT_FRACTIONS = (0.3, 0.5, 0.8)


class SplitError(ValueError):
    """A split left some class without train or test representatives."""


@dataclass
class EvalConfig:
    method: str = "bs"
    train_fractions: tuple = DEFAULT_FRACTIONS
    repeats: int = 5
    seed: int = 0
    penalty: float = classify.DEFAULT_PENALTY
    weights: tuple = metrics.DEFAULT_WEIGHTS
    mode: str = "hausdorff"
    stratified: bool = True
    tol: float = classify.DEFAULT_TOL
    standardize: bool = False

    def __post_init__(self):
        if self.method not in vectorize.METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        self.train_fractions = tuple(float(f) for f in self.train_fractions)
        if any(not 0.0 < f < 1.0 for f in self.train_fractions):
            raise ValueError("train fractions must lie strictly between 0 and 1")
        if self.repeats < 1:
            raise ValueError("repeats must be positive")
        self.weights = metrics.check_weights(self.weights)
        if self.mode not in metrics.MODES:
            raise ValueError(f"unknown distance mode {self.mode!r}")

    def to_json_obj(self) -> dict:
        return {
            "method": self.method,
            "train_fractions": list(self.train_fractions),
            "repeats": self.repeats,
            "seed": self.seed,
            "penalty": self.penalty,
            "weights": list(self.weights),
            "mode": self.mode,
            "stratified": self.stratified,
            "tol": self.tol,
            "standardize": self.standardize,
        }


def _shuffle(items: list, rng: SplitMix64) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def split(ids, labels, fraction: float, seed: int, stratified: bool = True):
    """Deterministic train/test split: |train| = round(fraction * n)
    (half-up). Stratified mode allocates per-class counts by largest
    remainder, keeping class proportions within one sample. Raises
    SplitError when any class misses train or test."""
    ids = list(ids)
    labels = list(labels)
    n = len(ids)
    if n != len(labels):
        raise ValueError("ids and labels must align")
    n_train = math.floor(fraction * n + 0.5)
    if n_train < 1 or n_train >= n:
        raise SplitError(f"fraction {fraction} leaves train={n_train} of {n}")

    if not stratified:
        order = _shuffle(list(range(n)), SplitMix64(seed))
        train_idx = sorted(order[:n_train])
        test_idx = sorted(order[n_train:])
    else:
        classes = sorted(set(labels))
        per_class = {c: [i for i in range(n) if labels[i] == c] for c in classes}
        base = {c: math.floor(fraction * len(per_class[c])) for c in classes}
        extras = n_train - sum(base.values())
        remainders = sorted(
            classes,
            key=lambda c: (-(fraction * len(per_class[c]) - base[c]), c),
        )
        quota = dict(base)
        for c in remainders[:extras]:
            quota[c] += 1
        train_idx = []
        for ci, c in enumerate(classes):
            members = _shuffle(per_class[c], SplitMix64(combine(seed, ci)))
            train_idx.extend(members[:quota[c]])
        train_idx = sorted(train_idx)
        test_idx = sorted(set(range(n)) - set(train_idx))

    train_labels = {labels[i] for i in train_idx}
    test_labels = {labels[i] for i in test_idx}
    for c in set(labels):
        if c not in train_labels or c not in test_labels:
            raise SplitError(f"class {c} missing from train or test at fraction {fraction}")
    return [ids[i] for i in train_idx], [ids[i] for i in test_idx]


def _features_for(method, train_pds, test_pds, cfg: EvalConfig):
    """(train matrix, test matrix, landmark ids, truncation constant)."""
    truncated_train, constant = metrics.truncate_infinities(train_pds)
    truncated_test, _ = metrics.truncate_infinities(test_pds, constant)
    if method == "bs":
        dm = metrics.distance_matrix(truncated_train, cfg.weights, cfg.mode)
        train_f = dm.values
        test_f = np.stack([
            metrics.cross_distances(pd, truncated_train, cfg.weights, cfg.mode)
            for pd in truncated_test
        ]) if truncated_test else np.zeros((0, len(truncated_train)))
        landmark_ids = dm.ids
    else:
        train_f = vectorize.feature_matrix(vectorize.vectorize(truncated_train, method))
        test_f = vectorize.feature_matrix(vectorize.vectorize(truncated_test, method))
        landmark_ids = [pd.id for pd in truncated_train]
    if cfg.standardize:
        mean, scale = vectorize.standardize_fit(train_f)
        train_f = vectorize.standardize_apply(train_f, mean, scale)
        test_f = vectorize.standardize_apply(test_f, mean, scale)
    return train_f, test_f, landmark_ids, constant


def _run_repeat(diagrams_by_id, labels_by_id, fraction_index, repeat, cfg: EvalConfig):
    fraction = cfg.train_fractions[fraction_index]
    sub_seed = combine(cfg.seed, fraction_index, repeat)
    ids = sorted(diagrams_by_id)
    labels = [labels_by_id[i] for i in ids]
    train_ids, test_ids = split(ids, labels, fraction, sub_seed, cfg.stratified)

    train_pds = [diagrams_by_id[i] for i in train_ids]
    test_pds = [diagrams_by_id[i] for i in test_ids]
    train_f, test_f, landmark_ids, constant = _features_for(
        cfg.method, train_pds, test_pds, cfg
    )
    y_train = np.array([labels_by_id[i] for i in train_ids], dtype=np.float64)
    kind = "bs-distances" if cfg.method == "bs" else "stat-features"
    model = classify.train(
        classify.LabeledSet(ids=train_ids, labels=y_train, features=train_f),
        a=cfg.penalty, tol=cfg.tol, feature_kind=kind,
    )

    n_correct = 0
    predictions = []
    for i, test_id in enumerate(test_ids):
        label, score = classify.predict(model, test_f[i])
        true = int(labels_by_id[test_id])
        if label == true:
            n_correct += 1
        predictions.append({
            "id": test_id, "true": true, "predicted": label, "score": repr(score),
        })
    return {
        "seed": sub_seed,
        "n_train": len(train_ids),
        "n_test": len(test_ids),
        "n_correct": n_correct,
        "accuracy": n_correct / len(test_ids),
        "truncation_constant": repr(float(constant)),
        "predictions": predictions,
        "misclassified": [p["id"] for p in predictions if p["predicted"] != p["true"]],
    }


@dataclass
class EvalReport:
    config: EvalConfig
    cells: list
    wall_clock: float = 0.0

    def to_json_obj(self) -> dict:
        # wall_clock deliberately excluded: report bytes depend only on config
        return {"config": self.config.to_json_obj(), "cells": self.cells}

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, sort_keys=True)
            fh.write("\n")

    def save_timing(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"wall_clock_seconds": self.wall_clock}, fh)
            fh.write("\n")

    def mean_accuracy(self, fraction: float):
        for cell in self.cells:
            if cell["fraction"] == fraction:
                return cell["mean_accuracy"]
        raise KeyError(f"no cell for fraction {fraction}")

    def render_text(self) -> str:
        header = ["method"] + [f"{int(round(100 * f))}%" for f in self.config.train_fractions]
        row = [self.config.method]
        for cell in self.cells:
            acc = cell["mean_accuracy"]
            row.append("failed" if acc is None else f"{acc:.3f}")
        width = max(len(w) for w in header + row) + 2
        lines = [
            "".join(w.ljust(width) for w in header),
            "".join(w.ljust(width) for w in row),
        ]
        return "\n".join(lines)


def evaluate(diagrams, labels_by_id: dict, cfg: EvalConfig) -> EvalReport:
    """Run the full sweep. Per-repeat failures (solver or split errors) are
    recorded in the cell and skipped in the mean, not raised."""
    start = time.perf_counter()
    diagrams_by_id = {pd.id: pd for pd in diagrams}
    if len(diagrams_by_id) != len(list(diagrams)):
        raise ValueError("duplicate diagram ids")
    missing = sorted(set(diagrams_by_id) - set(labels_by_id))
    if missing:
        raise ValueError(f"missing labels for {missing[:5]}")

    cells = []
    for fi, fraction in enumerate(cfg.train_fractions):
        repeats = []
        for r in range(cfg.repeats):
            try:
                repeats.append(_run_repeat(diagrams_by_id, labels_by_id, fi, r, cfg))
            except (SplitError, classify.ConvergenceError, classify.InfeasibleError) as e:
                repeats.append({"error": f"{type(e).__name__}: {e}"})
        accs = [rep["accuracy"] for rep in repeats if "error" not in rep]
        cells.append({
            "method": cfg.method,
            "fraction": fraction,
            "mean_accuracy": (sum(accs) / len(accs)) if accs else None,
            "repeats": repeats,
        })
    return EvalReport(config=cfg, cells=cells, wall_clock=time.perf_counter() - start)


def misclass_report(repeat_record: dict) -> list:
    """Classify each miss of a completed repeat: TypeII iff the score lies
    inside the margin band |f| < 1 (the crossover region), else TypeI."""
    if "error" in repeat_record:
        raise ValueError("repeat failed; no misclassification report")
    out = []
    for p in repeat_record["predictions"]:
        if p["predicted"] == p["true"]:
            continue
        score = float(p["score"])
        out.append({
            "id": p["id"],
            "true": p["true"],
            "predicted": p["predicted"],
            "score": p["score"],
            "error_type": "TypeII" if abs(score) < 1.0 else "TypeI",
        })
    return out


def predict_function(known_diagrams, labels_by_id: dict, candidates,
                     cfg: EvalConfig, out_dir=None) -> dict:
    """Train on the labeled set, score every candidate, and flag those in
    the margin band as function candidates, ranked by |score| ascending.
    A candidate scoring at or beyond the margin (|f| >= 1 - 10*tol) is a
    confident call, not a band candidate. With out_dir set, writes the
    pipeline artifacts (diagrams, features, model, report)."""
    known = list(known_diagrams)
    candidates = list(candidates)
    truncated_known, constant = metrics.truncate_infinities(known)
    truncated_cand, _ = metrics.truncate_infinities(candidates, constant)

    ids = [pd.id for pd in known]
    y = np.array([labels_by_id[i] for i in ids], dtype=np.float64)
    if cfg.method == "bs":
        dm = metrics.distance_matrix(truncated_known, cfg.weights, cfg.mode)
        train_f = dm.values
        cand_features = [
            vectorize.bs_vectorize(pd, truncated_known, cfg.weights, cfg.mode)
            for pd in truncated_cand
        ]
        kind = "bs-distances"
    else:
        train_f = vectorize.feature_matrix(vectorize.vectorize(truncated_known, cfg.method))
        cand_features = vectorize.vectorize(truncated_cand, cfg.method)
        kind = "stat-features"

    model = classify.train(
        classify.LabeledSet(ids=ids, labels=y, features=train_f),
        a=cfg.penalty, tol=cfg.tol, feature_kind=kind,
    )
    model.preprocess = {
        "weights": list(cfg.weights),
        "mode": cfg.mode,
        "truncation_constant": repr(float(constant)),
        "method": cfg.method,
    }

    scored = []
    for fv in cand_features:
        label, score = classify.predict(model, fv.values)
        scored.append({
            "id": fv.id, "score": repr(score), "label": label,
            "in_band": bool(abs(score) < 1.0 - 10.0 * cfg.tol),
        })
    flagged = sorted(
        (s for s in scored if s["in_band"]),
        key=lambda s: (abs(float(s["score"])), s["id"]),
    )
    report = {
        "config": cfg.to_json_obj(),
        "truncation_constant": repr(float(constant)),
        "candidates": scored,
        "flagged": flagged,
    }

    if out_dir is not None:
        import os

        from .persistence import diagram_to_obj

        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "diagrams.json"), "w") as fh:
            json.dump({
                "known": [diagram_to_obj(pd) for pd in known],
                "candidates": [diagram_to_obj(pd) for pd in candidates],
            }, fh, sort_keys=True)
            fh.write("\n")
        vectorize.save_features(
            cand_features, os.path.join(out_dir, "features.csv"),
            manifest={
                "weights": list(cfg.weights), "mode": cfg.mode,
                "truncation_constant": repr(float(constant)),
            },
        )
        model.save(os.path.join(out_dir, "model.json"))
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            json.dump(report, fh, sort_keys=True)
            fh.write("\n")
    return report
