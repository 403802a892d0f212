"""Command-line front end.

Subcommands mirror the pipeline stages: ingest -> embed -> ph ->
vectorize -> train -> predict, plus the batch drivers eval,
predict-function, and the synthetic dataset generator synth.
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import os
import sys

import numpy as np

from . import classify, harness, ingest, metrics, persistence, synth, vectorize
from .embed import EmbeddingConfig, embed_graph


def _parse_weights(text: str) -> tuple:
    parts = [p for p in text.split(",") if p != ""]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated weights")
    return tuple(float(p) for p in parts)


def _parse_fractions(text: str) -> tuple:
    parts = [p for p in text.split(",") if p != ""]
    if not parts:
        raise argparse.ArgumentTypeError("expected comma-separated fractions")
    return tuple(float(p) for p in parts)


def _read_structure(path: str, format: str = "auto") -> ingest.PointCloud:
    with open(path) as fh:
        data = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    if format == "auto" and path.endswith(".pdb"):
        format = "pdb"
    elif format == "auto" and path.endswith(".xyz"):
        format = "xyz"
    return ingest.parse_structure(data, id=stem, format=format)


def _load_diagrams(paths) -> list:
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(glob.glob(os.path.join(p, "*.json"))))
        else:
            files.append(p)
    return [persistence.load_diagram(f) for f in files]


def _load_labels(path: str) -> dict:
    labels = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "id":
                continue
            labels[row[0]] = int(row[1])
    return labels


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    for path in args.files:
        pc = _read_structure(path, args.format)
        dest = os.path.join(out, pc.id + ".xyz")
        ingest.write_xyz(pc, dest)
        print(f"{pc.id}: {pc.n_points} points (dim {pc.dim}) -> {dest}")
    return 0


def cmd_embed(args) -> int:
    out = _out_dir(args)
    cfg = EmbeddingConfig(
        dim=args.dim, walks_per_node=args.walks_per_node,
        walk_length=args.walk_length, p=args.p, q=args.q,
        window=args.window, negatives=args.negatives, epochs=args.epochs,
        seed=args.seed, method="spectral" if args.spectral else "random-walk",
    )
    for path in args.files:
        pc = _read_structure(path, args.format)
        graph = ingest.contact_graph(pc, threshold=args.threshold)
        emb = embed_graph(graph, cfg, id=pc.id)
        dest = os.path.join(out, pc.id + ".embedded.xyz")
        ingest.write_xyz(emb, dest)
        print(f"{pc.id}: {graph.n_nodes} nodes, {len(graph.edges)} edges -> {dest}")
    return 0


def cmd_ph(args) -> int:
    out = _out_dir(args)
    for path in args.files:
        pc = _read_structure(path, args.format)
        filtration = persistence.rips_filtration(
            pc, max_dim=args.max_homology + 1, max_radius=args.max_radius
        )
        pd = persistence.compute_persistence(filtration, id=pc.id)
        pd = persistence.filter_noise(pd, cutoff=args.cutoff)
        dest = os.path.join(out, pc.id + ".diagram.json")
        persistence.save_diagram(pd, dest)
        counts = ", ".join(f"dim{k}: {pd.n_bars(k)}" for k in (0, 1, 2))
        print(f"{pc.id}: {counts} -> {dest}")
    return 0


def cmd_vectorize(args) -> int:
    diagrams = _load_diagrams(args.diagrams)
    manifest = {"weights": list(args.weights), "mode": args.distance_mode}
    if args.method == "bs":
        if not args.landmarks:
            print("error: method bs needs --landmarks", file=sys.stderr)
            return 2
        landmarks = _load_diagrams(args.landmarks)
        landmarks, constant = metrics.truncate_infinities(landmarks)
        diagrams, _ = metrics.truncate_infinities(diagrams, constant)
        features = vectorize.vectorize(
            diagrams, "bs", landmarks, args.weights, args.distance_mode
        )
    else:
        diagrams, constant = metrics.truncate_infinities(diagrams)
        features = vectorize.vectorize(diagrams, args.method)
    manifest["truncation_constant"] = repr(float(constant))
    dest = args.out or "features.csv"
    vectorize.save_features(features, dest, manifest)
    print(f"{len(features)} vectors of length {features[0].values.shape[0]} -> {dest}")
    return 0


def cmd_train(args) -> int:
    features = vectorize.load_features(args.features)
    labels = _load_labels(args.labels)
    ids = [fv.id for fv in features]
    missing = [i for i in ids if i not in labels]
    if missing:
        print(f"error: no labels for {missing[:5]}", file=sys.stderr)
        return 2
    kind = "bs-distances" if features[0].method == "bs" else "stat-features"
    model = classify.train(
        classify.LabeledSet(
            ids=ids,
            labels=np.array([labels[i] for i in ids], dtype=np.float64),
            features=vectorize.feature_matrix(features),
        ),
        a=args.penalty, tol=args.tol, feature_kind=kind,
    )
    try:
        with open(args.features + ".manifest.json") as fh:
            model.preprocess = json.load(fh)
    except FileNotFoundError:
        pass
    dest = args.out or "model.json"
    model.save(dest)
    report = model.solver_report
    print(f"trained on {len(ids)} items in {report['iterations']} iterations -> {dest}")
    return 0


def cmd_predict(args) -> int:
    model = classify.MarginModel.load(args.model)
    features = vectorize.load_features(args.features)
    dest = args.out or "predictions.csv"
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "score", "label"])
        for fv in features:
            label, score = classify.predict(model, fv.values)
            writer.writerow([fv.id, repr(score), label])
    print(f"{len(features)} predictions -> {dest}")
    return 0


def cmd_eval(args) -> int:
    diagrams = _load_diagrams(args.diagrams)
    diagrams = [persistence.filter_noise(pd, cutoff=args.cutoff) for pd in diagrams]
    labels = _load_labels(args.labels)
    cfg = harness.EvalConfig(
        method=args.method, train_fractions=args.train_fractions,
        repeats=args.repeats, seed=args.seed, penalty=args.penalty,
        weights=args.weights, mode=args.distance_mode,
        standardize=args.standardize,
    )
    report = harness.evaluate(diagrams, labels, cfg)
    out = _out_dir(args)
    report.save(os.path.join(out, "report.json"))
    report.save_timing(os.path.join(out, "timing.json"))
    print(report.render_text())
    return 0


def cmd_predict_function(args) -> int:
    known = _load_diagrams(args.known)
    candidates = _load_diagrams(args.candidates)
    known = [persistence.filter_noise(pd, cutoff=args.cutoff) for pd in known]
    candidates = [persistence.filter_noise(pd, cutoff=args.cutoff) for pd in candidates]
    labels = _load_labels(args.labels)
    cfg = harness.EvalConfig(
        method=args.method, seed=args.seed, penalty=args.penalty,
        weights=args.weights, mode=args.distance_mode,
    )
    report = harness.predict_function(known, labels, candidates, cfg, out_dir=_out_dir(args))
    flagged = report["flagged"]
    print(f"{len(flagged)} function candidate(s) in the margin band:")
    for s in flagged:
        print(f"  {s['id']}: score {float(s['score']):+.4f}")
    return 0


def cmd_synth(args) -> int:
    out = _out_dir(args)
    clouds = synth.synth_dataset(seed=args.seed, n_per_class=args.n_per_class)
    with open(os.path.join(out, "labels.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"])
        for pc in clouds:
            ingest.write_xyz(pc, os.path.join(out, pc.id + ".xyz"))
            writer.writerow([pc.id, pc.label])
    print(f"{len(clouds)} clouds -> {out}")
    return 0


def _add_common(p, *names):
    if "seed" in names:
        p.add_argument("--seed", type=int, default=0)
    if "weights" in names:
        p.add_argument("--weights", type=_parse_weights,
                       default=metrics.DEFAULT_WEIGHTS, metavar="W0,W1,W2")
    if "mode" in names:
        p.add_argument("--distance-mode", choices=metrics.MODES, default="hausdorff")
    if "penalty" in names:
        p.add_argument("--penalty", type=float, default=classify.DEFAULT_PENALTY)
    if "cutoff" in names:
        p.add_argument("--cutoff", type=float, default=0.01)
    if "method" in names:
        p.add_argument("--method", choices=vectorize.METHODS, default="bs")
    if "out" in names:
        p.add_argument("--out", default=None, metavar="DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topomargin",
        description="Point clouds to persistence diagrams to margin classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse structures to xyz point clouds")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("auto", "pdb", "xyz"), default="auto")
    _add_common(p, "out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("embed", help="contact graph -> embedded point cloud")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("auto", "pdb", "xyz"), default="auto")
    p.add_argument("--threshold", type=float, default=5.0)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--walks-per-node", type=int, default=10)
    p.add_argument("--walk-length", type=int, default=80)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--spectral", action="store_true",
                   help="deterministic spectral embedding instead of random walks")
    _add_common(p, "seed", "out")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("ph", help="point cloud -> filtered persistence diagram")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=("auto", "pdb", "xyz"), default="auto")
    p.add_argument("--max-homology", type=int, default=2)
    p.add_argument("--max-radius", type=float, default=float("inf"))
    _add_common(p, "cutoff", "out")
    p.set_defaults(func=cmd_ph)

    p = sub.add_parser("vectorize", help="diagrams -> feature vectors")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("--landmarks", nargs="+", default=None,
                   help="landmark diagram files or directory (method bs)")
    _add_common(p, "method", "weights", "mode")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("train", help="features + labels -> margin model")
    p.add_argument("features")
    p.add_argument("labels")
    p.add_argument("--tol", type=float, default=classify.DEFAULT_TOL)
    _add_common(p, "penalty")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="model + features -> scores CSV")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="benchmark sweep over train fractions")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("labels")
    p.add_argument("--train-fractions", type=_parse_fractions,
                   default=harness.DEFAULT_FRACTIONS, metavar="F1,F2,...")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--standardize", action="store_true")
    _add_common(p, "method", "seed", "weights", "mode", "penalty", "cutoff", "out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict-function", help="rank unlabeled candidates")
    p.add_argument("known", help="labeled diagram files or directory")
    p.add_argument("labels")
    p.add_argument("candidates", help="candidate diagram files or directory")
    _add_common(p, "method", "seed", "weights", "mode", "penalty", "cutoff", "out")
    p.set_defaults(func=cmd_predict_function)

    p = sub.add_parser("synth", help="generate the synthetic benchmark set")
    p.add_argument("--n-per-class", type=int, default=50)
    _add_common(p, "seed", "out")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # single-file subcommands get nargs="+" lists; normalize where needed
    if isinstance(getattr(args, "known", None), str):
        args.known = [args.known]
    if isinstance(getattr(args, "candidates", None), str):
        args.candidates = [args.candidates]
    try:
        return args.func(args)
    except (ingest.ParseError, ingest.EmptyStructureError, ValueError,
            classify.ConvergenceError, classify.InfeasibleError,
            persistence.ResourceLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
