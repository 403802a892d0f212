"""Graph embeddings: biased random walks + skip-gram, and a spectral fallback.

The random-walk embedder follows the classic second-order scheme: from the
previous node t and current node v, a neighbor w of v is drawn with weight
1/p if w == t, 1 if w neighbors t, else 1/q. The walk corpus feeds a
skip-gram model trained with negative sampling (unigram^0.75 noise). Both
stages are bitwise deterministic for a fixed seed: walk (node, repeat)
pairs use derived sub-seeds, and training runs single-threaded in a fixed
order through the hot kernel in topomargin.backend.

The spectral embedder is the deterministic alternative: per connected
component, rows are the first `dim` nontrivial graph-Laplacian
eigenvectors; components are spread along axis 0 so they never interleave.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from ._rng import SplitMix64, combine
from .ingest import ContactGraph, PointCloud

LR0 = 0.025
LR_MIN = 1e-4


@dataclass
class EmbeddingConfig:
    dim: int = 16
    walks_per_node: int = 10
    walk_length: int = 80
    p: float = 1.0
    q: float = 1.0
    window: int = 5
    negatives: int = 5
    epochs: int = 3
    seed: int = 0
    method: str = "random-walk"

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("embedding dimension must be at least 2")
        for name in ("walks_per_node", "walk_length", "window", "negatives", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")
        if self.method not in ("random-walk", "spectral"):
            raise ValueError(f"unknown embedding method {self.method!r}")


@dataclass
class WalkCorpus:
    walks: list
    n_nodes: int

    def flatten(self):
        offsets = np.zeros(len(self.walks) + 1, dtype=np.int64)
        for i, w in enumerate(self.walks):
            offsets[i + 1] = offsets[i] + len(w)
        flat = np.zeros(int(offsets[-1]), dtype=np.int64)
        for i, w in enumerate(self.walks):
            flat[offsets[i]:offsets[i + 1]] = w
        return flat, offsets


def _one_walk(start, adj, adj_sets, length, p, q, rng: SplitMix64):
    walk = [start]
    nbrs = adj[start]
    if nbrs.shape[0] == 0 or length == 1:
        return walk
    cur = int(nbrs[rng.next_below(nbrs.shape[0])])
    walk.append(cur)
    while len(walk) < length:
        nbrs = adj[cur]
        if nbrs.shape[0] == 0:
            break
        prev = walk[-2]
        prev_set = adj_sets[prev]
        weights = []
        total = 0.0
        for w in nbrs:
            w = int(w)
            if w == prev:
                wt = 1.0 / p
            elif w in prev_set:
                wt = 1.0
            else:
                wt = 1.0 / q
            weights.append(wt)
            total += wt
        r = rng.next_double() * total
        acc = 0.0
        nxt = int(nbrs[-1])
        for w, wt in zip(nbrs, weights):
            acc += wt
            if r < acc:
                nxt = int(w)
                break
        walk.append(nxt)
        cur = nxt
    return walk


def generate_walks(g: ContactGraph, cfg: EmbeddingConfig) -> WalkCorpus:
    """walks_per_node walks from every node, each at most walk_length nodes
    (shorter only from an isolated start). Walk (node, repeat) draws from
    its own sub-seed, so any evaluation order gives the same corpus."""
    adj = g.adjacency()
    adj_sets = [set(a.tolist()) for a in adj]
    walks = []
    for rep in range(cfg.walks_per_node):
        for node in range(g.n_nodes):
            rng = SplitMix64(combine(cfg.seed, node, rep))
            walks.append(_one_walk(
                node, adj, adj_sets, cfg.walk_length, cfg.p, cfg.q, rng
            ))
    return WalkCorpus(walks=walks, n_nodes=g.n_nodes)


def _noise_cdf(flat, n_nodes) -> np.ndarray:
    counts = np.bincount(flat, minlength=n_nodes).astype(np.float64)
    weights = counts ** 0.75
    if weights.sum() == 0:
        weights = np.ones(n_nodes)
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def train_embedding(corpus: WalkCorpus, cfg: EmbeddingConfig,
                    id: str = "embedding") -> PointCloud:
    """Skip-gram with negative sampling over the corpus; one cfg.dim-vector
    per node, deterministic for a fixed seed."""
    if not corpus.walks:
        raise ValueError("empty walk corpus")
    flat, offsets = corpus.flatten()
    cdf = _noise_cdf(flat, corpus.n_nodes)
    coords = backend.sgns_train(
        flat, offsets, corpus.n_nodes, cfg.dim, cfg.window, cfg.negatives,
        cfg.epochs, LR0, LR_MIN, cdf, combine(cfg.seed, 0x5347),
    )
    return PointCloud(coords=np.asarray(coords), id=id)


def embed_graph(g: ContactGraph, cfg: EmbeddingConfig, id: str = "embedding") -> PointCloud:
    """One-call front door: walks + training, or the spectral fallback when
    cfg.method == 'spectral'."""
    if cfg.method == "spectral":
        return spectral_embedding(g, cfg.dim, id=id)
    return train_embedding(generate_walks(g, cfg), cfg, id=id)


def _components(adj) -> list:
    n = len(adj)
    seen = [False] * n
    comps = []
    for root in range(n):
        if seen[root]:
            continue
        stack = [root]
        seen[root] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                w = int(w)
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def spectral_embedding(g: ContactGraph, dim: int = 16, id: str = "embedding") -> PointCloud:
    """Rows are the first `dim` nontrivial Laplacian eigenvectors of each
    connected component (ascending eigenvalue, first nonzero entry of each
    eigenvector made positive), zero-padded when a component has fewer than
    dim+1 nodes. Components, in order of their smallest node index, are
    shifted along axis 0 by 2x the largest component radius so separate
    components stay separate."""
    if dim < 1:
        raise ValueError("dim must be positive")
    adj = g.adjacency()
    comps = _components(adj)
    coords = np.zeros((g.n_nodes, dim))
    for comp in comps:
        k = len(comp)
        if k == 1:
            continue
        index = {v: i for i, v in enumerate(comp)}
        lap = np.zeros((k, k))
        for v in comp:
            i = index[v]
            lap[i, i] = len(adj[v])
            for w in adj[v]:
                lap[i, index[int(w)]] = -1.0
        vals, vecs = np.linalg.eigh(lap)
        # skip the eigenvalue-0 constant vector(s); the component is
        # connected so exactly one
        for j in range(min(dim, k - 1)):
            vec = vecs[:, j + 1]
            nz = np.flatnonzero(np.abs(vec) > 1e-12)
            if nz.size and vec[nz[0]] < 0:
                vec = -vec
            for v in comp:
                coords[v, j] = vec[index[v]]
    radius = 0.0
    for comp in comps:
        rows = coords[comp]
        if rows.size:
            radius = max(radius, float(np.sqrt((rows * rows).sum(axis=1)).max()))
    if radius == 0.0:
        radius = 1.0
    for ci, comp in enumerate(comps):
        coords[comp, 0] += ci * 2.0 * radius
    return PointCloud(coords=coords, id=id)
