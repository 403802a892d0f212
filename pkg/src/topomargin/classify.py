"""Soft-margin maximal-margin classifier trained by an interior-point QP solver.

The training problem, for labels y_j in {-1,+1} and feature rows F (distance
rows or plain feature vectors), is

    minimize    ||beta||^2 + a * sum_j xi_j
    subject to  y_j (F_j . beta + c) >= 1 - xi_j,   xi_j >= 0,

stacked over alpha = (beta, xi, c) as  minimize 1/2 alpha' Q alpha + b' alpha
subject to G alpha >= h, with

    Q = diag(2 I_m, 0, 0)        b = (0^m, a 1^n, 0)
    G = [[y*F, I_n, y],          h = (1^n, 0^n)
         [0,   I_n, 0]]

where y*F scales row j of F by y_j. The solver is a Mehrotra
predictor-corrector primal-dual interior-point method written here rather
than taken from an off-the-shelf package: the problem class is fixed and
small, the harness needs bit-for-bit deterministic solutions, and the zero
diagonal blocks of Q need a controlled static regularization (1e-10,
recorded in every solver report) that general-purpose wrappers hide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

REGULARIZATION = 1e-10
DEFAULT_PENALTY = 1.0
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 20000

FEATURE_KINDS = ("bs-distances", "stat-features")


class ConvergenceError(RuntimeError):
    """Solver hit max_iter; carries the final residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class InfeasibleError(RuntimeError):
    """Dual iterates diverged: no feasible point exists."""


@dataclass
class LabeledSet:
    ids: list
    labels: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.float64).reshape(-1)
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        n = len(self.ids)
        if self.labels.shape[0] != n or self.features.shape[0] != n:
            raise ValueError("ids, labels and feature rows must align")
        bad = set(np.unique(self.labels)) - {-1.0, 1.0}
        if bad:
            raise ValueError(f"labels must be -1 or +1, got {sorted(bad)}")

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass
class QPProblem:
    Q: np.ndarray
    b: np.ndarray
    G: np.ndarray
    h: np.ndarray
    n: int
    m: int


def assemble_qp(data: LabeledSet, a: float = DEFAULT_PENALTY) -> QPProblem:
    """Build the block QP above. Feature matrix is n x m (m = n for distance
    rows); alpha has length m + n + 1."""
    if a <= 0:
        raise ValueError(f"penalty must be positive, got {a}")
    if data.n < 2:
        raise ValueError("training needs at least two points")
    y = data.labels
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("training set must contain both classes")
    F = data.features
    n, m = F.shape
    size = m + n + 1

    Q = np.zeros((size, size))
    Q[:m, :m] = 2.0 * np.eye(m)
    b = np.zeros(size)
    b[m:m + n] = a

    G = np.zeros((2 * n, size))
    G[:n, :m] = y[:, None] * F
    G[:n, m:m + n] = np.eye(n)
    G[:n, m + n] = y
    G[n:, m:m + n] = np.eye(n)
    h = np.concatenate([np.ones(n), np.zeros(n)])
    return QPProblem(Q=Q, b=b, G=G, h=h, n=n, m=m)


@dataclass
class SolveResult:
    alpha: np.ndarray
    iterations: int
    residuals: dict
    regularization: float

    def report(self) -> dict:
        return {
            "iterations": self.iterations,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "regularization": self.regularization,
        }


def solve_qp(p: QPProblem, tol: float = DEFAULT_TOL,
             max_iter: int = DEFAULT_MAX_ITER) -> SolveResult:
    """Minimize 1/2 x'Qx + b'x over Gx >= h.

    Mehrotra predictor-corrector with slacks s = Gx - h and duals z >= 0.
    Each iteration factors M = Q_r + G' diag(z/s) G (Q_r = Q with 1e-10
    added to zero diagonal entries) and takes an affine-scaling step to set
    the centering weight sigma = (mu_aff/mu)^3, then a corrected step with
    fraction-to-boundary 0.9995. Fully deterministic.
    """
    Qr = p.Q.copy()
    zero_diag = np.diag(Qr) == 0.0
    Qr[np.diag_indices_from(Qr)] += np.where(zero_diag, REGULARIZATION, 0.0)
    G, h, b = p.G, p.h, p.b
    n_con = G.shape[0]

    x = np.zeros(G.shape[1])
    s = np.maximum(1.0, np.abs(h))
    z = np.ones(n_con)

    h_scale = 1.0 + np.abs(h).max(initial=0.0)
    b_scale = 1.0 + np.abs(b).max(initial=0.0)

    def residuals():
        rd = Qr @ x + b - G.T @ z
        slack = G @ x - h
        return {
            "dual": float(np.abs(rd).max(initial=0.0)),
            "primal": float(max(0.0, -(slack.min(initial=0.0)))),
            "comp": float(np.abs(s * z).max(initial=0.0)),
        }

    for it in range(max_iter):
        rd = Qr @ x + b - G.T @ z
        rp = G @ x - s - h
        slack = G @ x - h
        comp = s * z
        if (slack.min(initial=0.0) >= -tol * h_scale
                and np.abs(rd).max(initial=0.0) <= tol * b_scale
                and comp.max(initial=0.0) <= tol * b_scale):
            return SolveResult(x.copy(), it, residuals(), REGULARIZATION)
        if np.abs(z).max(initial=0.0) > 1e13:
            raise InfeasibleError(
                "dual variables diverged; constraints admit no feasible point"
            )

        # cap the scaling so nearly-zero slacks of redundant constraints
        # cannot overflow or annihilate the Newton matrix
        zs = np.minimum(z / s, 1e16)
        M = Qr + (G.T * zs) @ G
        mu = comp.sum() / n_con
        bump = 0.0

        def lin_solve(rhs):
            nonlocal M, bump
            while True:
                try:
                    return np.linalg.solve(M, rhs)
                except np.linalg.LinAlgError:
                    scale = 1.0 + float(np.abs(np.diag(M)).max())
                    bump = max(10.0 * bump, 1e-12 * scale)
                    if bump > scale:
                        raise ConvergenceError(
                            "Newton system irreparably singular", residuals()
                        ) from None
                    M = M + bump * np.eye(M.shape[0])

        def step(rc):
            rhs = -(rd + G.T @ ((rc + z * rp) / s))
            dx = lin_solve(rhs)
            ds = G @ dx + rp
            dz = -(rc + z * ds) / s
            return dx, ds, dz

        def max_step(v, dv):
            neg = dv < 0
            if not neg.any():
                return 1.0
            return min(1.0, float((-v[neg] / dv[neg]).min()))

        dx_a, ds_a, dz_a = step(comp)
        a_aff = min(max_step(s, ds_a), max_step(z, dz_a))
        mu_aff = ((s + a_aff * ds_a) * (z + a_aff * dz_a)).sum() / n_con
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0

        dx, ds, dz = step(comp + ds_a * dz_a - sigma * mu)
        # one common step length: with Q != 0 the dual residual only
        # contracts when x and z move together
        a = 0.9995 * min(max_step(s, ds), max_step(z, dz))
        x = x + a * dx
        s = s + a * ds
        z = z + a * dz

    raise ConvergenceError(
        f"no convergence after {max_iter} iterations", residuals()
    )


@dataclass
class MarginModel:
    beta: np.ndarray
    c: float
    xi: np.ndarray
    landmark_ids: list
    penalty: float
    feature_kind: str
    solver_report: dict
    tol: float = DEFAULT_TOL
    preprocess: dict = field(default_factory=dict)

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64).reshape(-1)
        self.xi = np.asarray(self.xi, dtype=np.float64).reshape(-1)
        if self.feature_kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.feature_kind!r}")

    def to_json_obj(self) -> dict:
        obj = {
            "beta": [repr(float(v)) for v in self.beta],
            "c": repr(float(self.c)),
            "xi": [repr(float(v)) for v in self.xi],
            "a": self.penalty,
            "tol": self.tol,
            "feature_kind": self.feature_kind,
            "landmark_ids": list(self.landmark_ids),
            "solver_report": self.solver_report,
        }
        if self.preprocess:
            obj["preprocess"] = self.preprocess
        return obj

    @classmethod
    def from_json_obj(cls, obj) -> "MarginModel":
        return cls(
            beta=np.array([float(v) for v in obj["beta"]]),
            c=float(obj["c"]),
            xi=np.array([float(v) for v in obj["xi"]]),
            landmark_ids=list(obj["landmark_ids"]),
            penalty=float(obj["a"]),
            feature_kind=obj["feature_kind"],
            solver_report=dict(obj["solver_report"]),
            tol=float(obj.get("tol", DEFAULT_TOL)),
            preprocess=dict(obj.get("preprocess", {})),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "MarginModel":
        with open(path) as fh:
            return cls.from_json_obj(json.load(fh))


def train(data: LabeledSet, a: float = DEFAULT_PENALTY, tol: float = DEFAULT_TOL,
          feature_kind: str = "bs-distances") -> MarginModel:
    """Solve the soft-margin QP and unpack alpha = (beta, xi, c).

    The slack block is cross-checked against the hinge identity
    xi_j = max(0, 1 - y_j (F_j . beta + c)) to within 10*tol. The solver
    runs tighter than tol so the check holds across penalty scales.
    """
    p = assemble_qp(data, a)
    result = solve_qp(p, tol=tol * min(1.0, a) / 8.0)
    alpha = result.alpha
    beta = alpha[:p.m]
    xi = alpha[p.m:p.m + p.n]
    c = float(alpha[p.m + p.n])

    margins = data.labels * (data.features @ beta + c)
    hinge = np.maximum(0.0, 1.0 - margins)
    gap = np.abs(xi - hinge).max(initial=0.0)
    if gap > 10.0 * tol:
        raise ConvergenceError(
            f"slack block disagrees with hinge identity by {gap:.3e}",
            result.residuals,
        )
    return MarginModel(
        beta=beta,
        c=c,
        xi=hinge,
        landmark_ids=list(data.ids),
        penalty=a,
        feature_kind=feature_kind,
        solver_report=result.report(),
        tol=tol,
    )


def predict(model: MarginModel, features) -> tuple:
    """Score a feature vector: f = beta . v + c, label = sign(f), with the
    tie f == 0 mapped to +1. Returns (label, score)."""
    v = np.asarray(features, dtype=np.float64).reshape(-1)
    if v.shape[0] != model.beta.shape[0]:
        raise ValueError(
            f"feature length {v.shape[0]} does not match model ({model.beta.shape[0]})"
        )
    score = float(model.beta @ v + model.c)
    return (1 if score >= 0 else -1), score


def predict_batch(model: MarginModel, rows) -> list:
    return [predict(model, row) for row in rows]
