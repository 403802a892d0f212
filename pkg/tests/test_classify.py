import numpy as np
import pytest
from reference_qp import solve_reference

from topomargin._rng import SplitMix64, combine
from topomargin.classify import (
    ConvergenceError,
    InfeasibleError,
    LabeledSet,
    MarginModel,
    QPProblem,
    assemble_qp,
    predict,
    predict_batch,
    solve_qp,
    train,
)


def random_set(seed, n, d, spread=1.0):
    rng = SplitMix64(seed)
    feats = np.array(
        [[(rng.next_double() - 0.5) * 2 * spread for _ in range(d)] for _ in range(n)]
    )
    labels = np.array([1.0 if i < n // 2 else -1.0 for i in range(n)])
    # nudge classes apart so most instances are interesting but not degenerate
    feats[labels > 0, 0] += 0.5
    feats[labels < 0, 0] -= 0.5
    return LabeledSet(ids=[f"p{i}" for i in range(n)], labels=labels, features=feats)


def objective(data, a, beta, c):
    margins = data.labels * (data.features @ beta + c)
    return float(beta @ beta + a * np.maximum(0.0, 1.0 - margins).sum())


class TestAssembly:
    def test_two_point_blocks(self):
        data = LabeledSet(
            ids=["a", "b"],
            labels=[1, -1],
            features=np.array([[0.0, 1.5], [1.5, 0.0]]),
        )
        p = assemble_qp(data, a=1.0)
        assert p.Q.shape == (5, 5)
        np.testing.assert_array_equal(np.diag(p.Q), [2, 2, 0, 0, 0])
        assert not p.Q[np.eye(5) == 0].any()
        np.testing.assert_array_equal(p.b, [0, 0, 1, 1, 0])
        np.testing.assert_array_equal(p.h, [1, 1, 0, 0])
        # top rows: [y_j * F_j | I | y_j], bottom rows: [0 | I | 0]
        np.testing.assert_array_equal(p.G[0], [0.0, 1.5, 1, 0, 1])
        np.testing.assert_array_equal(p.G[1], [-1.5, -0.0, 0, 1, -1])
        np.testing.assert_array_equal(p.G[2], [0, 0, 1, 0, 0])
        np.testing.assert_array_equal(p.G[3], [0, 0, 0, 1, 0])

    def test_hadamard_rows_entrywise(self):
        data = random_set(combine(1, 0), 6, 3)
        p = assemble_qp(data, a=2.5)
        for j in range(6):
            np.testing.assert_array_equal(
                p.G[j, :3], data.labels[j] * data.features[j]
            )
        np.testing.assert_array_equal(p.G[:6, 9], data.labels)
        np.testing.assert_array_equal(p.b[3:9], np.full(6, 2.5))

    def test_rectangular_features_resize_blocks(self):
        data = random_set(combine(1, 1), 8, 3)
        p = assemble_qp(data)
        assert p.Q.shape == (12, 12) and p.G.shape == (16, 12)
        assert p.m == 3 and p.n == 8

    def test_input_validation(self):
        feats = np.zeros((2, 2))
        with pytest.raises(ValueError):
            LabeledSet(ids=["a", "b"], labels=[1, 0], features=feats)
        same = LabeledSet(ids=["a", "b"], labels=[1, 1], features=feats)
        with pytest.raises(ValueError):
            assemble_qp(same)
        both = LabeledSet(ids=["a", "b"], labels=[1, -1], features=feats)
        with pytest.raises(ValueError):
            assemble_qp(both, a=0.0)
        with pytest.raises(ValueError):
            assemble_qp(both, a=-1.0)

    def test_distance_rows_and_plain_features_assemble_identically(self):
        rows = random_set(combine(1, 2), 5, 5).features
        sym = (rows + rows.T) / 2
        np.fill_diagonal(sym, 0.0)
        labels = [1, 1, -1, -1, 1]
        ids = list("abcde")
        pa = assemble_qp(LabeledSet(ids=ids, labels=labels, features=sym), a=3.0)
        pb = assemble_qp(LabeledSet(ids=ids, labels=labels, features=sym.copy()), a=3.0)
        for x, y in ((pa.Q, pb.Q), (pa.b, pb.b), (pa.G, pb.G), (pa.h, pb.h)):
            np.testing.assert_array_equal(x, y)


class TestSolver:
    def test_one_variable_smoke(self):
        p = QPProblem(Q=np.array([[2.0]]), b=np.zeros(1),
                      G=np.array([[1.0]]), h=np.array([1.0]), n=1, m=1)
        r = solve_qp(p)
        assert r.alpha[0] == pytest.approx(1.0, abs=1e-8)

    def test_residual_contract(self):
        data = random_set(combine(2, 0), 10, 4)
        p = assemble_qp(data, a=1.0)
        tol = 1e-8
        r = solve_qp(p, tol=tol)
        slack = p.G @ r.alpha - p.h
        assert slack.min() >= -tol * (1 + np.abs(p.h).max())
        bscale = 1 + np.abs(p.b).max()
        assert r.residuals["dual"] <= tol * bscale
        assert r.residuals["comp"] <= tol * bscale

    def test_infeasible_raises(self):
        p = QPProblem(Q=np.array([[2.0]]), b=np.zeros(1),
                      G=np.array([[1.0], [-1.0]]), h=np.array([1.0, 1.0]), n=1, m=1)
        with pytest.raises(InfeasibleError):
            solve_qp(p)

    def test_iteration_cap_raises_with_residuals(self):
        data = random_set(combine(2, 1), 8, 3)
        p = assemble_qp(data)
        with pytest.raises(ConvergenceError) as exc:
            solve_qp(p, max_iter=2)
        assert {"primal", "dual", "comp"} <= set(exc.value.residuals)

    def test_deterministic(self):
        data = random_set(combine(2, 2), 12, 4)
        p = assemble_qp(data)
        a1 = solve_qp(p).alpha
        a2 = solve_qp(p).alpha
        np.testing.assert_array_equal(a1, a2)


class TestTraining:
    def test_analytic_two_point_margin(self):
        data = LabeledSet(
            ids=["neg", "pos"],
            labels=[-1, 1],
            features=np.array([[-1.0], [1.0]]),
        )
        model = train(data, a=100.0)
        assert model.beta[0] == pytest.approx(1.0, abs=1e-6)
        assert model.c == pytest.approx(0.0, abs=1e-6)
        assert model.xi.max() <= 1e-6
        label, score = predict(model, [1.0])
        assert (label, score) == (1, pytest.approx(1.0, abs=1e-6))

    def test_matches_reference_solver_on_small_instances(self):
        worst = 0.0
        for k in range(50):
            rng = SplitMix64(combine(3, k))
            n = 4 + rng.next_below(5)       # 4..8
            d = 2 + rng.next_below(4)       # 2..5
            a = (0.1, 1.0, 10.0)[rng.next_below(3)]
            data = random_set(combine(3, k, 1), n, d)
            ref = solve_reference(data.features, data.labels, a)
            model = train(data, a=a)
            ours = objective(data, a, model.beta, model.c)
            rel = abs(ours - ref["value"]) / (1 + abs(ref["value"]))
            worst = max(worst, rel)
            assert rel <= 1e-5, f"instance {k}: {ours} vs {ref['value']}"
            np.testing.assert_allclose(model.beta, ref["beta"], atol=1e-4)
        assert worst < 1e-5

    def test_hinge_identity_elementwise(self):
        data = random_set(combine(3, 99), 14, 4)
        for a in (0.1, 1.0, 10.0):
            model = train(data, a=a)
            margins = data.labels * (data.features @ model.beta + model.c)
            hinge = np.maximum(0.0, 1.0 - margins)
            np.testing.assert_allclose(model.xi, hinge, atol=10 * model.tol)
            assert model.xi.min() >= -model.tol

    def test_label_flip_antisymmetry(self):
        data = random_set(combine(4, 0), 10, 3)
        flipped = LabeledSet(
            ids=data.ids, labels=-data.labels, features=data.features
        )
        m1, m2 = train(data), train(flipped)
        np.testing.assert_allclose(m2.beta, -m1.beta, atol=1e-6)
        assert m2.c == pytest.approx(-m1.c, abs=1e-6)
        for row in data.features:
            assert abs(predict(m1, row)[1]) == pytest.approx(
                abs(predict(m2, row)[1]), abs=1e-6
            )

    def test_landmark_permutation_equivariance(self):
        n = 8
        rows = random_set(combine(4, 1), n, n).features
        sym = (rows + rows.T) / 2
        np.fill_diagonal(sym, 0.0)
        labels = [1, -1, 1, -1, 1, -1, 1, -1]
        ids = [f"p{i}" for i in range(n)]
        base = train(LabeledSet(ids=ids, labels=labels, features=sym))
        perm = [3, 1, 4, 0, 7, 5, 2, 6]
        permuted = train(
            LabeledSet(ids=ids, labels=labels, features=sym[:, perm])
        )
        np.testing.assert_allclose(permuted.beta, base.beta[perm], atol=1e-6)
        for j in range(n):
            assert predict(base, sym[j])[1] == pytest.approx(
                predict(permuted, sym[j, perm])[1], abs=1e-6
            )

    def test_separable_clusters_have_zero_slack(self):
        rng = SplitMix64(combine(4, 2))
        pos = np.array([[5.0 + 0.1 * rng.next_double(), 0.1 * rng.next_double()]
                        for _ in range(6)])
        neg = -pos
        data = LabeledSet(
            ids=[f"s{i}" for i in range(12)],
            labels=[1] * 6 + [-1] * 6,
            features=np.vstack([pos, neg]),
        )
        model = train(data, a=10.0)
        assert model.xi.max() <= 10 * model.tol
        for row, y in zip(data.features, data.labels):
            assert predict(model, row)[0] == y

    def test_conflicting_duplicate_forces_unit_slack(self):
        feats = np.array([[0.0, 0.0], [0.0, 0.0], [2.0, 0.0], [-2.0, 0.0]])
        data = LabeledSet(
            ids=["dup+", "dup-", "far+", "far-"],
            labels=[1, -1, 1, -1],
            features=feats,
        )
        model = train(data, a=0.05)
        assert model.xi[:2].max() >= 1.0 - 1e-6

    def test_beta_norm_shrinks_with_penalty(self):
        data = random_set(combine(4, 3), 12, 3)
        norms = [float(np.linalg.norm(train(data, a=a).beta))
                 for a in (1.0, 0.1, 0.01)]
        assert norms[0] + 1e-6 >= norms[1] >= norms[2] - 1e-6


class TestPrediction:
    def model(self, beta, c):
        return MarginModel(
            beta=np.asarray(beta, dtype=float), c=c, xi=np.zeros(1),
            landmark_ids=["z"], penalty=1.0, feature_kind="stat-features",
            solver_report={},
        )

    def test_frozen_examples(self):
        assert predict(self.model([1.0], 0.0), [2.0]) == (1, 2.0)
        assert predict(self.model([1.0], -3.0), [2.0]) == (-1, -1.0)

    def test_tie_breaks_positive(self):
        assert predict(self.model([1.0], 0.0), [0.0])[0] == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            predict(self.model([1.0, 2.0], 0.0), [1.0])

    def test_batch_matches_single(self):
        model = self.model([2.0, -1.0], 0.5)
        rows = [[1.0, 1.0], [0.0, 3.0]]
        assert predict_batch(model, rows) == [predict(model, r) for r in rows]


def test_model_json_round_trip(tmp_path):
    data = random_set(combine(5, 0), 6, 3)
    model = train(data, a=2.0, feature_kind="stat-features")
    path = tmp_path / "model.json"
    model.save(path)
    back = MarginModel.load(path)
    np.testing.assert_array_equal(back.beta, model.beta)
    assert back.c == model.c
    np.testing.assert_array_equal(back.xi, model.xi)
    assert back.landmark_ids == model.landmark_ids
    assert back.penalty == model.penalty
    assert back.feature_kind == model.feature_kind
    assert back.tol == model.tol
    assert back.solver_report == model.solver_report
