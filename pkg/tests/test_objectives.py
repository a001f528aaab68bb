import numpy as np
import pytest

from fwkit.errors import InputError
from fwkit.objectives import (BlockSeparable, FactoredQuadratic, LeastSquares,
                              MatrixCompletionLoss, ProblemInstance, Quadratic,
                              ShiftedNormSquare, build_instance,
                              compose_with_atoms, compose_with_linear,
                              exact_linesearch_quadratic)
from fwkit.atoms import SignedUnitAtom
from fwkit.regions import Simplex


def seeded_objectives():
    rng = np.random.default_rng(23)
    a = rng.standard_normal((6, 4))
    q = rng.standard_normal((4, 4))
    return [
        ("factored", FactoredQuadratic(a, rng.standard_normal(4), 0.3, +1), 4),
        ("factored_neg", FactoredQuadratic(a, rng.standard_normal(4), 0.0, -1), 4),
        ("least_squares", LeastSquares(a, rng.standard_normal(6)), 4),
        ("quadratic", Quadratic((q + q.T) / 2, rng.standard_normal(4)), 4),
        ("shifted", ShiftedNormSquare(rng.standard_normal(4)), 4),
        ("block", BlockSeparable([ShiftedNormSquare(rng.standard_normal(2)),
                                  LeastSquares(rng.standard_normal((3, 2)),
                                               rng.standard_normal(3))]), 4),
    ]


def test_eval_shifted_norm_minimum():
    obj = ShiftedNormSquare(np.full(3, 1.0 / 3.0))
    val, grad = obj.eval(np.full(3, 1.0 / 3.0))
    assert val == 0.0
    assert np.allclose(grad, 0.0)


def test_eval_least_squares_hand_expansion():
    # oracle by hand: ||x - b||^2 at 0 is 1, gradient -2b
    obj = LeastSquares(np.eye(2), np.array([1.0, 0.0]))
    val, grad = obj.eval(np.zeros(2))
    assert val == pytest.approx(1.0)
    assert np.allclose(grad, [-2.0, 0.0])


def test_eval_matrix_completion_hand_case():
    obj = MatrixCompletionLoss([(0, 0, 2.0)], 2, 2)
    val, grad = obj.eval(np.zeros((2, 2)))
    assert val == pytest.approx(4.0)
    assert grad[0, 0] == pytest.approx(-4.0)
    assert np.all(grad[1:, :] == 0.0) and grad[0, 1] == 0.0


def test_lipschitz_upper_values():
    assert LeastSquares(np.eye(3), np.zeros(3)).lipschitz_upper() == pytest.approx(2.0)
    # oracle: dense SVD gives sigma_max = 2, so L = 2 * 4
    obj = FactoredQuadratic(np.diag([2.0, 1.0]))
    assert np.linalg.svd(np.diag([2.0, 1.0]), compute_uv=False)[0] == 2.0
    assert obj.lipschitz_upper() == pytest.approx(8.0)
    assert MatrixCompletionLoss([(0, 1, 1.0)], 2, 3).lipschitz_upper() == 2.0


def test_strong_convexity_values():
    assert ShiftedNormSquare(np.zeros(2)).strong_convexity_lower() == 2.0
    # oracle: dense SVD gives sigma_min = 1
    assert LeastSquares(np.diag([2.0, 1.0]), np.zeros(2)).strong_convexity_lower() == pytest.approx(2.0)
    wide = LeastSquares(np.ones((1, 3)), np.zeros(1))
    assert wide.strong_convexity_lower() == 0.0


def test_gradient_matches_finite_differences():
    # oracle: central differences, step 1e-6, 100 seeded points per variant
    rng = np.random.default_rng(2)
    for name, obj, n in seeded_objectives():
        for _ in range(100 // 6 + 1):
            x = rng.standard_normal(n)
            _, grad = obj.eval(x)
            fd = np.zeros(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = 1e-6
                fp, _ = obj.eval(x + e)
                fm, _ = obj.eval(x - e)
                fd[i] = (fp - fm) / 2e-6
            scale = max(1.0, np.linalg.norm(grad))
            assert np.linalg.norm(fd - grad) <= 1e-4 * scale, name


def test_matrix_completion_gradient_finite_differences():
    rng = np.random.default_rng(4)
    obj = MatrixCompletionLoss([(0, 0, 1.0), (1, 2, -0.5), (0, 2, 0.25)], 2, 3)
    for _ in range(20):
        x = rng.standard_normal((2, 3))
        _, grad = obj.eval(x)
        fd = np.zeros((2, 3))
        for i in range(2):
            for j in range(3):
                e = np.zeros((2, 3))
                e[i, j] = 1e-6
                fd[i, j] = (obj.eval(x + e)[0] - obj.eval(x - e)[0]) / 2e-6
        assert np.max(np.abs(fd - grad)) <= 1e-4 * max(1.0, np.abs(grad).max())


def test_descent_lemma_upper_model():
    # property: f(x + a d) <= f(x) + a <g, d> + L a^2 ||d||^2 / 2
    rng = np.random.default_rng(9)
    for name, obj, n in seeded_objectives():
        L = obj.lipschitz_upper()
        for _ in range(100 // 6 + 1):
            x = rng.standard_normal(n)
            d = rng.standard_normal(n)
            a = float(rng.uniform(0.0, 1.5))
            f0, g = obj.eval(x)
            f1, _ = obj.eval(x + a * d)
            model = f0 + a * float(g @ d) + 0.5 * L * a * a * float(d @ d)
            assert f1 <= model + 1e-9 * max(1.0, abs(model)), name


def test_strong_convexity_inequality():
    rng = np.random.default_rng(13)
    for name, obj, n in seeded_objectives():
        if name in ("factored_neg", "quadratic"):
            continue
        mu = obj.strong_convexity_lower()
        for _ in range(100 // 4 + 1):
            x = rng.standard_normal(n)
            y = rng.standard_normal(n)
            fx, gx = obj.eval(x)
            fy, _ = obj.eval(y)
            lower = fx + float(gx @ (y - x)) + 0.5 * mu * float((x - y) @ (x - y))
            assert fy >= lower - 1e-9 * max(1.0, abs(lower)), name


def test_exact_linesearch_cases():
    obj = ShiftedNormSquare(np.zeros(2))
    x = np.array([1.0, 0.0])
    d = np.array([-1.0, 0.0])
    # oracle by hand: the unconstrained minimizer along d sits at alpha = 1
    assert exact_linesearch_quadratic(obj, x, d, 1.0) == pytest.approx(1.0)
    assert exact_linesearch_quadratic(obj, x, d, 0.5) == pytest.approx(0.5)
    d_perp = np.array([0.0, 1.0])
    assert exact_linesearch_quadratic(obj, x, d_perp, 1.0) == pytest.approx(0.0)


def test_exact_linesearch_concave_prefers_cheaper_endpoint():
    obj = Quadratic(-np.eye(2))
    x = np.array([0.1, 0.0])
    d = np.array([1.0, 0.0])
    # concave along d and descending: the far endpoint wins
    assert exact_linesearch_quadratic(obj, x, d, 2.0) == pytest.approx(2.0)
    # symmetric case ties at both endpoints: the smallest minimizer is 0
    obj_flat = Quadratic(np.zeros((2, 2)))
    assert exact_linesearch_quadratic(obj_flat, x, np.array([0.0, 1.0]), 3.0) == 0.0


def test_exact_linesearch_rejects_zero_direction():
    with pytest.raises(InputError):
        exact_linesearch_quadratic(ShiftedNormSquare(np.zeros(2)), np.zeros(2), np.zeros(2), 1.0)


def test_meb_dual_two_points_hand_solution():
    # oracle by hand: the dual on two points (0,0), (2,0) is 4 t^2 - 4 t over
    # t in [0,1]; optimum t = 1/2, value -1, center (1, 0), radius 1
    inst = build_instance("meb_dual", points=np.array([[0.0, 0.0], [2.0, 0.0]]))
    x = np.array([0.5, 0.5])
    val, grad = inst.objective.eval(x)
    assert val == pytest.approx(-1.0)
    lam = grad - float(grad @ x)
    assert np.allclose(lam, 0.0, atol=1e-12)  # stationary on the simplex
    center = np.array([[0.0, 0.0], [2.0, 0.0]]).T @ x
    assert np.allclose(center, [1.0, 0.0])
    radius2 = max(np.linalg.norm(p - center) ** 2 for p in [(0, 0), (2, 0)])
    assert radius2 == pytest.approx(1.0)
    assert -val == pytest.approx(radius2)


def test_simplex_distance_instance():
    inst = build_instance("simplex_distance", n=3)
    assert inst.f_star == 0.0
    assert np.allclose(inst.x_star, np.full(3, 1.0 / 3.0))
    assert inst.L == 2.0 and inst.mu == 2.0
    assert inst.curvature_upper == pytest.approx(inst.L * inst.D ** 2)


def test_max_clique_triangle_grid_oracle():
    # oracle: dense grid over the simplex plus local refinement confirms the
    # maximum of x'Ax + ||x||^2/2 on K3 is 5/6 at the barycenter
    inst = build_instance("max_clique", n=3, edges=[(0, 1), (0, 2), (1, 2)])
    best = -np.inf
    arg = None
    steps = 60
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            x = np.array([i, j, steps - i - j]) / steps
            val, _ = inst.objective.eval(x)
            if -val > best:
                best = -val
                arg = x
    assert best == pytest.approx(5.0 / 6.0, abs=1e-3)
    assert np.allclose(arg, 1.0 / 3.0, atol=0.05)
    val_bary, _ = inst.objective.eval(np.full(3, 1.0 / 3.0))
    assert -val_bary == pytest.approx(5.0 / 6.0, abs=1e-12)


def test_build_instance_deterministic():
    a = build_instance("lasso", seed=5, m=8, n=12, tau=1.0)
    b = build_instance("lasso", seed=5, m=8, n=12, tau=1.0)
    assert np.array_equal(a.objective.a, b.objective.a)
    assert np.array_equal(a.objective.b, b.objective.b)
    c = build_instance("boundary_quadratic", seed=5, n=6)
    d = build_instance("boundary_quadratic", seed=5, n=6)
    assert np.array_equal(c.objective.a, d.objective.a)
    assert np.array_equal(c.x_star, d.x_star)


def test_problem_instance_validates_optimum():
    obj = ShiftedNormSquare(np.full(2, 0.5))
    with pytest.raises(InputError):
        ProblemInstance(obj, Simplex(2), 2.0, 2.0, np.sqrt(2.0),
                        f_star=0.5, x_star=np.array([0.5, 0.5]))
    with pytest.raises(InputError):
        ProblemInstance(obj, Simplex(2), 2.0, 2.0, np.sqrt(2.0),
                        f_star=0.0, x_star=np.array([2.0, -1.0]))


def test_interior_and_boundary_instances_are_stationary():
    inst = build_instance("interior_quadratic", n=5, seed=3)
    _, g = inst.objective.eval(inst.x_star)
    assert np.linalg.norm(g) <= 1e-9
    inst = build_instance("boundary_quadratic", n=7, support=3, seed=3)
    _, g = inst.objective.eval(inst.x_star)
    lam = g - float(g @ inst.x_star)
    support = np.flatnonzero(inst.x_star > 0)
    assert np.allclose(lam[support], 0.0, atol=1e-9)
    assert np.all(lam[len(support):] > 0.1)  # strict complementarity


def test_ball_quadratic_gradient_bound():
    inst = build_instance("ball_quadratic", n=6, eps=1.0, c=0.5, seed=0)
    rng = np.random.default_rng(1)
    for _ in range(200):
        z = rng.standard_normal(6)
        z *= rng.random() / np.linalg.norm(z)
        _, g = inst.objective.eval(z)
        assert np.linalg.norm(g) >= 0.5 - 1e-9
    val, _ = inst.objective.eval(inst.x_star)
    assert val == pytest.approx(inst.f_star, abs=1e-12)


def test_compose_with_linear_matches_pointwise():
    rng = np.random.default_rng(8)
    m = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    for name, obj, n in seeded_objectives():
        if name == "block":
            continue
        composed = compose_with_linear(obj, m)
        for _ in range(10):
            y = rng.standard_normal(4)
            v1, g1 = composed.eval(y)
            v2, g2 = obj.eval(m @ y)
            assert v1 == pytest.approx(v2, rel=1e-10, abs=1e-10)
            assert np.allclose(g1, m.T @ g2, atol=1e-9)


def test_compose_with_atoms_matches_pointwise():
    rng = np.random.default_rng(12)
    atoms = [SignedUnitAtom(i, +1, 1.0, 5) for i in (0, 2, 4)]
    v = np.column_stack([a.densify() for a in atoms])
    objectives = [
        LeastSquares(rng.standard_normal((3, 5)), rng.standard_normal(3)),
        FactoredQuadratic(rng.standard_normal((4, 5)), rng.standard_normal(5), 0.2, -1),
        ShiftedNormSquare(rng.standard_normal(5)),
    ]
    for obj in objectives:
        comp = compose_with_atoms(obj, atoms)
        for _ in range(10):
            lam = rng.random(3)
            lam /= lam.sum()
            v1, g1 = comp.eval(lam)
            v2, g2 = obj.eval(v @ lam)
            assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)
            assert np.allclose(g1, v.T @ g2, atol=1e-10)
