"""Acceptance suite: one test per criterion, one printed line per criterion.

Each criterion pins its tolerance in place; shared solver runs are module
fixtures so the per-step guarantees of criterion 13 audit the exact traces
produced for criteria 1-5.
"""

import itertools
import time

import numpy as np
import pytest

from fwkit.diagnostics import (affine_invariance_harness, fit_geometric_rate,
                               inexact_rate_check, interior_contraction_check,
                               per_step_guarantees, simplex_multipliers,
                               strongly_convex_domain_check,
                               support_identification, verify_sublinear_bound)
from fwkit.minnorm import solve_wolfe_mnp
from fwkit.objectives import (FactoredQuadratic, ProblemInstance,
                              build_instance, cardinality_cap_oracle,
                              graph_cut_oracle, modular_oracle)
from fwkit.regions import (InexactSchedule, Simplex, base_polytope_greedy,
                           fw_gap, make_inexact_lmo,
                           pyramidal_width_bruteforce)
from fwkit.solvers import SolverConfig, reference_f_star, solve
from fwkit.stepsizes import Diminishing, ExactLine, LipschitzDep


def verdict(num, name, ok, detail=""):
    print("ACCEPTANCE %02d %-28s %s %s" % (num, name, "PASS" if ok else "FAIL", detail))
    assert ok, "criterion %d (%s) failed %s" % (num, name, detail)


@pytest.fixture(scope="module")
def crit1_runs():
    t0 = time.perf_counter()
    simplex = build_instance("simplex_distance", n=50)
    rep_simplex = solve(simplex, SolverConfig(
        variant="FW", stepsize=LipschitzDep(simplex.L), max_iter=10000,
        gap_tol=1e-300, seed=0))
    lasso = build_instance("lasso", m=20, n=50, tau=1.0, seed=7)
    f_star, _ = reference_f_star(lasso, gap_tol=1e-12, max_iter=100000)
    lasso.f_star = f_star
    rep_lasso = solve(lasso, SolverConfig(
        variant="FW", stepsize=LipschitzDep(lasso.L), max_iter=10000,
        gap_tol=1e-300, seed=0))
    elapsed = time.perf_counter() - t0
    return rep_simplex, rep_lasso, elapsed


@pytest.fixture(scope="module")
def crit2_runs():
    inst = build_instance("simplex_distance", n=100)
    reports = {}
    for variant in ("FW", "AFW", "PFW"):
        reports[variant] = solve(inst, SolverConfig(
            variant=variant, stepsize=LipschitzDep(inst.L), max_iter=150,
            gap_tol=1e-300, seed=0))
    return reports


@pytest.fixture(scope="module")
def crit4_run():
    inst = build_instance("interior_quadratic", n=5, offset=0.5, seed=11)
    report = solve(inst, SolverConfig(
        variant="FW", stepsize=LipschitzDep(inst.L), max_iter=100000,
        gap_tol=1e-10, seed=0))
    return inst, report


@pytest.fixture(scope="module")
def crit5_runs():
    runs = {}
    for c in (0.0, 1.0):
        inst = build_instance("ball_quadratic", n=20, eps=1.0, c=c, seed=3)
        runs[c] = solve(inst, SolverConfig(
            variant="FW", stepsize=LipschitzDep(inst.L), max_iter=10000,
            gap_tol=1e-300, seed=0))
    return runs


def test_criterion_01_sublinear_bound(crit1_runs):
    rep_simplex, rep_lasso, elapsed = crit1_runs
    res_s = verify_sublinear_bound(rep_simplex)
    res_l = verify_sublinear_bound(rep_lasso)
    ok = res_s.ok and res_l.ok and elapsed < 10.0
    verdict(1, "sublinear bound", ok,
            "(margins %.2e / %.2e, %.1f s)" % (res_s.margin, res_l.margin, elapsed))


def test_criterion_02_lower_bound_and_sparsity(crit2_runs):
    ok = True
    detail = []
    for variant, report in crit2_runs.items():
        hs = report.primal_gaps()
        for rec, h in zip(report.records, hs):
            if rec.k <= 98:
                ok = ok and h >= 1.0 / (rec.k + 1.0) - 1.0 / 100.0 - 1e-12
            ok = ok and rec.support_size <= rec.k + 1
        detail.append(variant)
    verdict(2, "1/k lower bound + sparsity", ok, "(%s)" % ", ".join(detail))


def test_criterion_03_linear_rate_of_variants():
    inst = build_instance("boundary_quadratic", n=10, support=3, seed=42)
    details = []
    ok = True
    for variant in ("AFW", "PFW"):
        report = solve(inst, SolverConfig(
            variant=variant, stepsize=ExactLine(), max_iter=500,
            gap_tol=1e-11, seed=0))
        hs = report.primal_gaps()
        reached = next((r.k for r, h in zip(report.records, hs) if h <= 1e-10), None)
        fit = fit_geometric_rate(report, good_only=True)
        ok = ok and reached is not None and reached <= 500
        ok = ok and fit.q < 1.0 and fit.r2 >= 0.95
        details.append("%s q=%.3f r2=%.3f reach@%s" % (variant, fit.q, fit.r2, reached))
    fw_report = solve(inst, SolverConfig(
        variant="FW", stepsize=ExactLine(), max_iter=500, gap_tol=1e-300, seed=0))
    fw_fit = fit_geometric_rate(fw_report, good_only=True)
    ok = ok and fw_fit.q >= 0.99
    details.append("FW q=%.4f" % fw_fit.q)
    verdict(3, "variants linear rate", ok, "(%s)" % "; ".join(details))


def test_criterion_04_interior_optimum_contraction(crit4_run):
    inst, report = crit4_run
    res = interior_contraction_check(report)
    verdict(4, "interior linear rate", res.ok,
            "(worst margin %.2e over %d steps)" % (res.margin, len(report.records)))


def test_criterion_05_strongly_convex_domain(crit5_runs):
    res_flat = strongly_convex_domain_check(crit5_runs[0.0])
    res_grad = strongly_convex_domain_check(crit5_runs[1.0])
    fit = fit_geometric_rate(crit5_runs[1.0], good_only=True)
    ok = res_flat.ok and res_grad.ok and fit.q < 1.0
    verdict(5, "strongly convex domain", ok,
            "(k^2 h margin %.2e, q=%.3f)" % (res_flat.margin, fit.q))


def test_criterion_06_min_norm_point_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((10, 3)) + rng.uniform(-1.0, 1.0, size=3)
        mnp = solve_wolfe_mnp(pts, SolverConfig(variant="WolfeMNP",
                                                max_iter=500, gap_tol=1e-14))
        obj = FactoredQuadratic(pts.T)
        inst = ProblemInstance(obj, Simplex(10), obj.lipschitz_upper(), 0.0,
                               np.sqrt(2.0), family="qp_reference")
        ref = solve(inst, SolverConfig(variant="AFW", stepsize=ExactLine(),
                                       max_iter=5000, gap_tol=1e-15,
                                       record_every=10 ** 9))
        x_ref = pts.T @ ref.meta["x_final"]
        worst = max(worst, float(np.linalg.norm(mnp.meta["x_final"] - x_ref)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5.0
    verdict(6, "min-norm point equivalence", ok,
            "(worst %.2e, %.2f s)" % (worst, elapsed))


def test_criterion_07_greedy_oracle_exact():
    edges = [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 3.0), (3, 4, 1.0), (0, 4, 2.0)]
    functions = [
        ("cardinality_cap", cardinality_cap_oracle(5, 2)),
        ("graph_cut", graph_cut_oracle(5, edges)),
        ("modular", modular_oracle([1.0, 3.0, 2.0, 5.0, 4.0])),
    ]
    rng = np.random.default_rng(0)
    ok = True
    for name, oracle in functions:
        for _ in range(50):
            w = rng.standard_normal(5)
            greedy_val = float(w @ base_polytope_greedy(oracle, w))
            best = -np.inf
            for order in itertools.permutations(range(5)):
                v = np.zeros(5)
                prefix = set()
                prev = 0.0
                for j in order:
                    prefix.add(j)
                    cur = oracle(frozenset(prefix))
                    v[j] = cur - prev
                    prev = cur
                best = max(best, float(w @ v))
            ok = ok and greedy_val == best
    verdict(7, "greedy base-polytope oracle", ok, "(3 functions x 50 draws, exact)")


def test_criterion_08_pyramidal_width_closed_forms():
    ok = True
    details = []
    for n in (2, 3):
        verts = np.array(list(itertools.product((0.0, 1.0), repeat=n)))
        pw = pyramidal_width_bruteforce(verts)
        ok = ok and abs(pw - 1.0 / np.sqrt(n)) <= 1e-9
        details.append("cube%d" % n)
    for n in range(2, 8):
        pw = pyramidal_width_bruteforce(np.eye(n))
        expect = 2.0 / np.sqrt(n) if n % 2 == 0 else 2.0 / np.sqrt(n - 1.0 / n)
        ok = ok and abs(pw - expect) <= 1e-9
        details.append("simplex%d" % n)
    verdict(8, "pyramidal width closed forms", ok, "(%s)" % " ".join(details))


def test_criterion_09_affine_invariance():
    inst = build_instance("boundary_quadratic", n=6, support=3, seed=7)
    rng = np.random.default_rng(99)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    p = q @ np.diag(np.linspace(0.7, 1.5, 6)) @ q.T
    deviations = affine_invariance_harness(inst, p, iters=200, seed=5)
    worst = max(deviations.values())
    ok = worst <= 1e-9
    verdict(9, "affine invariance", ok,
            "(worst %.2e over %s)" % (worst, ",".join(deviations)))


def test_criterion_10_inexact_oracle_rate():
    inst = build_instance("simplex_distance", n=20)
    schedule = InexactSchedule("decaying", delta=1.0,
                               kappa_upper=inst.curvature_upper, seed=0)
    oracle = make_inexact_lmo(inst.region, schedule)
    report = solve(inst, SolverConfig(variant="FW", stepsize=Diminishing(),
                                      max_iter=1000, gap_tol=1e-300, seed=0),
                   inexact=oracle)
    res = inexact_rate_check(report)
    verdict(10, "inexact oracle rate", res.ok, "(margin %.2e)" % res.margin)


def test_criterion_11_block_coordinate_expected_rate():
    inst = build_instance("product", b=3, n=4)
    m = 3
    kappa = sum(l * d * d for l, d in zip(inst.meta["block_L"], inst.meta["block_D"]))
    traces = []
    for seed in range(50):
        report = solve(inst, SolverConfig(variant="BCFW", stepsize=Diminishing(),
                                          max_iter=1000, gap_tol=1e-300, seed=seed))
        traces.append(report.primal_gaps())
    length = min(len(t) for t in traces)
    mean_h = np.mean([t[:length] for t in traces], axis=0)
    big_k = float(np.mean([t[0] for t in traces])) + kappa
    ks = np.arange(length)
    bound = 2.0 * big_k * m / (ks + 2.0 * m)
    worst = float(np.max(mean_h[1:] / bound[1:]))
    ok = bool(np.all(mean_h[1:] <= bound[1:] + 1e-9))
    verdict(11, "block coordinate rate", ok, "(worst ratio %.3f over 50 seeds)" % worst)


def test_criterion_12_support_identification():
    inst = build_instance("boundary_quadratic", n=8, support=3, seed=21)
    _, g_star = inst.objective.eval(inst.x_star)
    lam = simplex_multipliers(inst.x_star, g_star)
    i_star = frozenset(int(i) for i in np.flatnonzero(lam <= 1e-10))
    positive = lam[lam > 1e-10]
    strict = positive.size == 8 - len(i_star) and np.all(positive > 1e-3)
    gap_at_opt = fw_gap(inst.region, inst.x_star, g_star)
    report = solve(inst, SolverConfig(variant="AFW", stepsize=ExactLine(),
                                      max_iter=600, gap_tol=1e-12, seed=0))
    k_id = support_identification(report, i_star)
    ok = strict and k_id is not None and gap_at_opt <= 1e-8
    verdict(12, "support identification", ok,
            "(identified at k=%s, G(x*)=%.1e)" % (k_id, gap_at_opt))


def test_criterion_13_per_step_guarantees(crit1_runs, crit2_runs, crit4_run,
                                          crit5_runs):
    reports = [crit1_runs[0], crit1_runs[1]]
    reports += list(crit2_runs.values())
    reports.append(crit4_run[1])
    reports += list(crit5_runs.values())
    ok = True
    audited = 0
    worst = np.inf
    for report in reports:
        res = per_step_guarantees(report)
        ok = ok and res.ok
        audited += len(report.records) - 1
        worst = min(worst, res.margin)
    verdict(13, "per-step guarantees", ok,
            "(%d steps audited, worst margin %.1e)" % (audited, worst))
