"""Wolfe's min-norm-point method over the convex hull of explicit vertices.

Minimizes 1/2 ||x||^2 over conv(vertices) by maintaining a corral: the
major cycle inserts the vertex minimizing <x, v>, the minor cycle jumps to
the least-norm point of the corral's affine hull (normal equations),
clipping the move at the boundary of the convex hull and evicting atoms
whose affine coefficient is nonpositive.  Terminates when
<x, x - s> <= gap_tol for the incoming vertex s.
"""

import time

import numpy as np

from .errors import InputError, NumericalError
from .solvers import IterationRecord, SolveReport

_COEFF_ZERO = 1e-12


def _affine_min_coeffs(points):
    """Coefficients of argmin ||sum_i beta_i p_i|| with sum beta = 1.

    Solves the KKT system of the affine least-norm problem.  Rank-deficient
    corrals go through least squares (any affine representation of the
    unique minimizer works); if the constraint still cannot be met, the
    atom with the largest normal-equation residual is reported for removal
    by returning its index.
    """
    k = points.shape[0]
    gram = points @ points.T
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * gram
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
        residual = kkt @ sol - rhs
        if np.max(np.abs(residual)) <= 1e-8 * max(1.0, np.abs(gram).max()):
            return sol[:k], None
    except np.linalg.LinAlgError:
        pass
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    residual = kkt @ sol - rhs
    if np.max(np.abs(residual)) <= 1e-8 * max(1.0, np.abs(gram).max()):
        return sol[:k], None
    return None, int(np.argmax(np.abs(residual[:k])))


def solve_wolfe_mnp(vertices, config):
    """Min-norm point of conv(vertices); returns a SolveReport.

    The report's ``x_final`` is the minimizer, records track the squared
    norm halved as the objective and <x, x - s> as the gap, one row per
    major cycle.  The total cycle budget is 10 * len(vertices).
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise InputError("vertices must form a nonempty (k, n) array")
    if not np.all(np.isfinite(pts)):
        raise InputError("vertices have non-finite entries")
    if pts.shape[0] > 10 ** 4:
        raise InputError("vertex list too large")
    n_vertices = pts.shape[0]
    cycle_cap = 10 * n_vertices
    start = int(np.argmin(np.linalg.norm(pts, axis=1)))
    corral = [start]
    lam = np.array([1.0])
    x = pts[start].copy()
    records = []
    t0 = time.perf_counter_ns()
    termination = "NumericalError"
    cycles = 0
    majors = 0
    while True:
        scores = pts @ x
        j = int(np.argmin(scores))
        gap = float(x @ x - scores[j])
        records.append(IterationRecord(
            k=majors, kind="FW", alpha=1.0, f=0.5 * float(x @ x), gap=gap,
            support_size=len(corral), elapsed_ns=time.perf_counter_ns() - t0,
            good=True))
        if gap <= config.gap_tol:
            termination = "GapTol"
            records[-1].kind = "stop"
            records[-1].alpha = 0.0
            records[-1].good = False
            break
        if majors >= config.max_iter:
            termination = "MaxIter"
            records[-1].kind = "stop"
            records[-1].alpha = 0.0
            records[-1].good = False
            break
        if j in corral:
            # the oracle re-proposed a corral member: no progress is possible
            termination = "GapTol" if gap <= 100.0 * config.gap_tol else "NumericalError"
            records[-1].kind = "stop"
            records[-1].alpha = 0.0
            records[-1].good = False
            break
        corral.append(j)
        lam = np.append(lam, 0.0)
        majors += 1
        while True:
            cycles += 1
            if cycles > cycle_cap:
                meta = {"x_final": x, "family": "min_norm_point",
                        "variant": "WolfeMNP", "f_star": None}
                return SolveReport(records, None, "NumericalError", majors, meta)
            beta, bad = _affine_min_coeffs(pts[corral])
            if beta is None:
                corral.pop(bad)
                lam = np.delete(lam, bad)
                lam = lam / lam.sum()
                continue
            if np.all(beta > _COEFF_ZERO):
                lam = beta
                x = lam @ pts[corral]
                break
            shrink = beta <= _COEFF_ZERO
            denom = lam[shrink] - beta[shrink]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[shrink] / denom, np.inf)
            theta = float(min(1.0, np.min(ratios)))
            lam = (1.0 - theta) * lam + theta * beta
            lam[lam <= _COEFF_ZERO] = 0.0
            keep = lam > 0.0
            if keep.all():
                # force out the ratio-defining atom despite rounding
                drop_local = np.flatnonzero(shrink)[int(np.argmin(ratios))]
                keep[drop_local] = False
            corral = [c for c, k_ in zip(corral, keep) if k_]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ pts[corral]
    meta = {"x_final": x, "family": "min_norm_point", "variant": "WolfeMNP",
            "f_star": None, "corral": list(corral), "weights": lam.copy()}
    return SolveReport(records, None, termination, majors, meta)


def hull_distance(points_a, points_b, gap_tol=None):
    """Euclidean distance between the convex hulls of two vertex sets.

    Computed as the norm of the min-norm point of the Minkowski difference.
    """
    from .solvers import SolverConfig

    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    diffs = (a[:, None, :] - b[None, :, :]).reshape(-1, a.shape[1])
    scale = max(1.0, float(np.max(np.abs(diffs))) ** 2)
    tol = gap_tol if gap_tol is not None else 1e-14 * scale
    config = SolverConfig(variant="WolfeMNP", max_iter=10 * len(diffs) + 10,
                          gap_tol=tol)
    report = solve_wolfe_mnp(diffs, config)
    return float(np.linalg.norm(report.meta["x_final"]))
