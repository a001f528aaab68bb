"""Convergence diagnostics over solver traces.

Each check inspects a ``SolveReport`` and returns a ``CheckResult`` with a
pass flag, the measured margin (how far from violating), and the first
violating iteration if any.  Rate fits regress log primal gap against the
(good-)step count over the trailing half of the trace.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError

_H_SLACK = 1e-9


@dataclass
class CheckResult:
    check: str
    ok: bool
    margin: float
    k_violation: object = None

    def as_json(self):
        return {"check": self.check, "pass": bool(self.ok),
                "margin": float(self.margin),
                "k_violation": None if self.k_violation is None else int(self.k_violation)}


@dataclass
class RateFit:
    q: float
    r2: float
    window: tuple

    """Fitted per-(good-)step geometric factor and fit quality."""


def _gaps_with_index(report):
    f_star = report.meta.get("f_star")
    if f_star is None:
        raise InputError("check needs a known f_star")
    ks = np.array([r.k for r in report.records])
    hs = np.array([r.f - f_star for r in report.records])
    return ks, hs


def verify_sublinear_bound(report, L=None, D=None, f_star=None):
    """h_k <= 2 L D^2 / (k + 2) for every recorded k >= 1."""
    L = report.meta["L"] if L is None else L
    D = report.meta["D"] if D is None else D
    if f_star is None:
        ks, hs = _gaps_with_index(report)
    else:
        ks = np.array([r.k for r in report.records])
        hs = np.array([r.f - f_star for r in report.records])
    mask = ks >= 1
    bound = 2.0 * L * D ** 2 / (ks[mask] + 2.0) + _H_SLACK
    excess = hs[mask] - bound
    if np.all(excess <= 0.0):
        return CheckResult("sublinear_bound", True, float(-np.max(excess)) if excess.size else np.inf)
    first = int(ks[mask][np.argmax(excess > 0.0)])
    return CheckResult("sublinear_bound", False, float(-np.max(excess)), first)


def fit_geometric_rate(report, good_only=True, f_star=None):
    """Least-squares geometric fit of h over the trailing half of the trace.

    The abscissa is the cumulative good-step count when ``good_only`` is
    set, the iteration index otherwise; the window truncates at the first
    nonpositive gap.
    """
    f_star = report.meta.get("f_star") if f_star is None else f_star
    if f_star is None:
        raise InputError("rate fit needs a known f_star")
    hs = []
    ts = []
    t = 0
    for r in report.records:
        h = r.f - f_star
        if h <= 0.0:
            break
        hs.append(h)
        ts.append(t)
        if good_only:
            t += 1 if r.good else 0
        else:
            t += 1
    if len(hs) < 3:
        raise InputError("trace too short for a rate fit")
    lo = len(hs) // 2
    y = np.log(np.array(hs[lo:]))
    x = np.array(ts[lo:], dtype=float)
    if np.ptp(x) == 0.0:
        raise InputError("no steps of the requested type in the window")
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(q=float(np.exp(slope)), r2=r2, window=(lo, len(hs)))


def simplex_multipliers(x, g):
    """Multiplier functions lambda_i = <g, e_i - x> = g_i - <g, x>."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    return g - float(g @ x)


def active_set_radius(lam, L):
    """Radius delta_min / (delta_min + 2 L) of the support-identification ball."""
    lam = np.asarray(lam, dtype=float)
    positive = lam[lam > 1e-12]
    if positive.size == 0:
        raise InputError("all multipliers vanish; the instance is fully degenerate")
    delta_min = float(np.min(positive))
    return delta_min / (delta_min + 2.0 * float(L))


def support_identification(report, i_star):
    """First recorded k whose support stays inside i_star through the end."""
    i_star = frozenset(int(i) for i in i_star)
    supports = [(r.k, r.support) for r in report.records if r.support is not None]
    if not supports:
        raise InputError("report carries no stored supports")
    hit = None
    for k, supp in supports:
        if supp <= i_star:
            if hit is None:
                hit = k
        else:
            hit = None
    return hit


def lower_bound_check(report, n):
    """Sparsity lower bound h_k >= 1/(k+1) - 1/n on the simplex-distance family."""
    if report.meta.get("family") != "simplex_distance":
        raise InputError("lower bound applies to the simplex distance family")
    ks, hs = _gaps_with_index(report)
    ok = True
    margin = np.inf
    first = None
    for k, h in zip(ks, hs):
        if k > n - 2:
            continue
        bound = 1.0 / (k + 1.0) - 1.0 / n - 1e-12
        margin = min(margin, h - bound)
        if h < bound and first is None:
            ok = False
            first = int(k)
    return CheckResult("lower_bound", ok, float(margin), first)


def inexact_rate_check(report, delta=None, kappa_upper=None):
    """h_k <= 2 kappa (1 + delta) / (k + 2) for decaying-error oracle runs."""
    if report.meta.get("inexact_mode") != "decaying":
        raise InputError("rate bound is only claimed for the decaying schedule")
    delta = report.meta["inexact_delta"] if delta is None else delta
    kappa_upper = report.meta["inexact_kappa"] if kappa_upper is None else kappa_upper
    ks, hs = _gaps_with_index(report)
    mask = ks >= 1
    bound = 2.0 * kappa_upper * (1.0 + delta) / (ks[mask] + 2.0) + _H_SLACK
    excess = hs[mask] - bound
    if np.all(excess <= 0.0):
        return CheckResult("inexact_rate", True, float(-np.max(excess)) if excess.size else np.inf)
    first = int(ks[mask][np.argmax(excess > 0.0)])
    return CheckResult("inexact_rate", False, float(-np.max(excess)), first)


def strongly_convex_domain_check(report):
    """k^2 h_k boundedness on ball instances; geometric rate when the gradient
    is bounded away from zero."""
    if report.meta.get("family") != "ball_quadratic":
        raise InputError("check applies to the ball quadratic family")
    ks, hs = _gaps_with_index(report)
    weighted = ks.astype(float) ** 2 * hs
    head = weighted[(ks >= 1) & (ks <= 20)]
    if head.size == 0:
        raise InputError("trace too short")
    c2 = float(np.max(head))
    tail = weighted[ks > 20]
    ok = bool(np.all(tail <= 2.0 * c2 + _H_SLACK))
    margin = float(2.0 * c2 + _H_SLACK - np.max(tail)) if tail.size else np.inf
    first = None
    if not ok:
        first = int(ks[ks > 20][np.argmax(tail > 2.0 * c2 + _H_SLACK)])
    if ok and report.meta.get("grad_lower_bound", 0.0) > 0.0:
        fit = fit_geometric_rate(report, good_only=True)
        if not fit.q < 1.0:
            return CheckResult("strongly_convex_domain", False, float(1.0 - fit.q))
    return CheckResult("strongly_convex_domain", ok, margin, first)


def min_gap_rate_check(report, kappa_upper=None, slack=0.1):
    """min_{i<=k} G(x_i) <= (9 kappa / 2k) (1 + slack) for diminishing FW."""
    kappa = report.meta["L"] * report.meta["D"] ** 2 if kappa_upper is None else kappa_upper
    ks = np.array([r.k for r in report.records])
    gs = np.array([r.gap for r in report.records])
    running = np.minimum.accumulate(gs)
    mask = ks >= 1
    bound = 9.0 * kappa / (2.0 * ks[mask]) * (1.0 + slack) + _H_SLACK
    excess = running[mask] - bound
    if np.all(excess <= 0.0):
        return CheckResult("min_gap_rate", True, float(-np.max(excess)) if excess.size else np.inf)
    first = int(ks[mask][np.argmax(excess > 0.0)])
    return CheckResult("min_gap_rate", False, float(-np.max(excess)), first)


def nonconvex_min_gap_check(report):
    """Boundedness proxy for min-gap * sqrt(k) on non-convex runs."""
    ks = np.array([r.k for r in report.records])
    gs = np.array([r.gap for r in report.records])
    running = np.minimum.accumulate(gs)
    weighted = running * np.sqrt(np.maximum(ks, 1))
    head = weighted[(ks >= 1) & (ks <= 20)]
    if head.size == 0:
        raise InputError("trace too short")
    c = float(np.max(head))
    tail = weighted[ks > 20]
    ok = bool(np.all(tail <= 2.0 * c + _H_SLACK))
    margin = float(2.0 * c + _H_SLACK - np.max(tail)) if tail.size else np.inf
    return CheckResult("nonconvex_min_gap", ok, margin)


def per_step_guarantees(report, L=None, f_star=None):
    """Per-step decrease and halving guarantees along a Lipschitz-rule trace.

    For consecutive records: a step with alpha < alpha_max must satisfy
    f_next <= f - <g,d>^2 / (2 L ||d||^2); a full FW step (alpha = 1) must
    satisfy h_next <= min(L ||d||^2, h) / 2.  Both with 1e-10 slack.
    Requires a contiguous trace (record_every = 1).
    """
    if report.meta.get("stepsize") != "lipschitz":
        raise InputError("per-step guarantees apply to the Lipschitz rule")
    L = report.meta["L"] if L is None else L
    f_star = report.meta.get("f_star") if f_star is None else f_star
    recs = report.records
    worst = np.inf
    first = None
    for prev, nxt in zip(recs[:-1], recs[1:]):
        if nxt.k != prev.k + 1 or prev.kind == "stop" or prev.alpha <= 0.0:
            continue
        if prev.alpha < prev.alpha_max:
            allowed = prev.f - prev.dg ** 2 / (2.0 * L * prev.dnorm ** 2) + 1e-10
            worst = min(worst, allowed - nxt.f)
            if nxt.f > allowed and first is None:
                first = prev.k
        elif prev.kind == "FW" and prev.alpha == 1.0 and f_star is not None:
            h_prev = prev.f - f_star
            allowed = 0.5 * min(L * prev.dnorm ** 2, h_prev) + 1e-10
            worst = min(worst, allowed - (nxt.f - f_star))
            if nxt.f - f_star > allowed and first is None:
                first = prev.k
    return CheckResult("per_step_guarantees", first is None, float(worst), first)


def affine_invariance_harness(instance, p, variants=("FW", "AFW", "PFW", "EFW"),
                              iters=200, seed=0):
    """Max trajectory deviation ||y_k - P x_k|| under an invertible map P.

    Runs each variant with the diminishing rule on the simplex instance and
    on its image (vertex-hull region P e_i, objective composed with the
    inverse map), starting both at corresponding vertices.  Index-based tie
    breaking makes the trajectories agree up to rounding.
    """
    from .atoms import ActiveSet, DenseAtom, SignedUnitAtom
    from .objectives import ProblemInstance, compose_with_linear
    from .regions import Simplex, VertexHull
    from .solvers import SolverConfig, solve
    from .stepsizes import Diminishing

    region = instance.region
    if not isinstance(region, Simplex):
        raise InputError("the harness maps simplex instances")
    n = region.n
    p = np.asarray(p, dtype=float)
    p_inv = np.linalg.inv(p)
    hull = VertexHull(p.T.copy())  # row j is P e_j
    obj_t = compose_with_linear(instance.objective, p_inv)
    transformed = ProblemInstance(obj_t, hull, instance.L, 0.0, hull.diameter(),
                                  family="affine_image")
    rng = np.random.default_rng(seed)
    j0 = int(np.argmin(rng.standard_normal(n)))
    deviations = {}
    for variant in variants:
        start = ActiveSet.from_atom(SignedUnitAtom(j0, +1, 1.0, n))
        start_t = ActiveSet.from_atom(DenseAtom(p[:, j0].copy()))
        config = SolverConfig(variant=variant, stepsize=Diminishing(),
                              max_iter=iters, gap_tol=1e-300, seed=seed,
                              store_points=True)
        rep = solve(instance, config, initial_active=start)
        rep_t = solve(transformed, config, initial_active=start_t)
        xs = [r.x for r in rep.records]
        ys = [r.x for r in rep_t.records]
        m = min(len(xs), len(ys))
        deviations[variant] = max(
            float(np.linalg.norm(ys[k] - p @ xs[k])) for k in range(m))
    return deviations


def interior_contraction_check(report, rate=None):
    """Good steps must contract h by 1 - (mu/L) (dist/D)^2 (plus 1e-6 slack).

    Applies to interior-optimum runs; ratios are judged only while the
    incoming gap exceeds 1e-13 to stay clear of float cancellation.
    """
    meta = report.meta
    if rate is None:
        dist = meta.get("interior_distance")
        if dist is None:
            raise InputError("report lacks the interior distance")
        rate = 1.0 - (meta["mu"] / meta["L"]) * (dist / meta["D"]) ** 2
    f_star = meta.get("f_star")
    if f_star is None:
        raise InputError("check needs f_star")
    recs = report.records
    worst = np.inf
    first = None
    for prev, nxt in zip(recs[:-1], recs[1:]):
        if nxt.k != prev.k + 1 or prev.kind == "stop" or not prev.good:
            continue
        h_prev = prev.f - f_star
        if h_prev <= 1e-13:
            continue
        ratio = (nxt.f - f_star) / h_prev
        worst = min(worst, rate + 1e-6 - ratio)
        if ratio > rate + 1e-6 and first is None:
            first = prev.k
    return CheckResult("interior_contraction", first is None, float(worst), first)
