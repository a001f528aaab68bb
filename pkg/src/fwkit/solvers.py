"""Frank-Wolfe solver family.

One driver per variant: classic FW, away-step (AFW), pairwise (PFW),
in-face (FDFW), fully corrective (EFW), block coordinate (BCFW), and
Wolfe's min-norm-point method (see ``minnorm``).  Every run produces a
``SolveReport`` with a per-iteration trace: objective, FW gap, step kind
and size, support size, and good-step classification.

A record at index k describes the state x_k plus the step taken from it;
the final record marks the stopping state with kind "stop" and alpha 0.
The initial point is always the oracle's vertex at a seeded random
gradient, so sparsity bounds hold from the start.
"""

import copy
import time
from dataclasses import dataclass, field

import numpy as np

from . import regions as rg
from .atoms import ActiveSet, SignedUnitAtom, StepDescriptor, apply_step, \
    away_step_cap, reconstruct_point, select_away_vertex
from .errors import CapabilityError, InputError, NumericalError
from .objectives import compose_with_atoms
from .stepsizes import BlockDiminishing, Diminishing, compute_step

_POLYTOPAL = (rg.Simplex, rg.L1Ball, rg.Box, rg.LinfBall, rg.BasePolytope,
              rg.VertexHull)


def _is_polytopal(region):
    if isinstance(region, _POLYTOPAL):
        return True
    if isinstance(region, rg.ProductRegion):
        return all(_is_polytopal(b) for b in region.blocks)
    return False


@dataclass
class SolverConfig:
    variant: str = "FW"
    stepsize: object = None
    max_iter: int = 1000
    gap_tol: float = 1e-8
    seed: int = 0
    efw_inner_tol: float = 1e-10
    record_every: int = 1
    store_points: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise InputError("max_iter must be >= 1")
        if not self.gap_tol > 0:
            raise InputError("gap_tol must be positive")
        if self.record_every < 1:
            raise InputError("record_every must be >= 1")
        if self.stepsize is None:
            self.stepsize = Diminishing()


@dataclass
class IterationRecord:
    k: int
    kind: str
    alpha: float
    f: float
    gap: float
    support_size: int
    elapsed_ns: int
    dg: float = 0.0        # <grad, direction> of the step taken at k
    dnorm: float = 0.0     # ||direction||
    alpha_max: float = 0.0
    good: bool = False
    support: object = None  # frozenset of coordinates, when cheap to store
    x: object = None        # iterate copy, only when store_points is set


@dataclass
class SolveReport:
    records: list
    active_set: object
    termination: str
    good_steps: int
    meta: dict = field(default_factory=dict)

    @property
    def x_final(self):
        return self.meta.get("x_final")

    def primal_gaps(self):
        """h_k = f(x_k) - f* for every record; needs f_star in meta."""
        f_star = self.meta.get("f_star")
        if f_star is None:
            raise InputError("report has no f_star")
        return np.array([r.f - f_star for r in self.records])


def _support_set(x, tol=1e-12):
    if x.ndim != 1 or x.size > 4096:
        return None
    return frozenset(int(i) for i in np.flatnonzero(np.abs(x) > tol))


class _Tracer:
    """Collects records and termination bookkeeping for one run."""

    def __init__(self, config):
        self.config = config
        self.records = []
        self.good_steps = 0
        self.t0 = time.perf_counter_ns()

    def make(self, k, f, gap, support_size, x, support=None):
        return IterationRecord(
            k=k, kind="stop", alpha=0.0, f=float(f), gap=float(gap),
            support_size=int(support_size),
            elapsed_ns=time.perf_counter_ns() - self.t0,
            support=support if support is not None else _support_set(x),
            x=x.copy() if self.config.store_points else None)

    def push(self, rec, terminal=False):
        if terminal or rec.k % self.config.record_every == 0:
            self.records.append(rec)

    def mark_step(self, rec, kind, alpha, dg, dnorm, alpha_max):
        rec.kind = kind
        rec.alpha = float(alpha)
        rec.dg = float(dg)
        rec.dnorm = float(dnorm)
        rec.alpha_max = float(alpha_max)
        if kind == "FW":
            rec.good = alpha >= 1.0 or alpha < alpha_max
        elif kind in ("FullCorrective",) or kind.startswith("Block"):
            rec.good = True
        else:
            rec.good = alpha < alpha_max
        if rec.good:
            self.good_steps += 1


def _base_meta(instance, config):
    return {
        "family": instance.family,
        "f_star": instance.f_star,
        "L": instance.L,
        "mu": instance.mu,
        "D": instance.D,
        "variant": config.variant,
        "stepsize": config.stepsize.name,
        "seed": config.seed,
        "gap_tol": config.gap_tol,
        "max_iter": config.max_iter,
        **instance.meta,
    }


def _initial_atom(region, rng):
    g0 = rng.standard_normal(region.shape)
    return region.lmo(g0)


def solve(instance, config, inexact=None, initial_active=None):
    """Run the solver selected by ``config.variant`` on a problem instance."""
    variant = config.variant
    if variant == "FW":
        return _run_atomic(instance, config, away=False, pairwise=False,
                           inexact=inexact, initial_active=initial_active)
    if variant == "AFW":
        return _run_atomic(instance, config, away=True, pairwise=False,
                           inexact=inexact, initial_active=initial_active)
    if variant == "PFW":
        return _run_atomic(instance, config, away=True, pairwise=True,
                           inexact=inexact, initial_active=initial_active)
    if variant == "FDFW":
        return solve_fdfw(instance, config)
    if variant == "EFW":
        return solve_efw(instance, config, initial_active=initial_active)
    if variant == "BCFW":
        return solve_bcfw(instance, config)
    if variant == "WolfeMNP":
        from .minnorm import solve_wolfe_mnp

        if not isinstance(instance.region, rg.VertexHull):
            raise CapabilityError("WolfeMNP needs an explicit vertex list")
        return solve_wolfe_mnp(instance.region.points, config)
    raise InputError("unknown solver variant %r" % variant)


def solve_fw(instance, config, inexact=None):
    return _run_atomic(instance, config, away=False, pairwise=False, inexact=inexact)


def solve_afw(instance, config, initial_active=None):
    return _run_atomic(instance, config, away=True, pairwise=False,
                       initial_active=initial_active)


def solve_pfw(instance, config):
    return _run_atomic(instance, config, away=True, pairwise=True)


def _run_atomic(instance, config, away, pairwise, inexact=None, initial_active=None):
    """Shared driver for FW / AFW / PFW over an atom-tracking active set."""
    obj, region = instance.objective, instance.region
    if away and not _is_polytopal(region):
        raise CapabilityError("away/pairwise variants need a polytopal region")
    rule = copy.deepcopy(config.stepsize)
    rng = np.random.default_rng(config.seed)
    if initial_active is not None:
        active = initial_active.copy()
        x = reconstruct_point(active)
    else:
        atom = _initial_atom(region, rng)
        active = ActiveSet.from_atom(atom)
        x = atom.densify().copy()
    tracer = _Tracer(config)
    termination = "MaxIter"
    k = 0
    try:
        while True:
            f, g = obj.eval(x)
            if inexact is not None:
                exact_atom, s_atom = inexact.query(g, x)
            else:
                exact_atom = s_atom = region.lmo(g)
            s = exact_atom.densify()
            gap = float(np.vdot(g, x) - np.vdot(g, s))
            rec = tracer.make(k, f, gap, len(active), x)
            if gap <= config.gap_tol:
                termination = "GapTol"
                tracer.push(rec, terminal=True)
                break
            if k >= config.max_iter:
                termination = "MaxIter"
                tracer.push(rec, terminal=True)
                break
            if s_atom is not exact_atom:
                s_used = s_atom.densify()
            else:
                s_used = s
            d_fw = s_used - x
            dg_fw = float(np.vdot(g, d_fw))
            kind = "FW"
            if away:
                v_atom, w_v, _ = select_away_vertex(active, g)
                d_aw = x - v_atom.densify()
                dg_aw = float(np.vdot(g, d_aw))
                if pairwise:
                    kind = "Pairwise"
                    d = s_used - v_atom.densify()
                    dg = float(np.vdot(g, d))
                    alpha_max = float(w_v)
                    step = StepDescriptor("Pairwise", toward=s_atom, away=v_atom)
                elif -dg_aw > -dg_fw and w_v < 1.0:
                    kind = "Away"
                    d = d_aw
                    dg = dg_aw
                    alpha_max = away_step_cap(w_v)
                    step = StepDescriptor("Away", away=v_atom)
                else:
                    d = d_fw
                    dg = dg_fw
                    alpha_max = 1.0
                    step = StepDescriptor("FW", toward=s_atom)
            else:
                d = d_fw
                dg = dg_fw
                alpha_max = 1.0
                step = StepDescriptor("FW", toward=s_atom)
            if not np.any(d) or (inexact is not None and dg >= 0.0):
                if inexact is not None:
                    # the degraded oracle may stall an iteration; the error
                    # budget shrinks with k, so progress resumes on its own
                    rec.kind = kind
                    rec.dg = float(dg)
                    rec.dnorm = float(np.linalg.norm(d.ravel()))
                    rec.alpha_max = float(alpha_max)
                    tracer.push(rec)
                    k += 1
                    continue
                # stationary over the current atoms; the gap check above governs
                termination = "GapTol" if gap <= 10.0 * config.gap_tol else "NumericalError"
                tracer.push(rec, terminal=True)
                break
            alpha = compute_step(rule, k, obj, x, g, d, alpha_max)
            if alpha <= 0.0:
                termination = "NumericalError"
                tracer.push(rec, terminal=True)
                break
            apply_step(active, step, alpha)
            if kind == "FW" and alpha >= 1.0:
                x = s_used.copy()
            else:
                x = x + alpha * d
            recorded_kind = kind
            if kind in ("Away", "Pairwise") and alpha >= alpha_max:
                recorded_kind = "Drop"
            tracer.mark_step(rec, recorded_kind, alpha, dg, np.linalg.norm(d.ravel()),
                             alpha_max)
            tracer.push(rec)
            k += 1
    except NumericalError:
        termination = "NumericalError"
    meta = _base_meta(instance, config)
    meta["x_final"] = x
    if inexact is not None:
        meta["inexact_mode"] = inexact.schedule.mode
        meta["inexact_delta"] = inexact.schedule.delta
        meta["inexact_kappa"] = inexact.schedule.kappa_upper
    return SolveReport(tracer.records, active, termination, tracer.good_steps, meta)


def solve_fdfw(instance, config):
    """In-face variant: away candidates come from the minimal face of x."""
    obj, region = instance.objective, instance.region
    if not isinstance(region, (rg.Simplex, rg.Box)):
        raise CapabilityError("FDFW is restricted to simplex and box regions")
    rule = copy.deepcopy(config.stepsize)
    rng = np.random.default_rng(config.seed)
    atom = _initial_atom(region, rng)
    x = atom.densify().copy()
    tracer = _Tracer(config)
    termination = "MaxIter"
    k = 0

    def support_size(pt):
        if isinstance(region, rg.Simplex):
            return int(np.sum(pt > 1e-12))
        free = (pt > region.lower + 1e-12) & (pt < region.upper - 1e-12)
        return int(np.sum(free)) + 1

    try:
        while True:
            f, g = obj.eval(x)
            s_atom = region.lmo(g)
            s = s_atom.densify()
            gap = float(np.vdot(g, x - s))
            rec = tracer.make(k, f, gap, support_size(x), x)
            if gap <= config.gap_tol:
                termination = "GapTol"
                tracer.push(rec, terminal=True)
                break
            if k >= config.max_iter:
                termination = "MaxIter"
                tracer.push(rec, terminal=True)
                break
            d_fw = s - x
            dg_fw = float(np.vdot(g, d_fw))
            v = rg.face_away_vertex(region, x, g).densify()
            d_aw = x - v
            dg_aw = float(np.vdot(g, d_aw))
            if -dg_aw > -dg_fw and np.any(d_aw):
                kind = "InFace"
                d = d_aw
                dg = dg_aw
                alpha_max = region.max_step(x, d)
            else:
                kind = "FW"
                d = d_fw
                dg = dg_fw
                alpha_max = 1.0
            if alpha_max <= 0.0 or not np.any(d):
                termination = "GapTol" if gap <= 10.0 * config.gap_tol else "NumericalError"
                tracer.push(rec, terminal=True)
                break
            alpha = compute_step(rule, k, obj, x, g, d, alpha_max)
            if alpha <= 0.0:
                termination = "NumericalError"
                tracer.push(rec, terminal=True)
                break
            if kind == "FW" and alpha >= 1.0:
                x = s.copy()
            else:
                x = x + alpha * d
            # snap coordinates that numerically reached a face
            if isinstance(region, rg.Simplex):
                x[np.abs(x) <= 1e-12] = 0.0
                x = np.maximum(x, 0.0)
                x /= x.sum()
            else:
                x = np.where(np.abs(x - region.lower) <= 1e-12, region.lower, x)
                x = np.where(np.abs(x - region.upper) <= 1e-12, region.upper, x)
            recorded_kind = kind
            if kind == "InFace" and alpha >= alpha_max:
                recorded_kind = "Drop"
            tracer.mark_step(rec, recorded_kind, alpha, dg, np.linalg.norm(d), alpha_max)
            tracer.push(rec)
            k += 1
    except NumericalError:
        termination = "NumericalError"
    meta = _base_meta(instance, config)
    meta["x_final"] = x
    return SolveReport(tracer.records, None, termination, tracer.good_steps, meta)


def solve_efw(instance, config, initial_active=None):
    """Fully corrective variant: reoptimize over the active atoms each round."""
    obj, region = instance.objective, instance.region
    if not _is_polytopal(region):
        raise CapabilityError("EFW needs a polytopal region")
    rng = np.random.default_rng(config.seed)
    if initial_active is not None:
        active = initial_active.copy()
        x = reconstruct_point(active)
    else:
        atom = _initial_atom(region, rng)
        active = ActiveSet.from_atom(atom)
        x = atom.densify().copy()
    tracer = _Tracer(config)
    termination = "MaxIter"
    k = 0
    try:
        while True:
            f, g = obj.eval(x)
            s_atom = region.lmo(g)
            s = s_atom.densify()
            gap = float(np.vdot(g, x) - np.vdot(g, s))
            rec = tracer.make(k, f, gap, len(active), x)
            if gap <= config.gap_tol:
                termination = "GapTol"
                tracer.push(rec, terminal=True)
                break
            if k >= config.max_iter:
                termination = "MaxIter"
                tracer.push(rec, terminal=True)
                break
            if active.find(s_atom) is None:
                active._append(s_atom, 0.0)
            lam = _correction_weights(obj, active, config)
            active.weights = lam
            active._prune_and_renormalize()
            x_new = reconstruct_point(active)
            d = x_new - x
            dg = float(np.vdot(g, d))
            tracer.mark_step(rec, "FullCorrective", 1.0, dg, np.linalg.norm(d.ravel()), 1.0)
            tracer.push(rec)
            x = x_new
            k += 1
    except NumericalError:
        termination = "NumericalError"
    meta = _base_meta(instance, config)
    meta["x_final"] = x
    return SolveReport(tracer.records, active, termination, tracer.good_steps, meta)


def _correction_weights(obj, active, config):
    """Approximately minimize f over conv(active atoms) via an inner AFW.

    The inner tolerance couples to the outer stopping tolerance so a hull
    containing the optimum is corrected to it in a single round.
    """
    from .objectives import ProblemInstance
    from .stepsizes import ExactLine

    m = len(active)
    inner_obj = compose_with_atoms(obj, active.atoms)
    inner_region = rg.Simplex(m)
    atoms = []
    weights = []
    for i, w in enumerate(active.weights):
        if w > 0.0:
            atoms.append(SignedUnitAtom(i, +1, 1.0, m))
            weights.append(w)
    weights = np.asarray(weights)
    inner_active = ActiveSet(atoms, weights / weights.sum())
    inner_instance = ProblemInstance(inner_obj, inner_region, L=1.0, mu=0.0,
                                     D=inner_region.diameter(), family="efw_inner")
    inner_config = SolverConfig(
        variant="AFW", stepsize=ExactLine(),
        max_iter=max(200, 40 * m),
        gap_tol=max(config.efw_inner_tol, 0.1 * config.gap_tol),
        seed=config.seed, record_every=10 ** 9)
    report = _run_atomic(inner_instance, inner_config, away=True, pairwise=False,
                         initial_active=inner_active)
    if report.termination == "NumericalError":
        raise NumericalError("inner correction solve failed")
    lam = report.meta["x_final"]
    return np.maximum(lam, 0.0)


def solve_bcfw(instance, config):
    """Block coordinate FW: a uniformly random block takes a FW step each round."""
    obj, region = instance.objective, instance.region
    if not isinstance(region, rg.ProductRegion):
        raise CapabilityError("BCFW needs a product region")
    m = len(region.blocks)
    rule = config.stepsize if config.stepsize.name != "diminishing" else None
    if rule is None:
        rule = BlockDiminishing(m=m)
    else:
        rule = copy.deepcopy(rule)
        if rule.name == "block_diminishing":
            rule.m = m
    rng = np.random.default_rng(config.seed)
    parts = []
    for i, b in enumerate(region.blocks):
        g0 = rng.standard_normal(b.shape)
        parts.append(b.lmo(g0).densify())
    x = np.concatenate(parts)
    tracer = _Tracer(config)
    termination = "MaxIter"
    k = 0
    try:
        while True:
            f, g = obj.eval(x)
            block_atoms = []
            gap = 0.0
            for i, b in enumerate(region.blocks):
                sl = region.block_slice(i)
                a = b.lmo(g[sl])
                block_atoms.append(a)
                gap += float(g[sl] @ x[sl] - g[sl] @ a.densify())
            rec = tracer.make(k, f, gap, int(np.sum(np.abs(x) > 1e-12)), x)
            if gap <= config.gap_tol:
                termination = "GapTol"
                tracer.push(rec, terminal=True)
                break
            if k >= config.max_iter:
                termination = "MaxIter"
                tracer.push(rec, terminal=True)
                break
            i = int(rng.integers(m))
            sl = region.block_slice(i)
            d_bl = block_atoms[i].densify() - x[sl]
            dg = float(g[sl] @ d_bl)
            if not np.any(d_bl) or dg >= 0.0:
                alpha = 0.0
            else:
                d_full = np.zeros_like(x)
                d_full[sl] = d_bl
                alpha = compute_step(rule, k, obj, x, g, d_full, 1.0)
            if alpha > 0.0:
                x = x.copy()
                x[sl] = x[sl] + alpha * d_bl
            tracer.mark_step(rec, "Block(%d)" % i, alpha, dg,
                             np.linalg.norm(d_bl), 1.0)
            tracer.push(rec)
            k += 1
    except NumericalError:
        termination = "NumericalError"
    meta = _base_meta(instance, config)
    meta["x_final"] = x
    meta["blocks"] = m
    return SolveReport(tracer.records, None, termination, tracer.good_steps, meta)


def reference_f_star(instance, gap_tol=1e-12, max_iter=100000, seed=1):
    """Reference optimal value from a long away-step run.

    Convex instances get the certified lower bound max over the trace of
    f(x_k) - G(x_k), which never exceeds f*, with error at most the
    smallest gap reached.  Non-convex instances (where f - G certifies
    nothing) get the best objective value observed instead.
    """
    from .stepsizes import ExactLine

    config = SolverConfig(variant="AFW", stepsize=ExactLine(), max_iter=max_iter,
                          gap_tol=gap_tol, seed=seed, record_every=1)
    report = _run_atomic(instance, config, away=True, pairwise=False)
    if instance.meta.get("convex", True):
        bound = max(r.f - r.gap for r in report.records)
    else:
        bound = min(r.f for r in report.records)
    return bound, report
