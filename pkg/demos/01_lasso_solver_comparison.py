# python3
"""
Sparse regression on the l1 ball
================================

Classic conditional-gradient use case: minimize ||Ax - b||^2 subject to
||x||_1 <= tau.  The oracle touches one coordinate per iteration, so the
iterate after k steps has at most k + 1 nonzeros.  We compare the plain
method against the away-step and pairwise variants and watch both the
objective gap and the support size.
"""
import numpy as np

import fwkit as fw

inst = fw.build_instance("lasso", m=40, n=120, tau=1.0, seed=3)
f_star, _ = fw.reference_f_star(inst, gap_tol=1e-12, max_iter=50000)
inst.f_star = f_star
print("reference optimum  f* = %.10f" % f_star)

reports = {}
for variant in ("FW", "AFW", "PFW"):
    rule = fw.LipschitzDep(inst.L) if variant == "FW" else fw.ExactLine()
    config = fw.SolverConfig(variant=variant, stepsize=rule,
                             max_iter=2000, gap_tol=1e-10, seed=0)
    reports[variant] = fw.solve(inst, config)

print("\n%-6s %10s %12s %12s %9s" % ("solver", "iters", "final gap", "final h", "support"))
for variant, rep in reports.items():
    last = rep.records[-1]
    print("%-6s %10d %12.2e %12.2e %9d"
          % (variant, last.k, last.gap, last.f - f_star, last.support_size))

print("\nfitted geometric factor over good steps:")
for variant, rep in reports.items():
    try:
        fit = fw.fit_geometric_rate(rep, good_only=True)
        print("  %-4s q = %.4f (r2 = %.3f)" % (variant, fit.q, fit.r2))
    except fw.InputError as exc:
        print("  %-4s no fit: %s" % (variant, exc))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for variant, rep in reports.items():
        hs = rep.primal_gaps()
        ax.semilogy([r.k for r in rep.records], np.maximum(hs, 1e-16), label=variant)
    ax.set_xlabel("iteration")
    ax.set_ylabel("primal gap")
    ax.legend()
    ax.grid(True)
    fig.tight_layout()
    fig.savefig("lasso_comparison.png", dpi=120)
    print("\nwrote lasso_comparison.png")
except ImportError:
    pass
