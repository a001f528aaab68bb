# python3
"""
Geometry constants and trace diagnostics
========================================

The pyramidal width of a vertex set controls the linear rate of the
active-set variants.  The brute-force evaluator enumerates faces and
measures hull-to-hull distances with the min-norm-point engine; on unit
cubes and simplex vertex sets it reproduces the known closed forms.  The
second half runs the trace checks that gate the benchmark harness.
"""
import itertools
import json

import numpy as np

import fwkit as fw

print("pyramidal widths")
for n in (2, 3):
    verts = np.array(list(itertools.product((0.0, 1.0), repeat=n)))
    pw = fw.pyramidal_width_bruteforce(verts)
    print("  {0,1}^%d: computed %.9f, closed form %.9f" % (n, pw, 1 / np.sqrt(n)))
for n in (2, 3, 4, 5):
    pw = fw.pyramidal_width_bruteforce(np.eye(n))
    closed = 2 / np.sqrt(n) if n % 2 == 0 else 2 / np.sqrt(n - 1.0 / n)
    print("  simplex e_1..e_%d: computed %.9f, closed form %.9f" % (n, pw, closed))

print("\ntrace checks on a fresh run")
inst = fw.build_instance("simplex_distance", n=25)
config = fw.SolverConfig(variant="FW", stepsize=fw.LipschitzDep(inst.L),
                         max_iter=3000, gap_tol=1e-12, seed=0)
report = fw.solve(inst, config)
for result in (fw.verify_sublinear_bound(report),
               fw.lower_bound_check(report, 25),
               fw.per_step_guarantees(report),
               fw.min_gap_rate_check(report)):
    print(" ", json.dumps(result.as_json()))
