"""
Survey of the reference polygons
================================

Runs the core checks on every reference polygon, with and without a nut, and
prints one line per chart.
"""

import time

import numpy as np

from sfk import action_coords, classify, corpus, hessian, invert_many, make_chart
from sfk.analysis import asymptotic_V, curvature_report, ricci_classify

rng = np.random.default_rng(0)
print(f"{'polygon':10s} {'nu':>14s} {'class':36s} {'max|s|':>9s} {'det err':>9s} "
      f"{'ricci':>6s} {'V model':>8s} {'time':>6s}")
for entry in corpus.corpus():
    for nu in entry.nuts:
        t0 = time.perf_counter()
        c = make_chart(entry.polygon, nu)
        curv = curvature_report(c)
        H = c.center + c.scale * rng.uniform(-2, 2, 200)
        r = c.scale * np.exp(rng.uniform(-2, 2, 200))
        X = action_coords(c, H, r)
        H2, r2 = invert_many(c, X)
        det_err = np.abs(hessian(c, H2, r2)[2] * r2 ** 2 - 1).max()
        flat = ricci_classify(entry.polygon, nu).ricci_flat
        av = asymptotic_V(c)
        label = "-" if nu is None else f"({nu[0]:.2f},{nu[1]:.2f})"
        print(f"{entry.name:10s} {label:>14s} {classify(entry.polygon).describe():36s} "
              f"{curv.max_abs_s:9.1e} {det_err:9.1e} {str(flat):>6s} "
              f"{'ok' if av.passed else 'O(1/rho)':>8s} {time.perf_counter() - t0:5.2f}s")
