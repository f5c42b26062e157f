"""Where does the closed-form match estimate stop being accurate?

A grid of list sizes and probabilities is simulated until the standard
error is under 1% of the mean; each cell is also compared with the exact
recursion when it is small enough to evaluate.
"""

from authornet.montecarlo import validate_grid

sizes = [10, 100, 1_000, 10_000, 100_000]
probabilities = [1e-7, 1e-6, 1e-5, 1e-4]

report = validate_grid(sizes, sizes, probabilities, target_rel_stderr=0.01, seed=0)

print(f"{'n':>7} {'m':>7} {'p':>7} {'formula':>10} {'simulated':>10} {'error':>7}")
for c in sorted(report.cells, key=lambda c: -(c.rel_err_mc or 0))[:10]:
    print(f"{c.n:>7} {c.m:>7} {c.p:>7.0e} {c.analytic:>10.4g} {c.mc_mean:>10.4g} {c.rel_err_mc:>7.2%}")

summary = report.summary()
print(f"\nworst error over {summary['cells']} cells: {summary['max_rel_err_mc']:.2%}")

# The formula ignores that matched authors leave the larger list.  That only
# matters once the expected matches use up a real share of that list, which
# happens when the two lists have similar sizes and p*m is near 1.
unequal = [c for c in report.cells if c.n * 10 <= c.m]
print(f"worst error where n <= m/10: {max(c.rel_err_mc for c in unequal):.2%}")
