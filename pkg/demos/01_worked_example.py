"""From a common-author count to a matching probability, and back.

Two author lists of 1000 and 10000 people share 100 names.  How likely is
any single comparison between them to match?
"""

from authornet import estimate_p, expected_matches
from authornet.montecarlo import McConfig, exact_expected_matches, mc_expected_matches

n, m, k = 1000, 10_000, 100

p = estimate_p(k, n, m)
print(f"matching probability behind {k} shared names: p = {p:.4g}")

# The forward formula gives back k exactly when p is not rounded.
print(f"expected matches at that p: {expected_matches(n, m, p):.6f}")

# Rounded to three figures, the forward formula lands a little above 100.
print(f"expected matches at p = 1.05e-5: {expected_matches(n, m, 1.05e-5):.3f}")

# The formula treats every comparison as independent.  The real process
# removes a matched author from the large list, which lowers the count a bit.
res = mc_expected_matches(McConfig(n, m, 1.05e-5, trials=200_000, seed=1))
print(f"simulated sequential process: {res.mean_matches:.3f} +/- {res.std_error:.3f}")
print(f"exact recursion for the same process: {exact_expected_matches(n, m, 1.05e-5):.3f}")
print(f"approximation error: {res.relative_error:.2%}")
