"""The percolation probability curve and its closed-form level.

At density p = alpha * n^(-1-1/r) in two dimensions the chance of
percolation tends to 1 - exp(-2 alpha^r / r!): percolation is essentially
the event that some line collects r seeds, and those events are Poisson in
the limit.  A short Monte Carlo run at n = 512 already sits close to the
limit curve.
"""

import math

from lineperc import GridSpec, estimate_theta, lambda_r

n, r = 512, 2
spec = GridSpec.uniform(n, 2, r)
trials = 2000

print(f"theta at p = alpha * n^(-3/2) on [{n}]^2, r={r}, {trials} trials each")
print(f"{'alpha':>6} {'theta_hat':>10} {'95% CI':>18} {'limit':>8}")
for alpha in (0.25, 0.5, 0.8325, 1.0, 1.5, 2.0):
    p = alpha * float(n) ** (-1.0 - 1.0 / r)
    est = estimate_theta(spec, p, trials, master_seed=1000 + int(alpha * 100))
    limit = 1.0 - math.exp(-2.0 * alpha**r / math.factorial(r))
    print(
        f"{alpha:6.4g} {est.point_estimate:10.4f} "
        f"[{est.ci_low:7.4f}, {est.ci_high:7.4f}] {limit:8.4f}"
    )

lam = lambda_r(r)
print(f"\nthe curve crosses 1/2 at alpha = lambda = {lam:.6f} "
      f"(exp(-2*lambda^r/r!) = 1/2)")
print(f"so p_c({n}, r={r}, d=2) ~ {lam * n**-1.5:.3e}")
