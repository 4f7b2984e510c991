"""Maximal inequalities on exactly enumerated sign paths.

Every left-hand side below is computed from all 2**n equiprobable paths, so
the comparisons are exact rather than statistical.

    python demos/exact_oracle_tour.py
"""

import numpy as np

from maxineq import constant_transfer
from maxineq.inequality_verifier import (RademacherEnumeration, check_hajek_renyi, check_kolmogorov,
                                         transfer_trial)
from maxineq.process_models import theoretical_bound
from maxineq.sequence_calculus import NormalizerSequence

n = 12
enum = RademacherEnumeration(n)
scheme = theoretical_bound(enum.model, 2)

print(f"Kolmogorov: P(max |S_l| >= eps) <= n / eps^2 with n = {n}")
for rec in check_kolmogorov(enum, scheme, epsilons=[2, 4, 6, 8, 10, 12]):
    eps = rec.params["epsilon"]
    print(f"  eps={eps:5.1f}  exact={rec.statistic.estimate:.4f}  bound={rec.bound_value:.4f}  {rec.verdict}")

# weighted version with b_l = l + 4 and the transferred constant C = 4K
b = NormalizerSequence.explicit(np.arange(1, n + 1) + 4.0)
print("\nHajek-Renyi with b_l = l + 4, C =", constant_transfer(1.0, 2.0, "prob1"))
for rec in check_hajek_renyi(enum, scheme, b, epsilons=[0.2, 0.3, 0.4, 0.5]):
    eps = rec.params["epsilon"]
    print(f"  eps={eps:5.2f}  exact={rec.statistic.estimate:.4f}  bound={rec.bound_value:.4f}  margin={rec.margin:.1f}")

# how much slack do the transferred constants leave?
gen = np.random.default_rng(1)
alpha = gen.uniform(0.5, 2.0, n)
norm = np.cumsum(gen.uniform(0.1, 1.0, n)) + 1.0
t = transfer_trial(enum, alpha, norm, 2.0)
print("\nRandom weights alpha_l and normalizer b_l; smallest constants valid for every eps:")
print(f"  Kolmogorov K = {t.K_first:.4f}   first Hajek-Renyi C = {t.C_first:.4f} (allowed {4 * t.K_first:.4f})")
print(f"  second-kind K = {t.K_second:.4f}  two-segment C = {t.C_second:.4f} "
      f"(allowed {constant_transfer(t.K_second, 2.0, 'prob2'):.4f})")
