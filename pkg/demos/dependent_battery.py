"""Named inequalities for dependent sequences, checked by simulation.

A bound counts as violated only if the lower end of its 99% bootstrap band
lies above it.

    python demos/dependent_battery.py
"""

from maxineq import ProcessModel, generate
from maxineq.inequality_verifier import (
    check_chandra_ghosal,
    check_christofides,
    check_kounias_weng,
    check_kuczmaszewska_4th,
    check_shao_na,
)

SEED = 20240601
P, n = 4000, 500


def show(title, recs):
    print(title)
    for r in recs:
        lo, hi = r.statistic.ci
        extra = f" eps={r.params['epsilon']:.3g}" if "epsilon" in r.params else ""
        print(f"  {r.check:26s}{extra:14s} est={r.statistic.estimate:.4g} [{lo:.4g}, {hi:.4g}]"
              f"  bound={r.bound_value:.4g}  {r.verdict}")


na = generate(ProcessModel.na_gaussian(n, c=0.5), P, SEED)
show("Negatively associated Gaussian", check_shao_na(na, 2.0) + check_shao_na(na, 3.0))

# this fourth-moment bound already fails for two independent N(0, 1) terms:
# E S_2^4 = 12 while the right side is 3 + 3 + 2 = 8
show("Fourth-moment NA bound (known to be too small)", check_kuczmaszewska_4th(na))

aana = generate(ProcessModel.aana(n), P, SEED)
show("AANA with q_l = 1/l", check_chandra_ghosal(aana, epsilons=[120, 160, 220]))

demi = generate(ProcessModel.demimartingale(n), P, SEED)
show("Demimartingale", check_christofides(demi, epsilons=[150, 300, 600]))

# fully dependent copies X_l = X_1: nothing to exploit, the bound still holds
copies = generate(ProcessModel.copies(n), P, SEED)
show("Kounias-Weng on identical copies", check_kounias_weng(copies, 2.0, epsilons=[100, 300, 600]))
