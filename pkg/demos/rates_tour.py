"""Strong-law rates as quantile trends over doubling horizons.

    python demos/rates_tour.py
"""

from maxineq import ProcessModel, stream_paths
from maxineq.sequence_calculus import NormalizerSequence, WeightSequence, hu_hu_envelope
from maxineq.slln_harness import log_slln_check, mz_slln_check, rate_envelope_check

SEED = 20240601
n, P = 10**5, 300

iid = stream_paths(ProcessModel.iid(n), P, SEED)
env = hu_hu_envelope(WeightSequence.constant(1.0, 10), NormalizerSequence.power(1.0, 1.0, 10), 2, 0.5, N=n)
rep = rate_envelope_check(iid, env, [12500, 25000, 50000, n])
print("sup_k |S_k| / beta_k, 90% quantile by horizon:", rep.column(0.9).round(4), rep.verdicts)

logou = stream_paths(ProcessModel.log_ou(n, beta=1.0), P, SEED)
rep = log_slln_check(logou, [10**3, 10**4, 10**5])
print("LogOU median |T_n|:", rep.column(0.5).round(4), rep.verdicts)

pareto = stream_paths(ProcessModel.iid(n, {"name": "pareto", "tail_index": 1.8}), P, SEED)
rep = mz_slln_check(pareto, 1.5, [10**3, 10**4, 10**5], kolmogorov_paths=P)
med = rep.column(0.5)
# S_n grows like n^(1/1.8), so |S_n| / n^(2/3) shrinks only like n^(-1/9):
# about a factor 100^(1/9) = 1.67 over this grid
print("Pareto(1.8) median |S_n|/n^(2/3):", med.round(4), f"factor {med[0] / med[-1]:.2f}", rep.verdicts)

cauchy = stream_paths(ProcessModel.iid(1000, "cauchy"), P, SEED)
print("Cauchy:", mz_slln_check(cauchy, 1.5, [100, 1000]).status)
