"""Independent reference computations used by the tests.

Nothing here imports the planner; the formulas are re-derived inline so
a bug in ``aligndof.dofcalc`` cannot leak into its own oracle.
"""
from fractions import Fraction as F
from math import comb


def _stage_options(L, K, M, eta_r, eta_t):
    for K_t in range(1, K + 1):
        for K_r in range(1, L):
            for kappa in range(K_t + 1):
                mid = K_r * (K_t - kappa) * M
                if not (K_t - 1) * eta_t <= mid < K_t * eta_t:
                    continue
                if kappa == 0:
                    directions = eta_t - K_r * M
                else:
                    directions = comb(K - 1, K_t - 1) * (K_t * eta_t - mid)
                unaligned = L - 1 - K_r
                d = min(eta_r / (K + K_r * K * F(kappa, K_t) + unaligned * K), directions)
                if d <= 0:
                    continue
                used = K * d + K_r * K * d * F(kappa, K_t) + unaligned * K * d
                yield (K_t, kappa, K_r, d), eta_r - used, eta_t - d


def brute_force_total_dof(L, K, M, N):
    """Enumerate every stage-1 choice and every stage-2 choice, keep the best D."""
    if L == 1:
        return K * min(F(M, K), F(N))
    best = F(0)
    for (_, _, _, d1), rest_r, rest_t in _stage_options(L, K, M, F(M), F(N)):
        total = d1
        if rest_r > 0 and rest_t > 0:
            for (_, _, _, d2), _, _ in _stage_options(L, K, M, rest_r, rest_t):
                total = max(total, d1 + d2)
        best = max(best, total)
    return L * K * best


def brute_force_best_stage1(L, K, M, N):
    """All single-stage (K_t, kappa, K_r, d) tuples reaching the best one-stage d."""
    opts = [o for o, _, _ in _stage_options(L, K, M, F(M), F(N))]
    top = max(o[3] for o in opts)
    return [o for o in opts if o[3] == top]
