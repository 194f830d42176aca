"""Exact-rational DoF accounting and the (K_t, kappa_t, K_r) parameter search.

Nothing here touches floating point except the two region boundaries
``C_A_inf`` / ``C_B_inf`` reported by :func:`optimal_bounds`, which are
irrational in general; the region itself is decided exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exceptions import DegenerateBound, InfeasibleKappa, NoFeasiblePlan
from .ia_core import kappa_feasible

__all__ = ["SchemeParams", "Stage", "Plan", "Region", "BoundsReport", "Baselines",
           "kappa_candidates", "transmit_direction_bound", "per_user_dof",
           "ici_count", "plan", "upper_bound", "optimal_bounds", "baseline_dofs",
           "MAX_STAGES", "DEFAULT_STAGES"]

DEFAULT_STAGES = 2
MAX_STAGES = 4


def _q(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def kappa_candidates(K_t, K_r, M_r, N_t):
    """All ``kappa_t`` in ``[0, K_t]`` satisfying the feasibility interval."""
    return [kappa for kappa in range(K_t + 1) if kappa_feasible(K_t, kappa, K_r, M_r, N_t)]


def transmit_direction_bound(K, K_t, kappa_t, K_r, M_r, N_t):
    """Most transmit directions one user can collect from all its systems.

    With ``kappa_t = 0`` the system degenerates into per-user zero forcing,
    so the bound is the per-user null-space size ``N_t - K_r M_r``.
    """
    if kappa_t == 0:
        return _q(N_t) - K_r * M_r
    return math.comb(K - 1, K_t - 1) * (K_t * _q(N_t) - K_r * (K_t - kappa_t) * M_r)


def per_user_dof(L, K, M_r, N_t, K_t, kappa_t, K_r, eta_r=None):
    """Per-user DoF of one stage.

    ``eta_r`` (default ``M_r``) replaces ``M_r`` in the receive-space term
    only; ``N_t`` is the number of transmit dimensions still available.
    """
    if not kappa_feasible(K_t, kappa_t, K_r, M_r, N_t):
        raise InfeasibleKappa(
            f"kappa_t={kappa_t} infeasible for K_t={K_t}, K_r={K_r}, M_r={M_r}, N_t={N_t}")
    eta_r = _q(M_r if eta_r is None else eta_r)
    load = K + K_r * K * Fraction(kappa_t, K_t) + (L - 1 - K_r) * K
    return min(eta_r / load, transmit_direction_bound(K, K_t, kappa_t, K_r, M_r, N_t))


def ici_count(L, K, K_t, kappa_t, K_r, d):
    """Inter-cell interference dimensions seen by each BS."""
    d = _q(d)
    return K_r * K * d * Fraction(kappa_t, K_t) + (L - 1 - K_r) * K * d


@dataclass(frozen=True)
class SchemeParams:
    """One stage of the scheme.

    ``K_r = 0`` only occurs for the single-cell, interference-free plan.
    """

    K_t: int
    kappa_t: int
    K_r: int
    d: Fraction

    @property
    def zero_forcing(self):
        return self.kappa_t == 0

    def as_dict(self):
        return {"K_t": self.K_t, "kappa_t": self.kappa_t, "K_r": self.K_r,
                "d": _frac_str(self.d)}


@dataclass(frozen=True)
class Stage:
    params: SchemeParams
    eta_r: Fraction
    eta_t: Fraction
    n_ici: Fraction

    def as_dict(self):
        out = self.params.as_dict()
        out.update(eta_r=_frac_str(self.eta_r), eta_t=_frac_str(self.eta_t),
                   n_ICI=_frac_str(self.n_ici))
        return out


@dataclass(frozen=True)
class Plan:
    L: int
    K: int
    M_r: int
    N_t: int
    stages: tuple

    @property
    def stage1(self):
        return self.stages[0].params

    @property
    def stage2(self):
        return self.stages[1].params if len(self.stages) > 1 else None

    @property
    def d(self):
        """Per-user DoF summed over stages."""
        return sum((s.params.d for s in self.stages), Fraction(0))

    @property
    def D(self):
        return self.L * self.K * self.d

    @property
    def n_ICI(self):
        return sum((s.n_ici for s in self.stages), Fraction(0))

    @property
    def eta_r(self):
        """Receive dimensions left unused at each BS after the last stage."""
        last = self.stages[-1]
        return last.eta_r - self.K * last.params.d - last.n_ici

    @property
    def eta_t(self):
        last = self.stages[-1]
        return last.eta_t - last.params.d

    @property
    def extension_factor(self):
        """Smallest symbol-extension length making every stage's d integral."""
        return math.lcm(*(s.params.d.denominator for s in self.stages))

    @property
    def extrapolated(self):
        return len(self.stages) > DEFAULT_STAGES

    @property
    def interference_free(self):
        return self.L == 1

    def as_dict(self):
        ub = None
        if self.L * self.M_r > self.N_t:
            ub = _frac_str(upper_bound(self.L, self.M_r, self.N_t))
        return {
            "config": {"L": self.L, "K": self.K, "M_r": self.M_r, "N_t": self.N_t},
            "stages": [s.as_dict() for s in self.stages],
            "D": _frac_str(self.D),
            "n_ICI": _frac_str(self.n_ICI),
            "eta_r": _frac_str(self.eta_r),
            "eta_t": _frac_str(self.eta_t),
            "extension_factor": self.extension_factor,
            "extrapolated": self.extrapolated,
            "D_UB": ub,
        }

    @classmethod
    def from_dict(cls, data):
        cfg = data["config"]
        stages = tuple(
            Stage(SchemeParams(int(s["K_t"]), int(s["kappa_t"]), int(s["K_r"]), Fraction(s["d"])),
                  Fraction(s["eta_r"]), Fraction(s["eta_t"]), Fraction(s["n_ICI"]))
            for s in data["stages"])
        return cls(int(cfg["L"]), int(cfg["K"]), int(cfg["M_r"]), int(cfg["N_t"]), stages)


def _frac_str(x):
    x = _q(x)
    return f"{x.numerator}/{x.denominator}"


def plan(L, K, M_r, N_t, max_stages=DEFAULT_STAGES):
    """Search (K_t, K_r, kappa_t) per stage for the largest total DoF.

    A stage that leaves receive dimensions unused is followed by another
    search over the leftover receive space and the transmit space
    orthogonal to the precoders already designed, up to ``max_stages``
    stages.  Ties in D go to the smallest K_t, then K_r, then kappa_t.

    Raises
    ------
    NoFeasiblePlan
        If no parameter choice yields a positive DoF.
    """
    if min(L, K, M_r, N_t) < 1:
        raise ValueError("L, K, M_r and N_t must be positive")
    if not 1 <= max_stages <= MAX_STAGES:
        raise ValueError(f"max_stages must lie in [1, {MAX_STAGES}]")

    if L == 1:
        d = min(Fraction(M_r, K), Fraction(N_t))
        stage = Stage(SchemeParams(1, 1, 0, d), Fraction(M_r), Fraction(N_t), Fraction(0))
        return Plan(L, K, M_r, N_t, (stage,))

    @lru_cache(maxsize=None)
    def best(eta_r, eta_t, depth):
        best_total, best_stages = Fraction(0), None
        for K_t in range(1, K + 1):
            for K_r in range(1, L):
                for kappa in kappa_candidates(K_t, K_r, M_r, eta_t):
                    d = per_user_dof(L, K, M_r, eta_t, K_t, kappa, K_r, eta_r)
                    if d <= 0:
                        continue
                    n_ici = ici_count(L, K, K_t, kappa, K_r, d)
                    stages = (Stage(SchemeParams(K_t, kappa, K_r, d), eta_r, eta_t, n_ici),)
                    total = d
                    rest_r = eta_r - K * d - n_ici
                    rest_t = eta_t - d
                    if rest_r > 0 and rest_t > 0 and depth < max_stages:
                        sub_total, sub_stages = best(rest_r, rest_t, depth + 1)
                        if sub_stages is not None:
                            stages += sub_stages
                            total += sub_total
                    if total > best_total:
                        best_total, best_stages = total, stages
        return best_total, best_stages

    _, stages = best(Fraction(M_r), Fraction(N_t), 1)
    if stages is None:
        raise NoFeasiblePlan(f"no feasible parameters for L={L}, K={K}, M_r={M_r}, N_t={N_t}")
    return Plan(L, K, M_r, N_t, stages)


def upper_bound(L, M_r, N_t):
    """``L M_r^2 / (L M_r - N_t)``, defined for ``L M_r > N_t``."""
    if L * M_r <= N_t:
        raise DegenerateBound(f"L*M_r = {L * M_r} <= N_t = {N_t}")
    return Fraction(L * M_r * M_r, L * M_r - N_t)


class Region(enum.Enum):
    REGION1 = "Region1"
    REGION2 = "Region2"
    UNDEFINED = "Undefined"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Baselines:
    COS: Fraction
    Lee: Fraction | None
    LCell: Fraction

    def as_dict(self):
        return {"COS": _frac_str(self.COS),
                "Lee": None if self.Lee is None else _frac_str(self.Lee),
                "LCell": _frac_str(self.LCell)}


def baseline_dofs(L, K, M_r, N_t):
    """Closed-form total DoF of the coordinated orthogonal scheme and two prior IA schemes.

    The two-cell scheme (``Lee``) is only defined for ``L = 2``.  A
    negative value of the L-cell formula means the scheme cannot operate
    and is reported as 0.
    """
    cos = Fraction(min(M_r, L * K * N_t))
    lee = None
    if L == 2:
        knee = Fraction(K * M_r, K + 1)
        lee = Fraction(2 * N_t) if N_t <= knee else 2 * knee
    if L * K > 1:
        lcell = L * K * min(Fraction(M_r, L * K - 1), Fraction(L * (K * N_t - M_r)))
        lcell = max(lcell, Fraction(0))
    else:
        lcell = Fraction(min(M_r, N_t))
    return Baselines(cos, lee, lcell)


@dataclass(frozen=True)
class BoundsReport:
    D_UB: Fraction | None
    D_decom: Fraction
    D_proper: Fraction
    C_A_inf: float | None
    C_B_inf: float | None
    region: Region
    in_c_interval: bool | None
    baselines: Baselines

    def as_dict(self):
        return {"D_UB": None if self.D_UB is None else _frac_str(self.D_UB),
                "D_decom": _frac_str(self.D_decom), "D_proper": _frac_str(self.D_proper),
                "C_A_inf": self.C_A_inf, "C_B_inf": self.C_B_inf,
                "region": self.region.value, "in_c_interval": self.in_c_interval,
                **self.baselines.as_dict()}


def optimal_bounds(L, K, M_r, N_t):
    """Optimal-DoF bounds and region label for the ratio ``M_r / N_t``.

    The region is only defined for ``L = 2, K >= 4`` or ``L >= 3``.
    Region 1 is where the decomposition bound exceeds the proper bound
    (``D_proper < D_decom``).  ``in_c_interval`` reports separately
    whether ``M_r / N_t`` falls strictly inside ``(C_B_inf, C_A_inf)``,
    evaluated exactly as ``r^2 - (L-1) K r + K < 0``.
    """
    D_decom = Fraction(L * K * M_r * N_t, M_r + N_t)
    D_proper = Fraction(L * K * (M_r + N_t), L * K + 1)
    D_UB = upper_bound(L, M_r, N_t) if L * M_r > N_t else None

    disc = (L - 1) ** 2 * K ** 2 - 4 * K
    c_a = c_b = None
    in_interval = None
    if disc >= 0:
        root = math.sqrt(disc)
        c_a = ((L - 1) * K + root) / 2
        c_b = ((L - 1) * K - root) / 2
        r = Fraction(M_r, N_t)
        in_interval = r * r - (L - 1) * K * r + K < 0

    defined = (L == 2 and K >= 4) or L >= 3
    if not defined or disc < 0:
        region = Region.UNDEFINED
    elif D_proper < D_decom:
        region = Region.REGION1
    else:
        region = Region.REGION2
    return BoundsReport(D_UB, D_decom, D_proper, c_a, c_b, region, in_interval,
                        baseline_dofs(L, K, M_r, N_t))
