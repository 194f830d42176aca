"""Network-wide application of the alignment scheme and its verification.

Every cell aligns its users' interference at ``K_r`` target base stations
chosen by a cyclic rule, so each BS is targeted by exactly ``K_r`` cells.
A stage is realized with ``d_int = floor(d)`` streams per user; plans with
fractional ``d`` would need symbol extension, which is not constructed.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dofcalc import Plan, ici_count
from .exceptions import (AlignDofError, ConstructionError, DimensionMismatch,
                         DirectionsBudgetExceeded, InvalidKr, PreconditionViolated)
from .ia_core import (IAScenario, build_ia_system, random_scenario,
                      assemble_coefficient_matrix, solve_precoders,
                      system_null_dim, zero_force_precoders)
from .netmodel import NetworkConfig, complex_normal, complex_from_json, complex_to_json
from .subspace import DEFAULT_TOL, numerical_rank, orth_complement, span_dim

__all__ = ["TargetAssignment", "CellSystem", "NetworkDesign", "BSReport",
           "VerificationReport", "assign_targets", "plan_covering",
           "build_cell_systems", "design_network", "random_design",
           "verify_design", "lemma1_check", "lemma2_check", "derive_seed"]

_MASK64 = (1 << 64) - 1


def derive_seed(*key):
    """Deterministic 64-bit seed from an integer key tuple."""
    ss = np.random.SeedSequence([int(k) & _MASK64 for k in key])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class TargetAssignment:
    """``targets[l]`` lists the BSs (0-based) that cell ``l`` aligns at."""

    L: int
    K_r: int
    targets: tuple

    def targeted_by(self, bs):
        return [l for l, ts in enumerate(self.targets) if bs in ts]


def assign_targets(L, K_r):
    """Cell ``l`` targets BSs ``l+1, ..., l+K_r`` (mod ``L``)."""
    if not 1 <= K_r <= L - 1:
        raise InvalidKr(f"K_r={K_r} outside [1, L-1={L - 1}]")
    targets = tuple(tuple((l + s) % L for s in range(1, K_r + 1)) for l in range(L))
    return TargetAssignment(L, K_r, targets)


def _cyclic_subsets(K, K_t):
    seen, out = set(), []
    for j in range(K):
        subset = tuple((j + s) % K for s in range(K_t))
        key = frozenset(subset)
        if key not in seen:
            seen.add(key)
            out.append(subset)
    return out


def plan_covering(K, K_t, d_int, n_sys):
    """Decide which user subsets get an IA system and how many directions each yields.

    Returns a list of ``(subset, x, takes)`` where ``x`` null vectors are
    drawn from the system of ``subset`` and user ``u`` keeps the first
    ``takes[u]`` of its ``x`` columns.  Cyclic subsets come first; when a
    periodic allotment over them gives every user exactly ``d_int``
    directions it is used, otherwise directions are handed out greedily
    over cyclic and then the remaining subsets.

    Raises
    ------
    DirectionsBudgetExceeded
        If ``d_int`` exceeds ``binom(K-1, K_t-1) * n_sys``.
    """
    cap = math.comb(K - 1, K_t - 1)
    if d_int < 1:
        raise ValueError(f"d_int must be >= 1, got {d_int}")
    if n_sys < 1 or d_int > cap * n_sys:
        raise DirectionsBudgetExceeded(
            f"d_int={d_int} exceeds binom({K - 1},{K_t - 1}) * {n_sys} = {cap * max(n_sys, 0)}")

    cyclic = _cyclic_subsets(K, K_t)
    if K_t == K or K_t == 1:
        # d_int <= n_sys here because cap == 1
        return [(s, d_int, {u: d_int for u in s}) for s in cyclic]

    g = math.gcd(K, K_t)
    if (d_int * g) % K_t == 0:
        per_class = d_int * g // K_t
        xs = [per_class // g + (1 if r < per_class % g else 0) for r in range(g)]
        if max(xs) <= n_sys:
            return [(s, xs[j % g], {u: xs[j % g] for u in s})
                    for j, s in enumerate(cyclic) if xs[j % g] > 0]

    used = {frozenset(s) for s in cyclic}
    pool = cyclic + [c for c in itertools.combinations(range(K), K_t)
                     if frozenset(c) not in used]
    need = [d_int] * K
    out = []
    while pool:
        # subset serving the most still-needy users; earliest wins ties
        pos = max(range(len(pool)),
                  key=lambda p: (sum(need[u] > 0 for u in pool[p]), -p))
        subset = pool.pop(pos)
        top = max(need[u] for u in subset)
        if top == 0:
            break
        x = min(n_sys, top)
        takes = {u: min(x, need[u]) for u in subset}
        for u, t in takes.items():
            need[u] -= t
        out.append((subset, x, takes))
        if not any(need):
            return out
    raise DirectionsBudgetExceeded(f"covering left unmet demand {need}")


@dataclass(frozen=True, eq=False)
class CellSystem:
    """Provenance of one solved IA system (or one zero-forced user)."""

    stage: int
    cell: int
    users: tuple
    targets: tuple
    directions: int
    takes: dict
    coeff_seed: int | None
    zero_forcing: bool = False

    def as_dict(self):
        return {"stage": self.stage, "cell": self.cell, "users": list(self.users),
                "targets": list(self.targets), "directions": self.directions,
                "takes": {str(u): t for u, t in self.takes.items()},
                "coeff_seed": self.coeff_seed, "zero_forcing": self.zero_forcing}

    @classmethod
    def from_dict(cls, d):
        return cls(d["stage"], d["cell"], tuple(d["users"]), tuple(d["targets"]),
                   d["directions"], {int(u): t for u, t in d["takes"].items()},
                   d["coeff_seed"], d.get("zero_forcing", False))


def _effective(channel_H, bases):
    """Right-multiply ``H[i, l, k]`` by user ``(l, k)``'s transmit basis."""
    L, _, K = channel_H.shape[:3]
    return {(i, l, k): channel_H[i, l, k] @ bases[(l, k)]
            for i in range(L) for l in range(L) for k in range(K)}


def build_cell_systems(config, params, cell, H_eff, targets, seed, d_int, eta_t,
                       stage=1, tol=DEFAULT_TOL):
    """Set up and solve the IA systems of one cell for one stage.

    ``H_eff[(i, l, k)]`` are the (effective) channels with ``eta_t``
    transmit dimensions.  Returns ``(records, precoders)`` where
    ``precoders[k]`` is the ``eta_t x d_int`` precoder of user ``k`` in
    effective coordinates.
    """
    K, M_r = config.K, config.M_r
    K_t, kappa, K_r = params.K_t, params.kappa_t, params.K_r
    records, columns = [], {k: [] for k in range(K)}

    if kappa == 0:
        for k in range(K):
            cross = np.stack([H_eff[(j, cell, k)] for j in targets])[:, None]
            sc = IAScenario(1, K_r, 0, eta_t, M_r, cross, zero_forcing=True)
            try:
                pre = zero_force_precoders(sc, d_int, tol)
            except AlignDofError as exc:
                raise ConstructionError(f"stage {stage}, cell {cell}, user {k}: {exc}",
                                        cell=cell, system=k, stage=stage) from exc
            columns[k].append(pre.V[0])
            records.append(CellSystem(stage, cell, (k,), tuple(targets), d_int,
                                      {k: d_int}, None, zero_forcing=True))
    else:
        n_sys = system_null_dim(K_t, kappa, K_r, M_r, eta_t)
        covering = plan_covering(K, K_t, d_int, n_sys)
        for idx, (users, x, takes) in enumerate(covering):
            cross = np.stack([np.stack([H_eff[(j, cell, u)] for u in users]) for j in targets])
            sc = IAScenario(K_t, K_r, kappa, eta_t, M_r, cross)
            coeff_seed = derive_seed(seed, stage, cell, idx)
            try:
                system = build_ia_system(sc, coeff_seed)
                pre = solve_precoders(system, x, tol)
            except AlignDofError as exc:
                raise ConstructionError(
                    f"stage {stage}, cell {cell}, system {idx} users {users}: {exc}",
                    cell=cell, system=idx, stage=stage) from exc
            for pos, u in enumerate(users):
                if takes[u]:
                    columns[u].append(pre.V[pos][:, :takes[u]])
            records.append(CellSystem(stage, cell, tuple(users), tuple(targets), x,
                                      dict(takes), coeff_seed))

    precoders = {}
    for k in range(K):
        V = np.hstack(columns[k])
        rank = numerical_rank(V, tol)
        if V.shape[1] != d_int or rank != d_int:
            raise ConstructionError(
                f"stage {stage}, cell {cell}, user {k}: precoder has {V.shape[1]} columns "
                f"of rank {rank}, expected {d_int}", cell=cell, stage=stage)
        precoders[k] = V
    return records, precoders


@dataclass(frozen=True, eq=False)
class NetworkDesign:
    """Per-user precoders for the whole network plus their provenance.

    ``precoders[(l, k)]`` is ``N_t x sum(d_int)``; ``stage_precoders[s]``
    holds the columns contributed by stage ``s``.
    """

    config: NetworkConfig
    plan: Plan | None
    d_int: tuple
    precoders: dict = field(repr=False)
    stage_precoders: tuple = field(repr=False, default=())
    systems: tuple = field(repr=False, default=())
    channel_seed: int | None = None
    design_seed: int | None = None
    notes: tuple = ()

    @property
    def d_total(self):
        return sum(self.d_int)

    @property
    def stage2_precoders(self):
        return self.stage_precoders[1] if len(self.stage_precoders) > 1 else None

    def predicted_n_ici(self):
        """n_ICI at each BS for the integer stream counts actually realized."""
        if self.plan is None or self.config.L == 1:
            return Fraction(0)
        L, K = self.config.L, self.config.K
        total = Fraction(0)
        for stage, d in zip(self.plan.stages, self.d_int):
            p = stage.params
            total += ici_count(L, K, p.K_t, p.kappa_t, p.K_r, d)
        return total

    def to_dict(self):
        return {
            "config": self.config.as_dict(),
            "plan": None if self.plan is None else self.plan.as_dict(),
            "d_int": list(self.d_int),
            "channel_seed": self.channel_seed,
            "design_seed": self.design_seed,
            "notes": list(self.notes),
            "precoders": {f"{l + 1}-{k + 1}": complex_to_json(V)
                          for (l, k), V in sorted(self.precoders.items())},
            "systems": [s.as_dict() for s in self.systems],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        cfg = NetworkConfig(**data["config"])
        pl = None if data.get("plan") is None else Plan.from_dict(data["plan"])
        pre = {}
        for key, value in data["precoders"].items():
            l, k = (int(p) - 1 for p in key.split("-"))
            pre[(l, k)] = complex_from_json(value)
        systems = tuple(CellSystem.from_dict(s) for s in data.get("systems", []))
        return cls(cfg, pl, tuple(data["d_int"]), pre, (), systems,
                   data.get("channel_seed"), data.get("design_seed"),
                   tuple(data.get("notes", [])))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def design_network(config, channel, plan, seed=0, tol=DEFAULT_TOL):
    """Build every user's precoder for ``plan`` on one channel realization.

    Stage ``s > 1`` works on effective channels ``H Q`` where ``Q`` spans
    the orthogonal complement of the user's earlier columns.

    Raises
    ------
    ConstructionError
        If the plan cannot be realized with integer streams, or an IA
        system fails; the error carries cell/system provenance.
    """
    if channel.config != config:
        raise DimensionMismatch("channel was drawn for a different config")
    L, K, N = config.L, config.K, config.N_t
    notes = []
    d_ints = []
    for idx, stage in enumerate(plan.stages, start=1):
        d = stage.params.d
        d_int = math.floor(d)
        if d_int != d:
            notes.append(f"stage {idx}: d = {d} requires symbol extension; using d_int = {d_int}")
        d_ints.append(d_int)
    if d_ints[0] < 1:
        raise ConstructionError(f"d = {plan.stage1.d} rounds down to 0 streams; "
                                "symbol extension is not constructed", stage=1)

    if L == 1:
        d_int = d_ints[0]
        eye = np.eye(N, dtype=complex)[:, :d_int]
        pre = {(0, k): eye.copy() for k in range(K)}
        return NetworkDesign(config, plan, (d_int,), pre, (pre,), (), channel.seed,
                             seed, tuple(notes))

    bases = {(l, k): np.eye(N, dtype=complex) for l in range(L) for k in range(K)}
    accumulated = {(l, k): np.zeros((N, 0), dtype=complex) for l in range(L) for k in range(K)}
    stage_pre, records, realized = [], [], []
    for s_idx, (stage, d_int) in enumerate(zip(plan.stages, d_ints), start=1):
        if d_int < 1:
            notes.append(f"stage {s_idx}: skipped (d_int = 0)")
            break
        eta_t = N - sum(realized)
        params = stage.params
        assignment = assign_targets(L, params.K_r)
        H_eff = _effective(channel.H, bases)
        this_stage = {}
        for l in range(L):
            recs, pre = build_cell_systems(config, params, l, H_eff, assignment.targets[l],
                                           seed, d_int, eta_t, stage=s_idx, tol=tol)
            records.extend(recs)
            for k, V_eff in pre.items():
                this_stage[(l, k)] = bases[(l, k)] @ V_eff
        for key, V in this_stage.items():
            accumulated[key] = np.hstack([accumulated[key], V])
            bases[key] = orth_complement(_orthonormal(accumulated[key]), N, tol)
        stage_pre.append(this_stage)
        realized.append(d_int)

    return NetworkDesign(config, plan, tuple(realized), accumulated, tuple(stage_pre),
                         tuple(records), channel.seed, seed, tuple(notes))


def _orthonormal(V):
    q, _ = np.linalg.qr(V)
    return q


def random_design(config, d, seed=0):
    """Unaligned control design: i.i.d. random unit-norm precoder columns."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & _MASK64, 0xC0]))
    pre = {}
    for l in range(config.L):
        for k in range(config.K):
            V = complex_normal(rng, (config.N_t, d))
            pre[(l, k)] = V / np.linalg.norm(V, axis=0)
    return NetworkDesign(config, None, (d,), pre, (pre,), (), None, seed,
                         ("random precoders (no alignment)",))


@dataclass(frozen=True)
class BSReport:
    bs: int
    desired_dim: int
    ici_dim: int
    ici_by_cell: dict
    predicted_n_ici: Fraction
    total_dim: int
    decodable: bool


@dataclass(frozen=True)
class VerificationReport:
    config: NetworkConfig
    d_int: int
    per_bs: tuple
    user_ranks: dict
    passed: bool

    CSV_FIELDS = ("L", "K", "Mr", "Nt", "d_int", "n_ICI_pred")

    @property
    def ici_matches_prediction(self):
        return all(Fraction(b.ici_dim) == b.predicted_n_ici for b in self.per_bs)

    def to_dict(self):
        return {
            "config": self.config.as_dict(),
            "d_int": self.d_int,
            "passed": self.passed,
            "per_bs": [{"bs": b.bs + 1, "desired_dim": b.desired_dim, "ici_dim": b.ici_dim,
                        "ici_by_cell": {str(l + 1): v for l, v in b.ici_by_cell.items()},
                        "predicted_n_ici": f"{b.predicted_n_ici.numerator}/"
                                           f"{b.predicted_n_ici.denominator}",
                        "total_dim": b.total_dim, "decodable": b.decodable}
                       for b in self.per_bs],
            "user_ranks": {f"{l + 1}-{k + 1}": r for (l, k), r in sorted(self.user_ranks.items())},
        }

    def csv_header(self):
        cols = list(self.CSV_FIELDS)
        for b in self.per_bs:
            n = b.bs + 1
            cols += [f"bs{n}_desired", f"bs{n}_ici", f"bs{n}_decodable"]
        return cols + ["pass"]

    def csv_row(self):
        pred = self.per_bs[0].predicted_n_ici if self.per_bs else Fraction(0)
        row = [self.config.L, self.config.K, self.config.M_r, self.config.N_t, self.d_int,
               f"{pred.numerator}/{pred.denominator}"]
        for b in self.per_bs:
            row += [b.desired_dim, b.ici_dim, int(b.decodable)]
        return row + [int(self.passed)]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_header())
        writer.writerow(self.csv_row())
        return buf.getvalue()


def verify_design(config, channel, design, tol=DEFAULT_TOL):
    """Measure desired/ICI dimensions at every BS and check decodability.

    A BS is decodable when its desired and interference columns are
    jointly independent (total rank equals ``K d + ICI dim``) and fit in
    ``M_r`` dimensions.
    """
    L, K, M = config.L, config.K, config.M_r
    d = design.d_total
    predicted = design.predicted_n_ici()
    H = channel.H
    per_bs = []
    for i in range(L):
        desired = [H[i, i, k] @ design.precoders[(i, k)] for k in range(K)]
        # residual interference is judged against the channel scale at BS i
        ref = max(np.linalg.norm(H[i, l, k], 2) for l in range(L) for k in range(K))
        by_cell, ici = {}, []
        for l in range(L):
            if l == i:
                continue
            blocks = [H[i, l, k] @ design.precoders[(l, k)] for k in range(K)]
            by_cell[l] = span_dim(blocks, tol, ref)
            ici.extend(blocks)
        desired_dim = span_dim(desired, tol, ref)
        ici_dim = span_dim(ici, tol, ref) if ici else 0
        total = span_dim(desired + ici, tol, ref)
        decodable = total == K * d + ici_dim and K * d + ici_dim <= M
        per_bs.append(BSReport(i, desired_dim, ici_dim, by_cell, predicted, total, decodable))
    ranks = {key: numerical_rank(V, tol) for key, V in design.precoders.items()}
    passed = all(b.decodable for b in per_bs) and all(r == d for r in ranks.values())
    return VerificationReport(config, d, tuple(per_bs), ranks, passed)


def lemma1_check(n1, n2, r, m1, m2, seed, tol=DEFAULT_TOL):
    """Randomized check that forced linear relations collapse a column span.

    ``A_{q+1..n1}`` (``q = n1 - n2``) are random rank-``r`` matrices and
    ``A_{1..q}`` solve ``sum_k gamma_ik A_k = 0`` for ``i = 1..q`` with
    i.i.d. ``gamma``.  Returns whether the joint column space has
    dimension exactly ``min(n2 r, m1)`` and the relations hold.
    """
    if not (0 <= n2 <= n1 and 0 <= r <= min(m1, m2)):
        raise PreconditionViolated(f"invalid lemma parameters n1={n1} n2={n2} r={r} "
                                   f"m1={m1} m2={m2}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & _MASK64, n1, n2, r, m1, m2]))
    q = n1 - n2
    free = [complex_normal(rng, (m1, r)) @ complex_normal(rng, (r, m2)) for _ in range(n2)]
    gamma = complex_normal(rng, (q, n1))
    if q:
        rhs = np.zeros((q, m1 * m2), dtype=complex)
        if n2:
            rhs = -gamma[:, q:] @ np.stack([a.ravel() for a in free])
        solved = np.linalg.solve(gamma[:, :q], rhs)
        forced = [row.reshape(m1, m2) for row in solved]
    else:
        forced = []
    mats = forced + free
    residual = max((np.abs(sum(gamma[i, k] * mats[k] for k in range(n1))).max()
                    for i in range(q)), default=0.0)
    scale = max((np.abs(a).max() for a in mats), default=1.0) or 1.0
    dim = span_dim(mats, tol) if mats else 0
    return residual <= 1e-8 * scale * n1 and dim == min(n2 * r, m1)


def lemma2_check(K_t, kappa_t, K_r, M_r, N_t, seed, tol=DEFAULT_TOL):
    """Check that a freshly drawn coefficient matrix has full rank."""
    if N_t > K_r * M_r:
        raise PreconditionViolated(f"needs N_t <= K_r*M_r ({N_t} > {K_r * M_r})")
    if not 0 <= kappa_t <= K_t:
        raise PreconditionViolated(f"kappa_t={kappa_t} outside [0, K_t={K_t}]")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & _MASK64, 0x1E2]))
    sc = random_scenario(K_t, kappa_t, K_r, M_r, N_t, rng)
    gamma = complex_normal(rng, (K_r, K_t - kappa_t, K_t))
    C = assemble_coefficient_matrix(sc.cross_channels, gamma)
    expected = min(K_r * (K_t - kappa_t) * M_r, K_t * N_t)
    return numerical_rank(C, tol) == expected
