"""One interference-alignment system: K_t transmitters, K_r shared receivers.

The precoders of the K_t users are the null space of a stacked block
matrix whose block row ``(k, i)`` and block column ``j`` is
``gamma[k, i, j] * H[k, j]``.  Any vector in that null space makes the
received interference at each of the K_r receivers satisfy
``K_t - kappa_t`` random linear relations, which squeezes it into a
``kappa_t * d`` dimensional subspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (DimensionMismatch, InfeasibleKappa,
                         InsufficientNullSpace, PreconditionViolated,
                         RankDeficientPrecoder)
from .netmodel import complex_normal, complex_to_json, complex_from_json
from .subspace import DEFAULT_TOL, null_space_basis, numerical_rank, span_dim

__all__ = ["IAScenario", "IASystem", "PrecoderSet", "AlignmentReport",
           "kappa_feasible", "system_null_dim", "assemble_coefficient_matrix",
           "build_ia_system", "solve_precoders", "zero_force_precoders",
           "verify_alignment", "random_scenario"]


def kappa_feasible(K_t, kappa_t, K_r, M_r, N_t):
    """``(K_t - 1) N_t <= K_r (K_t - kappa_t) M_r < K_t N_t``."""
    mid = K_r * (K_t - kappa_t) * M_r
    return (K_t - 1) * N_t <= mid < K_t * N_t


def system_null_dim(K_t, kappa_t, K_r, M_r, N_t):
    """Generic null-space dimension of the coefficient matrix."""
    return K_t * N_t - K_r * (K_t - kappa_t) * M_r


@dataclass(frozen=True, eq=False)
class IAScenario:
    """K_t transmitters interfering at the same K_r receivers.

    ``cross_channels[j, i]`` is the ``M_r x N_t`` channel from transmitter
    ``i`` to receiver ``j``.  ``zero_forcing=True`` marks a scenario with
    ``N_t > K_r * M_r`` whose precoders are taken from the null space of
    each user's stacked cross channels.
    """

    K_t: int
    K_r: int
    kappa_t: int
    N_t: int
    M_r: int
    cross_channels: np.ndarray = field(repr=False)
    zero_forcing: bool = False

    def __post_init__(self):
        H = np.asarray(self.cross_channels, dtype=complex)
        expected = (self.K_r, self.K_t, self.M_r, self.N_t)
        if H.shape != expected:
            raise DimensionMismatch(f"cross channels have shape {H.shape}, expected {expected}")
        object.__setattr__(self, "cross_channels", H)
        if not 0 <= self.kappa_t <= self.K_t:
            raise InfeasibleKappa(f"kappa_t={self.kappa_t} outside [0, K_t={self.K_t}]")
        if self.zero_forcing and not self.N_t > self.K_r * self.M_r:
            raise PreconditionViolated(
                f"zero forcing needs N_t > K_r*M_r ({self.N_t} <= {self.K_r * self.M_r})")

    @property
    def feasible(self):
        return kappa_feasible(self.K_t, self.kappa_t, self.K_r, self.M_r, self.N_t)

    @property
    def max_streams(self):
        if self.zero_forcing:
            return self.N_t - self.K_r * self.M_r
        return system_null_dim(self.K_t, self.kappa_t, self.K_r, self.M_r, self.N_t)


def random_scenario(K_t, kappa_t, K_r, M_r, N_t, rng, zero_forcing=False):
    """Scenario with i.i.d. CN(0, 1) cross channels drawn from ``rng``."""
    H = complex_normal(rng, (K_r, K_t, M_r, N_t))
    return IAScenario(K_t, K_r, kappa_t, N_t, M_r, H, zero_forcing)


def assemble_coefficient_matrix(cross_channels, gamma):
    """Stack ``gamma[k, i, j] * H[k, j]`` into the block coefficient matrix.

    Parameters
    ----------
    cross_channels : ndarray, shape (K_r, K_t, M_r, N_t)
    gamma : ndarray, shape (K_r, K_t - kappa_t, K_t)

    Returns
    -------
    ndarray, shape (K_r * (K_t - kappa_t) * M_r, K_t * N_t)
        Block rows are ordered receiver-major, then relation index.
    """
    H = np.asarray(cross_channels)
    K_r, K_t, M_r, N_t = H.shape
    n_rel = gamma.shape[1]
    # blocks[k, i, j] = gamma[k, i, j] * H[k, j]
    blocks = gamma[:, :, :, None, None] * H[:, None, :, :, :]
    return blocks.transpose(0, 1, 3, 2, 4).reshape(K_r * n_rel * M_r, K_t * N_t)


@dataclass(frozen=True, eq=False)
class IASystem:
    scenario: IAScenario
    gamma: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    coeff_seed: int = 0


def build_ia_system(scenario, coeff_seed):
    """Draw the random coefficients and assemble the stacked system.

    Raises
    ------
    InfeasibleKappa
        If ``(K_t, kappa_t, K_r)`` violates the feasibility interval.
    """
    sc = scenario
    if sc.zero_forcing:
        raise PreconditionViolated("zero-forcing scenarios are solved by zero_force_precoders")
    if not sc.feasible:
        raise InfeasibleKappa(
            f"(K_t={sc.K_t}, kappa_t={sc.kappa_t}, K_r={sc.K_r}, M_r={sc.M_r}, N_t={sc.N_t}) "
            "violates (K_t-1)N_t <= K_r(K_t-kappa_t)M_r < K_t N_t")
    rng = np.random.default_rng(np.random.SeedSequence(int(coeff_seed) & ((1 << 64) - 1)))
    gamma = complex_normal(rng, (sc.K_r, sc.K_t - sc.kappa_t, sc.K_t))
    C = assemble_coefficient_matrix(sc.cross_channels, gamma)
    return IASystem(sc, gamma, C, int(coeff_seed))


@dataclass(frozen=True, eq=False)
class PrecoderSet:
    """Per-user precoders with unit-norm columns.

    ``V[k]`` has shape ``N_t x d``.  ``provenance`` records where the
    columns came from (coefficient seed, user subset, ...).
    """

    V: list
    d: int
    provenance: dict = field(default_factory=dict)

    def stacked(self):
        return np.vstack(self.V)

    def to_dict(self):
        return {"d": self.d, "V": [complex_to_json(v) for v in self.V],
                "system_provenance": self.provenance}

    @classmethod
    def from_dict(cls, data):
        return cls([complex_from_json(v) for v in data["V"]], int(data["d"]),
                   dict(data.get("system_provenance", {})))


def _normalize_columns(V):
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0.0] = 1.0
    return V / norms


def _check_ranks(blocks, d, tol):
    for k, V in enumerate(blocks):
        rank = numerical_rank(V, tol)
        if rank != d:
            raise RankDeficientPrecoder(f"precoder of user {k} has rank {rank}, expected {d}")


def solve_precoders(system, d, tol=DEFAULT_TOL, *, check_rank=True):
    """Take ``d`` null vectors of ``C`` and split them into per-user precoders.

    Raises
    ------
    InsufficientNullSpace
        If ``d`` exceeds the analytic bound or the measured null space.
    RankDeficientPrecoder
        If some per-user block is not of full column rank.
    """
    sc = system.scenario
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    bound = sc.max_streams
    if d > bound:
        raise InsufficientNullSpace(
            f"d={d} exceeds K_t*N_t - K_r(K_t-kappa_t)M_r = {bound}")
    basis = null_space_basis(system.C, tol)
    if basis.shape[1] < d:
        raise InsufficientNullSpace(
            f"measured null space has dimension {basis.shape[1]} < d={d}")
    sol = basis[:, :d]
    blocks = [_normalize_columns(sol[j * sc.N_t:(j + 1) * sc.N_t]) for j in range(sc.K_t)]
    if check_rank:
        _check_ranks(blocks, d, tol)
    return PrecoderSet(blocks, d, {"coeff_seed": system.coeff_seed})


def zero_force_precoders(scenario, d, tol=DEFAULT_TOL):
    """Precoders in the null space of each user's stacked cross channels."""
    sc = scenario
    if not sc.N_t > sc.K_r * sc.M_r:
        raise PreconditionViolated(
            f"zero forcing needs N_t > K_r*M_r ({sc.N_t} <= {sc.K_r * sc.M_r})")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if d > sc.N_t - sc.K_r * sc.M_r:
        raise InsufficientNullSpace(
            f"d={d} exceeds N_t - K_r*M_r = {sc.N_t - sc.K_r * sc.M_r}")
    blocks = []
    for k in range(sc.K_t):
        H_bar = sc.cross_channels[:, k].reshape(sc.K_r * sc.M_r, sc.N_t)
        basis = null_space_basis(H_bar, tol)
        if basis.shape[1] < d:
            raise InsufficientNullSpace(
                f"user {k}: null space of stacked channel has dimension {basis.shape[1]} < d={d}")
        blocks.append(_normalize_columns(basis[:, :d]))
    _check_ranks(blocks, d, tol)
    return PrecoderSet(blocks, d, {"zero_forcing": True})


@dataclass(frozen=True)
class AlignmentReport:
    interference_dims: tuple
    precoder_ranks: tuple
    bound: int
    d: int

    @property
    def success(self):
        return (all(dim <= self.bound for dim in self.interference_dims)
                and all(r == self.d for r in self.precoder_ranks))


def verify_alignment(scenario, precoders, tol=DEFAULT_TOL):
    """Measure received interference dimension per receiver and precoder ranks."""
    sc = scenario
    V = precoders.V
    if len(V) != sc.K_t:
        raise DimensionMismatch(f"{len(V)} precoders for K_t={sc.K_t} users")
    dims = []
    for j in range(sc.K_r):
        # judge interference against the unprecoded channel's scale
        ref = max(np.linalg.norm(sc.cross_channels[j, i], 2) for i in range(sc.K_t))
        dims.append(span_dim([sc.cross_channels[j, i] @ V[i] for i in range(sc.K_t)], tol, ref))
    ranks = tuple(numerical_rank(v, tol) for v in V)
    kappa = 0 if sc.zero_forcing else sc.kappa_t
    return AlignmentReport(tuple(dims), ranks, kappa * precoders.d, precoders.d)
