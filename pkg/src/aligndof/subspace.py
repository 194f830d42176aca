"""SVD-based rank, null space, orthogonal complement and span dimension.

Every function takes a :class:`Tolerance`; a singular value counts as
nonzero when it exceeds ``tol.rel * sigma_max * max(m, n)``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch

__all__ = ["Tolerance", "DEFAULT_TOL", "default_tolerance", "numerical_rank",
           "null_space_basis", "orth_complement", "span_dim"]

TOL_ENV_VAR = "ALIGNDOF_TOL"


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10

    def __post_init__(self):
        if not 0.0 < float(self.rel) < 1.0:
            raise ValueError(f"relative tolerance must lie in (0, 1), got {self.rel}")
        object.__setattr__(self, "rel", float(self.rel))


DEFAULT_TOL = Tolerance()


def default_tolerance():
    """Tolerance from ``$ALIGNDOF_TOL`` if set, else the 1e-10 default."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw:
        return Tolerance(float(raw))
    return DEFAULT_TOL


def _as_matrix(A):
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def _threshold(s, shape, tol, ref=None):
    if s.size == 0:
        return 0.0
    top = s[0] if ref is None else max(s[0], ref)
    return tol.rel * top * max(shape)


def numerical_rank(A, tol=DEFAULT_TOL, ref=None):
    """Number of singular values above the tolerance threshold.

    ``ref`` optionally supplies an outside reference magnitude (e.g. the
    norm of the unprecoded channel) that replaces ``sigma_max`` when
    larger, so a matrix that is numerically zero relative to its context
    gets rank 0 instead of being judged against its own tiny scale.
    """
    A = _as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > _threshold(s, A.shape, tol, ref)))


def null_space_basis(A, tol=DEFAULT_TOL):
    """Orthonormal basis of the numerical null space of ``A``.

    Columns are the right singular vectors belonging to the discarded
    singular values, ordered from the largest discarded value down.
    A matrix with zero rows has the identity as its null-space basis.
    """
    A = _as_matrix(A)
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    rank = 0 if s[0] == 0.0 else int(np.count_nonzero(s > _threshold(s, A.shape, tol)))
    return vh[rank:].conj().T


def orth_complement(B, ambient_dim, tol=DEFAULT_TOL):
    """Orthonormal basis of the orthogonal complement of ``range(B)``.

    ``B`` is expected to have orthonormal columns; the result has
    ``ambient_dim - rank(B)`` columns.
    """
    B = np.asarray(B)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if B.shape[0] != ambient_dim:
        raise DimensionMismatch(
            f"basis has {B.shape[0]} rows but ambient dimension is {ambient_dim}")
    if B.shape[1] == 0:
        return np.eye(ambient_dim, dtype=complex)
    return null_space_basis(B.conj().T, tol)


def span_dim(blocks, tol=DEFAULT_TOL, ref=None):
    """Dimension of the column space spanned by all ``blocks`` together."""
    blocks = [_as_matrix(b) for b in blocks]
    if not blocks:
        raise ValueError("span_dim needs at least one block")
    rows = {b.shape[0] for b in blocks}
    if len(rows) != 1:
        raise DimensionMismatch(f"blocks disagree on row count: {sorted(rows)}")
    return numerical_rank(np.hstack(blocks), tol, ref)
