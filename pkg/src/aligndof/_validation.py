"""Input checks shared by the estimator front ends."""
import numpy as np

from .exceptions import DimensionMismatch
from .netmodel import ChannelRealization, NetworkConfig


def check_channel(X, seed=None):
    """Coerce ``X`` into a :class:`ChannelRealization`.

    Accepts a realization or a complex array of shape ``(L, L, K, M_r, N_t)``.
    """
    if isinstance(X, ChannelRealization):
        return X
    arr = np.asarray(X)
    if arr.ndim != 5 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(
            f"expected a channel array of shape (L, L, K, M_r, N_t), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("channel array contains NaN or inf")
    L, _, K, M, N = arr.shape
    return ChannelRealization(NetworkConfig(L, K, M, N), -1 if seed is None else seed, arr)


def check_cross_channels(X):
    """Validate a ``(K_r, K_t, M_r, N_t)`` stack of cross channels."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim != 4 or 0 in arr.shape:
        raise DimensionMismatch(
            f"expected cross channels of shape (K_r, K_t, M_r, N_t), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("cross channels contain NaN or inf")
    return arr
