"""Network topology and seeded Rayleigh channel realizations.

Indices are 0-based in Python (``H[i, l, k]`` is the channel from user
``k`` of cell ``l`` to base station ``i``); the JSON form uses 1-based
``"i-l-k"`` keys.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, NonPositiveDimension

__all__ = ["NetworkConfig", "ChannelRealization", "make_config",
           "sample_channel", "complex_normal"]

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class NetworkConfig:
    """Uplink topology: ``L`` cells of ``K`` users.

    Each base station has ``M_r`` receive antennas and each user has
    ``N_t`` transmit antennas.
    """

    L: int
    K: int
    M_r: int
    N_t: int

    def __post_init__(self):
        for name in ("L", "K", "M_r", "N_t"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise NonPositiveDimension(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise NonPositiveDimension(f"{name} must be >= 1, got {value}")
            object.__setattr__(self, name, int(value))

    def as_dict(self):
        return {"L": self.L, "K": self.K, "M_r": self.M_r, "N_t": self.N_t}


def make_config(L, K, M_r, N_t):
    return NetworkConfig(L, K, M_r, N_t)


def complex_normal(rng, shape):
    """Circularly-symmetric CN(0, 1) samples (real and imaginary N(0, 1/2))."""
    scale = np.sqrt(0.5)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _matrix_rng(seed, *key):
    # one stream per (seed, key...) so any matrix is reproducible on its own
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, *key]))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """All channel matrices of one Monte Carlo draw.

    Attributes
    ----------
    config : NetworkConfig
    seed : int
    H : ndarray, shape (L, L, K, M_r, N_t)
        ``H[i, l, k]`` maps user ``k`` of cell ``l`` to base station ``i``.
        The array is read-only.
    """

    config: NetworkConfig
    seed: int
    H: np.ndarray = field(repr=False)

    def __post_init__(self):
        cfg = self.config
        expected = (cfg.L, cfg.L, cfg.K, cfg.M_r, cfg.N_t)
        H = np.asarray(self.H, dtype=complex)
        if H.shape != expected:
            raise DimensionMismatch(f"channel array has shape {H.shape}, expected {expected}")
        H = H.copy()
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    def __getitem__(self, key):
        i, l, k = key
        return self.H[i, l, k]

    @property
    def matrices(self):
        """Mapping ``(i, l, k) -> M_r x N_t`` matrix (0-based)."""
        L, K = self.config.L, self.config.K
        return {(i, l, k): self.H[i, l, k]
                for i in range(L) for l in range(L) for k in range(K)}

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return (self.config == other.config and self.seed == other.seed
                and np.array_equal(self.H, other.H))

    __hash__ = None

    def to_dict(self):
        mats = {}
        for (i, l, k), m in self.matrices.items():
            mats[f"{i + 1}-{l + 1}-{k + 1}"] = complex_to_json(m)
        return {"config": self.config.as_dict(), "seed": int(self.seed), "matrices": mats}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        cfg = NetworkConfig(**data["config"])
        H = np.empty((cfg.L, cfg.L, cfg.K, cfg.M_r, cfg.N_t), dtype=complex)
        mats = data["matrices"]
        if len(mats) != cfg.L * cfg.L * cfg.K:
            raise DimensionMismatch(
                f"expected {cfg.L * cfg.L * cfg.K} matrices, got {len(mats)}")
        for key, value in mats.items():
            i, l, k = (int(p) - 1 for p in key.split("-"))
            H[i, l, k] = complex_from_json(value)
        return cls(cfg, int(data["seed"]), H)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def sample_channel(config, seed):
    """Draw i.i.d. CN(0, 1) channel matrices for every (BS, cell, user).

    Each matrix has its own generator keyed by ``(seed, i, l, k)``, so the
    result does not depend on generation order.
    """
    L, K, M, N = config.L, config.K, config.M_r, config.N_t
    H = np.empty((L, L, K, M, N), dtype=complex)
    for i in range(L):
        for l in range(L):
            for k in range(K):
                H[i, l, k] = complex_normal(_matrix_rng(int(seed), i, l, k), (M, N))
    return ChannelRealization(config, int(seed), H)


def complex_to_json(a):
    a = np.asarray(a)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_from_json(data):
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        # tolist() drops the trailing [re, im] axis of empty arrays
        return np.zeros(arr.shape, dtype=complex)
    return arr[..., 0] + 1j * arr[..., 1]
