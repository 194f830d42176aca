import json

import numpy as np
import pytest

from aligndof.exceptions import NonPositiveDimension
from aligndof.netmodel import ChannelRealization, NetworkConfig, make_config, sample_channel


@pytest.mark.parametrize("args", [(2, 2, 6, 6), (2, 3, 4, 4), (1, 1, 1, 1)])
def test_make_config_valid(args):
    cfg = make_config(*args)
    assert (cfg.L, cfg.K, cfg.M_r, cfg.N_t) == args


@pytest.mark.parametrize("args", [(0, 2, 6, 6), (2, 0, 6, 6), (2, 2, -1, 6), (2, 2, 6, 0)])
def test_make_config_rejects_nonpositive(args):
    with pytest.raises(NonPositiveDimension):
        make_config(*args)


def test_make_config_rejects_non_integer():
    with pytest.raises(NonPositiveDimension):
        make_config(2, 2.5, 6, 6)


@pytest.mark.parametrize("cfg, seed, count, shape", [
    ((2, 2, 6, 6), 1, 8, (6, 6)),
    ((3, 2, 3, 3), 7, 18, (3, 3)),
])
def test_sample_channel_shapes(cfg, seed, count, shape):
    ch = sample_channel(NetworkConfig(*cfg), seed)
    mats = ch.matrices
    assert len(mats) == count
    assert all(m.shape == shape for m in mats.values())


def test_sample_channel_deterministic():
    cfg = make_config(2, 3, 4, 5)
    a, b = sample_channel(cfg, 42), sample_channel(cfg, 42)
    assert a == b
    assert np.array_equal(a.H, b.H)


def test_neighbouring_seeds_differ():
    cfg = make_config(2, 2, 3, 3)
    a, b = sample_channel(cfg, 5), sample_channel(cfg, 6)
    for key, m in a.matrices.items():
        assert not np.array_equal(m, b.matrices[key])


def test_matrix_independent_of_config_size():
    # each matrix is keyed by (seed, i, l, k) only, so a larger network
    # reproduces the smaller one's matrices for the shared indices
    small = sample_channel(make_config(2, 2, 3, 3), 9)
    large = sample_channel(make_config(3, 4, 3, 3), 9)
    for (i, l, k), m in small.matrices.items():
        assert np.array_equal(m, large[i, l, k])


def test_channel_is_read_only():
    ch = sample_channel(make_config(2, 1, 2, 2), 0)
    with pytest.raises(ValueError):
        ch.H[0, 0, 0, 0, 0] = 1.0


def test_sample_statistics():
    # 5*5*10*20*20 = 1e5 entries
    ch = sample_channel(make_config(5, 10, 20, 20), 2024)
    x = ch.H.ravel()
    n = x.size
    assert n >= 100_000
    assert abs(x.mean()) <= 3 / np.sqrt(n)
    assert abs(np.mean(np.abs(x) ** 2) - 1.0) <= 0.05
    assert abs(x.real.var() - 0.5) <= 0.03
    assert abs(x.imag.var() - 0.5) <= 0.03


def test_json_roundtrip():
    ch = sample_channel(make_config(2, 2, 3, 2), 3)
    data = json.loads(ch.to_json())
    assert set(data) == {"config", "seed", "matrices"}
    assert "1-2-2" in data["matrices"]
    # first entry of H_1^{11} as [re, im]
    first = data["matrices"]["1-1-1"][0][0]
    assert first == [ch.H[0, 0, 0, 0, 0].real, ch.H[0, 0, 0, 0, 0].imag]
    assert ChannelRealization.from_json(ch.to_json()) == ch
