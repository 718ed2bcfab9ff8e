import numpy as np
import pytest

from stbcsim.channel import (ChannelBlock, NoiseSpec, apply, draw_channel, draw_channels,
                             make_streams)
from stbcsim.stbc import channel_energy


def test_rayleigh_statistics():
    rng = np.random.default_rng(1)
    H = draw_channels(2, 2, 250_000, rng)  # 10**6 coefficients
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.var(H.real) == pytest.approx(0.5, rel=0.01)
    flat = H.reshape(len(H), -1)
    corr = np.abs(np.corrcoef(flat.T))
    assert corr[~np.eye(4, dtype=bool)].max() < 0.01
    # mean energy per link is one
    assert np.mean(channel_energy(H)) / 4 == pytest.approx(1.0, abs=0.01)


def test_draw_channel_deterministic():
    a = draw_channel(3, 2, np.random.default_rng(7), block_index=4)
    b = draw_channel(3, 2, np.random.default_rng(7), block_index=4)
    assert isinstance(a, ChannelBlock) and a.block_index == 4
    assert np.array_equal(a.h, b.h)
    rng = np.random.default_rng(7)
    first, second = draw_channel(3, 2, rng), draw_channel(3, 2, rng)
    assert not np.array_equal(first.h, second.h)


def test_streams_are_independent_and_reproducible():
    s1, s2 = make_streams(5, 0, 1), make_streams(5, 0, 1)
    assert s1.channel.random() == s2.channel.random()
    draws = [make_streams(5, 0, 1).noise.random(), make_streams(5, 1, 1).noise.random(),
             make_streams(5, 0, 0).noise.random(), make_streams(6, 0, 1).noise.random()]
    assert len(set(draws)) == 4
    # consuming noise does not move the channel stream
    a, b = make_streams(9), make_streams(9)
    a.noise.standard_normal(1000)
    assert a.channel.random() == b.channel.random()


def test_noiseless_apply():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, 3)) + 0j
    h = draw_channel(3, 2, rng)
    assert np.array_equal(apply(x, h, None), x @ h.h)


def test_scalar_case():
    rng_a, rng_b = np.random.default_rng(3), np.random.default_rng(3)
    r = apply(np.array([[2.0 + 1j]]), np.array([[0.5j]]), NoiseSpec(0.1), rng_a)
    z = rng_b.standard_normal(2) * np.sqrt(0.1)
    assert r[0, 0] == pytest.approx((2 + 1j) * 0.5j + z[0] + 1j * z[1])


def test_pure_noise_variance_and_whiteness():
    rng = np.random.default_rng(11)
    x = np.zeros((250_000, 2, 2))
    r = apply(x, np.ones((2, 2)), NoiseSpec(0.3), rng)  # 10**6 complex samples
    assert np.var(r.real) == pytest.approx(0.3, rel=0.01)
    assert np.var(r.imag) == pytest.approx(0.3, rel=0.01)
    flat = r.reshape(len(r), -1)
    parts = np.concatenate([flat.real, flat.imag], axis=1)
    corr = np.abs(np.corrcoef(parts.T))
    assert corr[~np.eye(8, dtype=bool)].max() < 0.01


def test_errors():
    with pytest.raises(ValueError):
        NoiseSpec(0.0)
    with pytest.raises(ValueError):
        apply(np.ones((2, 3)), np.ones((2, 2)), None)
    with pytest.raises(ValueError):
        draw_channels(0, 1, 1, np.random.default_rng())
