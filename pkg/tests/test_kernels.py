import os
import subprocess
import sys

import numpy as np
import pytest

from ldpcqubo import kernels
from ldpcqubo._backend import DISABLE_ENV, HAVE_NUMBA
from ldpcqubo.channel import ChannelConfig, transmit
from ldpcqubo.codes import encode
from ldpcqubo.qubo import decoding_qubo
from ldpcqubo.samplers import AnnealSchedule

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def sa_inputs(h, g, seed, reads=16, sweeps=25):
    rng = np.random.default_rng(seed)
    rx = transmit(encode(rng.integers(0, 2, g.k), g), ChannelConfig(2.0), rng)
    q = decoding_qubo(rx.posteriors, h, 2.0, 1.0)
    indptr, indices, weights = q.csr
    keys = rng.integers(0, 2**63 - 1, reads).astype(np.uint64)
    init = kernels.initial_states(keys, q.num_vars)
    betas = AnnealSchedule(0.1, 10.0, sweeps, reads).betas()
    return indptr, indices, weights, np.asarray(q.linear, dtype=np.float64), betas, keys, init


def test_uniforms_in_open_unit_interval():
    keys = np.arange(10_000, dtype=np.uint64)
    u = kernels._uniforms_numpy(keys, 0)
    assert (u > 0).all() and (u < 1).all()
    assert abs(u.mean() - 0.5) < 0.01
    assert len(np.unique(u)) == u.size


@needs_numba
def test_uniform_streams_agree():
    keys = np.random.default_rng(0).integers(0, 2**63 - 1, 50).astype(np.uint64)
    for ctr in (0, 1, 12345, 10**9):
        ref = kernels._uniforms_numpy(keys, ctr)
        got = np.array([kernels._uniform_nb(k, ctr) for k in keys])
        np.testing.assert_array_equal(got, ref)


@needs_numba
@pytest.mark.parametrize("seed", range(4))
def test_sa_backends_bit_identical(h32, g32, seed):
    args = sa_inputs(h32, g32, seed)
    np.testing.assert_array_equal(kernels.sa_anneal_numba(*args), kernels.sa_anneal_numpy(*args))


@needs_numba
@pytest.mark.parametrize("snr_db", [-1.0, 1.0, 3.0])
def test_bp_backends_agree(h32, g32, snr_db):
    rng = np.random.default_rng(int(snr_db * 10) + 50)
    ptr, var = h32.edges
    for _ in range(20):
        rx = transmit(encode(rng.integers(0, 2, 16), g32), ChannelConfig(snr_db), rng)
        a = kernels.bp_flood_numba(rx.llr, ptr, var, 50)
        b = kernels.bp_flood_numpy(rx.llr, ptr, var, 50)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_allclose(a[1], b[1], rtol=1e-9, atol=1e-9)
        assert a[2:] == b[2:]


def test_initial_states_depend_only_on_own_key():
    keys = np.random.default_rng(1).integers(0, 2**63 - 1, 40).astype(np.uint64)
    full = kernels.initial_states(keys, 30)
    np.testing.assert_array_equal(kernels.initial_states(keys[5:9], 30), full[5:9])
    assert 0.4 < full.mean() < 0.6


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", None), ("", None)])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, **{DISABLE_ENV: flag})
    out = subprocess.run(
        [sys.executable, "-c", "import ldpcqubo; print(ldpcqubo.backend_name())"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    assert out == (expected or ("numba" if HAVE_NUMBA else "numpy"))
