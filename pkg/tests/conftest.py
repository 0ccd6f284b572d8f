import numpy as np
import pytest

import smsec as S


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_instance(
    seed: int,
    n_tx: int = 4,
    n_b: int = 2,
    n_e: int = 2,
    M: int = 2,
    scheme: str = "psk",
    p1: float = 0.5,
    p2: float = 0.5,
    sigma2: float = 0.1,
    symmetric: bool = False,
):
    """One full random instance: channels, projector, powers, codebook, cache."""
    rng = np.random.default_rng(seed)
    H = S.sample_channel(rng, n_b, n_tx)
    G = H.copy() if symmetric else S.sample_channel(rng, n_e, n_tx)
    channels = S.ChannelPair(H=H, G=G)
    proj = S.an_projector(H)
    powers = S.PowerConfig(
        p_total=p1 + p2, p1=p1, p2=p2, sigma2_b=sigma2, sigma2_e=sigma2
    )
    codebook = S.make_codebook(M, scheme, n_tx)
    cache = S.build_cache(channels, proj, powers, codebook)
    return channels, proj, powers, codebook, cache


@pytest.fixture
def instance():
    return make_instance(seed=7)


@pytest.fixture
def symmetric_instance():
    """G = H, equal noise, no AN: both links bit-identical."""
    return make_instance(seed=11, p1=1.0, p2=0.0, symmetric=True)
