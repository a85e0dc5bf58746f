import numpy as np
import pytest

from mmwsec.channel import ChannelDraw
from mmwsec.config import SystemConfig, derive_coeffs


def make_coeffs(cfg: SystemConfig, g_hat: float, g_check: float, u: float = 0.0, v: float = 0.0):
    return derive_coeffs(cfg, ChannelDraw(G_hat=g_hat, G_check=g_check, u=u, v=v))


def workable_cfg(**overrides) -> SystemConfig:
    """A configuration whose transmission region is comfortably non-empty."""
    base = dict(M=100, N_D=20, N_C=12, P_dBm=55.0, R_s=3.0, k_tx=0.1, k_rx=0.1)
    base.update(overrides)
    return SystemConfig(**base)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240801))
