import numpy as np
import pytest

from mamec.config import SystemConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_config(**overrides) -> SystemConfig:
    """Compact scenario for fast solver-level tests."""
    base = dict(K=2, N_u=2, N_r=2, N_t=2, N_b=4, L=2, L_tilde=4, L_bar=2,
                bandwidth_hz=1e7)
    base.update(overrides)
    cfg = SystemConfig(**base)
    cfg.validate()
    return cfg
