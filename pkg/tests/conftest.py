"""Shared fixtures for the allocsim test suite."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models.mechanism import Mechanism, RngSpec
from src.utils.config import config


@pytest.fixture(autouse=True)
def isolated_artifacts(tmp_path, monkeypatch):
    """Keep run logs and default outputs out of the working tree."""
    monkeypatch.setattr(config, "artifacts_dir", tmp_path / "artifacts")
    return tmp_path / "artifacts"


@pytest.fixture
def rng():
    return RngSpec(master_seed=12345)


@pytest.fixture(params=list(Mechanism), ids=lambda m: m.value)
def mechanism(request):
    return request.param


def sigma_bound(p: float, trials: int, sigmas: float = 4.0) -> float:
    """Tolerance for a Monte Carlo frequency around probability p."""
    return sigmas * max(p * (1.0 - p), 1.0 / trials) ** 0.5 / trials ** 0.5


def simulate_urn(n_list, reps, seed):
    """Draw counts of the urn process, straight from its definition."""
    rng = np.random.default_rng(seed)
    totals = np.zeros(reps, dtype=np.int64)
    for i in range(reps):
        left = list(rng.permutation(n_list[0]))
        draws = 0
        for good in n_list:
            threshold = sorted(left)[good - 1]
            while True:
                ball = left.pop()
                draws += 1
                if ball <= threshold:
                    break
        totals[i] = draws
    return totals
