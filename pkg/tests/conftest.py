import numpy as np
import pytest

from kdevidence.model import NormalModelConfig, dataset_from_values, normal_model, normal_posterior_params
from kdevidence.sampling import rng_new, sample_normal

REF_CONFIG = NormalModelConfig(sigma=3.0, theta0=0.0, sigma0=10.0)


def ref_dataset(seed=1702):
    """25 draws from N(-1, 3^2), as in the default experiment."""
    return dataset_from_values(sample_normal(rng_new(seed), -1.0, 3.0, 25))


@pytest.fixture
def ref_config():
    return REF_CONFIG


@pytest.fixture
def ref_data():
    return ref_dataset()


@pytest.fixture
def ref_model():
    return normal_model(REF_CONFIG)


@pytest.fixture
def ref_posterior(ref_data):
    return normal_posterior_params(ref_data, REF_CONFIG)


def random_configs(count, seed):
    """Random (data, config) pairs covering small and large n and scales."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 60))
        cfg = NormalModelConfig(
            sigma=float(rng.uniform(0.2, 5.0)),
            theta0=float(rng.uniform(-10, 10)),
            sigma0=float(rng.uniform(0.2, 20.0)),
        )
        values = rng.normal(rng.uniform(-10, 10), cfg.sigma, size=n)
        out.append((dataset_from_values(values), cfg))
    return out


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
