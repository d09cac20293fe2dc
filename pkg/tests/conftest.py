"""Pytest configuration and shared fixtures."""

import shutil
import tempfile
from pathlib import Path

import pytest

from dilution_gt.config import Config, ConfigManager
from dilution_gt.gf2m import canonical_field
from dilution_gt.measurement import MeasurementMatrix
from dilution_gt.plan import ChernoffParams, NoiseParams, build_plan


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def temp_config_file(temp_dir):
    """Path of a config file inside the temporary directory."""
    return temp_dir / "config.json"


@pytest.fixture
def config_manager(temp_config_file):
    """Create a ConfigManager with temporary file."""
    return ConfigManager(temp_config_file)


@pytest.fixture
def sample_config():
    """A configuration that differs from the defaults in every field."""
    return Config(
        lambda_=0.25,
        xi=0.01,
        delta=0.01,
        theta0=0.05,
        theta1=0.02,
        verify_budget=1000,
        sim_budget=5000,
        matrix_budget=2000,
        workers=4,
        strict=True,
    )


@pytest.fixture
def gf8():
    """GF(8) with modulus x^3 + x + 1."""
    return canonical_field(3)


@pytest.fixture
def noiseless():
    return NoiseParams(0.0, 0.0)


@pytest.fixture
def high_noise():
    return NoiseParams(0.2, 0.1)


@pytest.fixture
def chernoff():
    return ChernoffParams(1 / 3, 0.001)


@pytest.fixture
def small_plan(high_noise, chernoff):
    """N = 16, up to 3 defectives, q=4 n=3 r=2 Reed-Solomon blocks."""
    return build_plan(16, 3, 0.001, high_noise, chernoff, rs=(4, 3, 2))


@pytest.fixture
def small_matrix(small_plan):
    return MeasurementMatrix(small_plan)


@pytest.fixture
def single_plan(high_noise, chernoff):
    """N = 2^10, one defective, delta = 0.01."""
    return build_plan(2**10, 1, 0.01, high_noise, chernoff)


# Configure pytest
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
