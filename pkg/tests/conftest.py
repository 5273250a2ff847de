import os

import pytest
from hypothesis import HealthCheck, settings

from kreinreg.neutral import build_chi_system
from kreinreg.profile import default_profile

# derandomized for reproducible runs; KREINREG_EXAMPLES raises the example count
settings.register_profile(
    "kreinreg",
    deadline=None,
    derandomize=True,
    max_examples=int(os.environ.get("KREINREG_EXAMPLES", 40)),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kreinreg")


@pytest.fixture(scope="session")
def profile6():
    return default_profile(6)


@pytest.fixture(scope="session")
def sys6(profile6):
    return build_chi_system(profile6)
