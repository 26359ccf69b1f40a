import pytest
from hypothesis import HealthCheck, settings

from discountgap import DEFAULT_PARAMS, DEFAULT_SINLOG_PARAMS, Variant, make_triple

settings.register_profile(
    "suite",
    max_examples=200,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def triple():
    """Dyadic triple at the default parameter set (0.5, 1, 2, 1.6, 1)."""
    return make_triple(DEFAULT_PARAMS)


@pytest.fixture(scope="session")
def sinlog_triple():
    """Sin-log triple at its default (k0, d) = (0.25, 1)."""
    return make_triple(DEFAULT_SINLOG_PARAMS, Variant.SINLOG)
