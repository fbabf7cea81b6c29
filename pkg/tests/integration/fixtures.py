"""
Fixtures needed for the integration tests.
"""
import pytest  # type: ignore
from fusionlab.ruledsl import catalog_names, load_catalog


@pytest.fixture
def catalog_rules():
    """
    Every catalog rule with its default parameters.
    """
    return [load_catalog(name) for name, _ in catalog_names()]


@pytest.fixture
def fibonacci_dpv():
    return load_catalog("fibonacci_dpv")


@pytest.fixture
def two_measures():
    return load_catalog("two_measures")
