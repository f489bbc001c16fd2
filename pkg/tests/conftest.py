"""
Pytest configuration and fixtures for Contraction Certificate Engine tests
"""

import pytest
import os
import sys
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add parent directory to Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cartan import load_gcm  # noqa: E402
from roots import create_root_system  # noqa: E402
from settings import SearchCaps, TreeSettings  # noqa: E402
from tree_simulator import create_tree  # noqa: E402
from weyl import create_weyl_group  # noqa: E402

CORPUS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'corpus'))


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS_DIR, name if name.endswith(".json") else f"{name}.json")


@pytest.fixture(scope="session")
def corpus():
    """Fixture loading a corpus GCM by name"""
    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = load_gcm(corpus_path(name))
        return cache[name]

    return load


@pytest.fixture(scope="session")
def weyl_group(corpus):
    """Fixture building the Weyl group of a corpus GCM by name"""
    return lambda name: create_weyl_group(corpus(name))


@pytest.fixture(scope="session")
def root_system(corpus):
    """Fixture building the root system of a corpus GCM by name"""
    return lambda name: create_root_system(corpus(name))


@pytest.fixture(scope="session")
def caps():
    """Fixture providing the default search caps, independent of the environment"""
    return SearchCaps()


@pytest.fixture(scope="session")
def tree_settings():
    """Fixture providing default tree settings"""
    return TreeSettings()


@pytest.fixture
def tree():
    """Fixture providing the degree-3 tree"""
    return create_tree(3)


def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests (may be slow)"
    )
    config.addinivalue_line(
        "markers", "slow: marks tests as slow running"
    )
    config.addinivalue_line(
        "markers", "acceptance: seeded end-to-end acceptance checks"
    )


def pytest_collection_modifyitems(config, items):
    """Automatically mark tests based on their names"""
    for item in items:
        # Mark integration tests
        if "integration" in item.nodeid.lower():
            item.add_marker(pytest.mark.integration)

        # Mark acceptance tests
        if "acceptance" in item.nodeid.lower():
            item.add_marker(pytest.mark.acceptance)
            item.add_marker(pytest.mark.slow)
