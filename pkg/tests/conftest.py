import pytest
from hypothesis import settings

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def reg():
    from selgame.suites import shipped_registry
    return shipped_registry()
