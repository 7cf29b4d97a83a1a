import pytest

from helpers import build_passive_cascade


@pytest.fixture
def passive_cascade_factory():
    return build_passive_cascade
