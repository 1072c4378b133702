import pytest

from mdmtj import default_characterization
from mdmtj.network import BorderCondition


@pytest.fixture(scope="session")
def char():
    return default_characterization()


@pytest.fixture(scope="session")
def same_same():
    return BorderCondition.parse("same,same")


@pytest.fixture(scope="session")
def differ_differ():
    return BorderCondition.parse("differ,differ")
