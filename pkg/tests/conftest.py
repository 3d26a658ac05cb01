import pytest

from padeinterp.quarkonium import REFERENCE_FITS, load_levels


@pytest.fixture(scope="session")
def levels():
    return load_levels()


@pytest.fixture(scope="session")
def second_order():
    return REFERENCE_FITS["unconstrained-2"]
