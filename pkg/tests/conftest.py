import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def _mp_precision_guard():
    """Tests poke mp.prec for oracle computations; never leak it."""
    saved = mp.prec
    yield
    mp.prec = saved
