import pytest

from dpn.eliminator import prove_theorem_1, prove_theorem_2
from dpn.search import sieve_dpn


@pytest.fixture(scope="session")
def theorem1_trace():
    return prove_theorem_1()


@pytest.fixture(scope="session")
def theorem2_trace():
    return prove_theorem_2()


@pytest.fixture(scope="session")
def sieve_hits_1e7():
    """All deficient perfect numbers up to 10^7, from the divisor-sum sieve."""
    return sieve_dpn(10**7)
