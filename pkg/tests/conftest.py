import math

import pytest

from mellin_saddle import (build_positive_type, build_theorem3, ell_power,
                           gamma_shift, iterated_log, positive_type_factorial)


@pytest.fixture(scope="session")
def gamma0():
    """The factorial prototype gamma(s) = Gamma(s): K = e^{-t}, E = e^z."""
    return gamma_shift(0.0)


@pytest.fixture(scope="session")
def gamma1():
    """Gamma(s+1): moments (n+1)!, admissible on the whole ray."""
    return gamma_shift(1.0)


@pytest.fixture(scope="session")
def iterlog():
    """Scale L = log(s+e): gamma = exp(s loglog(s+e)), eps ~ 1/log rho."""
    return iterated_log(1.0, 1.0, 1, math.e)


@pytest.fixture(scope="session")
def theorem3_power():
    """Slowly-varying construction with ell = 1+rho from c = 1."""
    return build_theorem3(ell_power(1.0, 1.0))


@pytest.fixture(scope="session")
def factorial_measure():
    """Gamma(s+1) through its positive integral representation."""
    return build_positive_type(positive_type_factorial())
