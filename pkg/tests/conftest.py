from fractions import Fraction as F

import pytest

from hofbauer.diagram import build_truncation
from hofbauer.maps import cubic_neg_beta_parameter, golden_mean, make_beta, make_mod1, make_neg_beta
from hofbauer.spectral import mme_on_truncation


@pytest.fixture(scope="session")
def full_shift():
    return make_mod1(0, 2)


@pytest.fixture(scope="session")
def golden():
    return make_beta(golden_mean())


@pytest.fixture(scope="session")
def cubic():
    return make_neg_beta(cubic_neg_beta_parameter())


@pytest.fixture(scope="session")
def mod1_nonmarkov():
    return make_mod1(F(1, 10), F(5, 2))


@pytest.fixture(scope="session")
def full_model(full_shift):
    return mme_on_truncation(build_truncation(full_shift, 3))


@pytest.fixture(scope="session")
def golden_model(golden):
    return mme_on_truncation(build_truncation(golden, 5))


@pytest.fixture(scope="session")
def cubic_model(cubic):
    return mme_on_truncation(build_truncation(cubic, 10))
