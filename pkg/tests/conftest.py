import numpy as np
import pytest

from fieldroad import ModelParams, PeriodicCoefficient, homogeneous_logistic, logistic_reaction


@pytest.fixture
def unit_params():
    return ModelParams(D=1.0, d=1.0, mu=1.0, nu=1.0, L=1.0, R=2.0)


@pytest.fixture
def unit_reaction():
    return homogeneous_logistic(1.0, 1.0)


@pytest.fixture
def cosine_reaction():
    a = PeriodicCoefficient(period=1.0, mean=1.0, cos_amps=(0.5,))
    return logistic_reaction(a)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
