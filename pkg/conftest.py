import os

import pytest

from lconsistency.densities import Gaussian
from lconsistency.projection import ModelSet

# avoid discovering tests in setup.py
collect_ignore = ["setup.py"]


@pytest.fixture(scope='session')
def yaml_dir() -> str:
    """directory of the bundled scenario files"""
    return os.path.join(os.path.dirname(__file__), 'yaml')


@pytest.fixture
def standard_normal() -> Gaussian:
    return Gaussian(0.0, 1.0)


@pytest.fixture
def shifted_gaussians() -> ModelSet:
    """M = {N(1,1), N(2,1)} with uniform prior;  r = N(0,1) is not in M"""
    return ModelSet.uniform([Gaussian(1.0, 1.0), Gaussian(2.0, 1.0)])


@pytest.fixture
def symmetric_gaussians() -> ModelSet:
    """M = {N(-1,1), N(1,1)};  both are L-projections of N(0,1)"""
    return ModelSet.uniform([Gaussian(-1.0, 1.0), Gaussian(1.0, 1.0)])
