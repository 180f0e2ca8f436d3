import numpy as np
import pytest

from dampedwave import (
    InitialCondition,
    ModelParams,
    SpectralConfig,
    dirichlet_eigenvalues,
    inverse_square_lambdas,
)


@pytest.fixture(scope="session")
def params():
    """Reference parameter point used throughout the study."""
    return ModelParams(a=1.0, b=0.2)


@pytest.fixture(scope="session")
def cfg10():
    """Ten-mode Dirichlet spectrum with inverse-square noise eigenvalues."""
    return SpectralConfig(
        n_modes=10, alphas=dirichlet_eigenvalues(10), lambdas=inverse_square_lambdas(10)
    )


@pytest.fixture(scope="session")
def x0_ones(cfg10):
    return InitialCondition.constant(cfg10.n_modes)


def random_spectral(rng: np.random.Generator, n_modes: int) -> SpectralConfig:
    """Random admissible spectrum: increasing alphas, positive lambdas."""
    alphas = np.cumsum(rng.uniform(0.5, 5.0, n_modes))
    lambdas = rng.uniform(0.1, 10.0, n_modes)
    return SpectralConfig(n_modes=n_modes, alphas=alphas, lambdas=lambdas)
