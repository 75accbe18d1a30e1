import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def gaussian_benchmark():
    """Caputo-form ABC run of exp(-25 x^2) on [-1, 1], gamma=0.8, lam=0.1."""
    from tempered_abc import GridSpec, InitialCondition, ModelParams, TimeGrid, solve_caputo_form

    params = ModelParams(1.0, 0.1, 0.8)
    grid = GridSpec(-1.0, 1.0, 200, TimeGrid(1.0, 400))
    ic = InitialCondition(lambda x: np.exp(-25.0 * x**2))
    return params, grid, ic, solve_caputo_form(params, grid, ic)
