import time
import warnings

import numpy as np
import pytest

from confnav import scenarios
from confnav.geometry import point_in_free_space, workspace_from_dict
from confnav.koebe import fit_circles, run_koebe
from confnav.navigation import make_params


class Built:
    """A converged composite map with its sphere world and navigation parameters."""

    def __init__(self, schema, k=6, goal=0j):
        self.schema = schema
        self.ws = workspace_from_dict(schema)
        t0 = time.perf_counter()
        self.cm, self.report = run_koebe(self.ws)
        self.runtime = time.perf_counter() - t0
        self.sw = fit_circles(self.cm)
        self.nav = make_params(self.cm, goal, k=k)

    def free_points(self, n, seed=0, margin=0.0):
        """``n`` random free-space points with clearance above ``margin``."""
        from confnav.geometry import clearance
        rng = np.random.default_rng(seed)
        ext = self.ws.external.gamma
        lo = complex(ext.real.min(), ext.imag.min())
        hi = complex(ext.real.max(), ext.imag.max())
        out = []
        while len(out) < n:
            z = rng.uniform(lo.real, hi.real, 4 * n) + 1j * rng.uniform(lo.imag, hi.imag, 4 * n)
            z = z[point_in_free_space(self.ws, z)]
            if margin > 0:
                z = z[clearance(self.ws, z) > margin]
            out.extend(z.tolist())
        return np.array(out[:n])


@pytest.fixture(scope="session")
def three():
    return Built(scenarios.three_obstacles())


@pytest.fixture(scope="session")
def scene1():
    return Built(scenarios.scenario1())


@pytest.fixture(scope="session")
def scene2():
    return Built(scenarios.scenario2())


@pytest.fixture(scope="session")
def circular():
    return Built(scenarios.circular())


@pytest.fixture(scope="session")
def disk():
    return Built(scenarios.unit_disk())


@pytest.fixture
def no_near_boundary_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
