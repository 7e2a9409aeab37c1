"""Shared fixtures: simulated samples and the planted-instrument table."""

import numpy as np
import pytest

from ivkit import Dataset, write_table
from ivkit.rng import make_generator, normal_draws
from ivkit.simulate import DgpConfig, generate

# Generator configuration for the planted-instrument fixture: moderate
# confounding so the true instrument clears the exclusion screen with
# margin (population correlations: corr(z,a)=2/3, corr(z,u)=0, partial
# corr(z,y|a) about -0.135).
PLANTED_CFG = DgpConfig(
    beta_ya=1.0, beta_yu=1.0, alpha_az=2.0, alpha_au=1.0,
    sigma_a=2.0, sigma_y=2.0, seed=99,
)
PLANTED_N = 8000


def build_planted_dataset() -> Dataset:
    """22-variable table: roles a/y/u, the valid instrument, 18 decoys.

    Decoys fail one screen each: pure noise is irrelevant, confounder
    proxies violate independence, outcome proxies violate independence
    and exclusion.
    """
    base = generate(PLANTED_CFG, PLANTED_N)
    z, u, a, y = base.select(["z", "u", "a", "y"])
    gen = make_generator(1234)
    cols: dict[str, np.ndarray] = {"a": a, "y": y, "u": u, "zstar": z}
    for i in range(6):
        cols[f"noise{i + 1}"] = normal_draws(gen, PLANTED_N)
    for i in range(6):
        cols[f"uproxy{i + 1}"] = u + 0.5 * normal_draws(gen, PLANTED_N)
    for i in range(6):
        cols[f"yproxy{i + 1}"] = y + normal_draws(gen, PLANTED_N)
    return Dataset(tuple(cols), tuple(cols.values()))


@pytest.fixture(scope="session")
def dgp_100k() -> Dataset:
    return generate(DgpConfig(), 100_000)


@pytest.fixture(scope="session")
def dgp_cols(dgp_100k):
    z, u, a, y = dgp_100k.select(["z", "u", "a", "y"])
    return z, u, a, y


@pytest.fixture(scope="session")
def planted_dataset() -> Dataset:
    return build_planted_dataset()


@pytest.fixture(scope="session")
def planted_csv(planted_dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("fixtures") / "planted.csv"
    write_table(planted_dataset, path)
    return path


@pytest.fixture(scope="session")
def dgp_csv(dgp_100k, tmp_path_factory):
    path = tmp_path_factory.mktemp("fixtures") / "dgp100k.csv"
    write_table(dgp_100k, path)
    return path
