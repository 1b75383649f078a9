"""Shared scenario builders for the test suite."""

import numpy as np
import pytest

from pvscm.domain import Scenario, TariffAndCostParams, validate_scenario
from pvscm.ingest import SeasonSpec, SyntheticSpec, generate_synthetic


def random_scenario(
    rng: np.random.Generator,
    n_d: int | None = None,
    steps_per_day: int = 24,
    demand_scale: float = 2.0,
    irr_scale: float = 1.0,
) -> Scenario:
    """Unstructured random scenario for property tests."""
    if n_d is None:
        n_d = int(rng.integers(2, 12))
    n_t = n_d * steps_per_day
    demand = rng.uniform(0, demand_scale, n_t)
    hours = np.arange(n_t) % steps_per_day
    window = (hours >= steps_per_day // 4) & (hours <= 3 * steps_per_day // 4)
    irr = np.where(window, rng.uniform(0, irr_scale, n_t), 0.0)
    return validate_scenario(demand, irr, steps_per_day=steps_per_day)


def random_params(
    rng: np.random.Generator, viable: bool | None = None
) -> TariffAndCostParams:
    """Random tariff/cost draw; pass viable=True/False to force the regime."""
    e_chg = rng.uniform(0.5, 1.0)
    e_dis = rng.uniform(0.5, 1.0)
    p_buy = rng.uniform(5, 50)
    threshold = p_buy * e_chg * e_dis
    if viable is True:
        p_sell = rng.uniform(0, 0.95 * threshold)
    elif viable is False:
        p_sell = threshold * rng.uniform(1.0, 2.0) + 0.1
    else:
        p_sell = rng.uniform(0, 1.5 * threshold)
    return TariffAndCostParams(
        c_pv_fixed=rng.uniform(1000, 30000),
        c_bat_fixed=rng.uniform(0, 10000),
        p_buy=p_buy,
        p_sell=p_sell,
        e_chg=e_chg,
        e_dis=e_dis,
        e_pv=rng.uniform(0.5, 0.95),
        m_pv_max=rng.uniform(0.5, 4.0),
        delta_p=rng.uniform(0.05, 0.5),
    )


def month_scenario(seed: int, months: int = 1) -> Scenario:
    """Synthetic scenario of 30-day months, each a winter/rainy/summer mix.

    Mirrors the construction of a representative month by taking ten days of
    each season, so n_t scales with `months` at a fixed day structure.
    """
    block = (
        SeasonSpec("winter", 10, irr_scale=0.6, demand_scale=1.5, cloudy_fraction=0.2),
        SeasonSpec("rainy", 10, irr_scale=0.35, demand_scale=0.9, cloudy_fraction=0.5),
        SeasonSpec("summer", 10, irr_scale=1.0, demand_scale=1.0, cloudy_fraction=0.1),
    )
    return generate_synthetic(SyntheticSpec(seed=seed, seasons=block * months))


@pytest.fixture
def base_params() -> TariffAndCostParams:
    return TariffAndCostParams()
