"""Spreading speeds, critical habitat sizes and simulations for impulsive
reaction-advection-diffusion models."""

from impulse_front.analytic import (
    critical_size,
    equilibrium_nonspatial,
    measure_l,
    measure_m,
    ray_speed,
    speed,
    speed_local,
    speed_nonlocal,
)
from impulse_front.core import (
    BevertonHoltMap,
    Field,
    GaussianKernel,
    LinearGrowth,
    LinearMap,
    LogisticGrowth,
    ModelParams,
    PointMass,
    QuadraticGrowth,
    RickerMap,
    SkellamMap,
    net_growth,
    validate,
)
from impulse_front.hybrid import (
    classify_persistence,
    critical_length_search,
    estimate_speed,
    front_position,
    generation_P,
    generation_Q,
    initial_ball,
    run,
)
from impulse_front.oracle import OracleConfig, crosscheck_mgf, weinberger_speed
from impulse_front.season import Box, SeasonConfig, advance_dirichlet, advance_free

__version__ = "0.1.0"

__all__ = [
    "BevertonHoltMap", "Box", "Field", "GaussianKernel", "LinearGrowth", "LinearMap", "LogisticGrowth",
    "ModelParams", "OracleConfig", "PointMass", "QuadraticGrowth", "RickerMap", "SeasonConfig", "SkellamMap",
    "advance_dirichlet", "advance_free", "classify_persistence", "critical_length_search", "critical_size",
    "crosscheck_mgf", "equilibrium_nonspatial", "estimate_speed", "front_position", "generation_P",
    "generation_Q", "initial_ball", "measure_l", "measure_m", "net_growth", "ray_speed", "run", "speed",
    "speed_local", "speed_nonlocal", "validate", "weinberger_speed",
]
