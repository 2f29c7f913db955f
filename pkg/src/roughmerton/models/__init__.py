"""Model parameters and path simulation."""

from .bundle import PathBundle, read_binary
from .fbm import simulate_fbm
from .marchaud import factor_paths, factor_weights, h_weight, simulate_marchaud_factors
from .params import MarchaudParams, MarketParams, VolterraHestonParams
from .rng import BLOCK_SIZE, block_rng, mean_and_se, pair_average, run_blocks
from .simulate import (
    SCHEMES,
    simulate_cir,
    simulate_volterra_heston,
    simulate_wealth,
    strategy_values,
)

__all__ = [
    "BLOCK_SIZE",
    "MarchaudParams",
    "MarketParams",
    "PathBundle",
    "SCHEMES",
    "VolterraHestonParams",
    "block_rng",
    "factor_paths",
    "factor_weights",
    "h_weight",
    "mean_and_se",
    "pair_average",
    "read_binary",
    "run_blocks",
    "simulate_cir",
    "simulate_fbm",
    "simulate_marchaud_factors",
    "simulate_volterra_heston",
    "simulate_wealth",
    "strategy_values",
]
