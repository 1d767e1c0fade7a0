"""Exact front tracking and relative-entropy shock stability for 1-D scalar conservation laws."""

from shockstab.config import ConfigError, ScenarioConfig, load_config, parse_config
from shockstab.entropy import (
    JumpPair,
    ShockDatum,
    dbound_rhs,
    dissipation_rate,
    dissipation_rate_g_oracle,
    jump_entropy_cost,
    rel_entropy,
    rel_flux,
    split_terms,
)
from shockstab.flux import FluxModel, IntervalBounds, bounds_on_interval, shock_speed
from shockstab.fronttrack import PERSIST, RESOLVE, EventCapExceeded, PiecewiseLinearPath, Profile, run
from shockstab.measure import Cone, Rect, entropy_production, mu_mass, variation_formula_check
from shockstab.shift import construct_shift, drift, drift_energy
from shockstab.stability import StabilityReport, drift_check, relative_l2, run_scenario, theorem_check
from shockstab.verify import GridSpec, VerifyReport, estimate_sharp_constants, verify_dbound, verify_identities

__version__ = "0.1.0"
