"""GDP impact of natural-hazard power outages through static input-output models."""

from .errors import OutageIOError
from .ingest import load_mrio_bundle, load_outage_series, load_scenario, scenario_shock, write_mrio_bundle
from .models import MODELS, ImpactResult, RegionPartition, attribute_regions, run_critical_input, run_inoperability, run_leontief_ghosh, run_model
from .mrio import (
    GhoshSystem,
    InoperabilitySystem,
    LeontiefInverse,
    MrioTable,
    build_technical_coefficients,
    ghosh_output,
    ghosh_system,
    inoperability_system,
    leontief_delta,
    leontief_inverse,
    productiveness_check,
)
from .raster import BoundingBox, LuminosityGrid, MaskAOI, clip, difference, load_grid, normalize, percent_loss
from .report import SensitivityGrid, compare_validation, emit_report, parameterization_dispersion, run_grid, summary_stats
from .shocks import (
    METHODS,
    DemandShock,
    OutageSeries,
    ShockConstants,
    derive_value_per_consumer_hour,
    household_shock,
    integrate_consumer_hours,
    kwh_shock,
    luminosity_shock,
)

__version__ = "0.1.0"
