"""Cryogenic CMOS modeling toolkit: DC compact model, variation and
mismatch statistics, two-port RF algebra and extraction, DC parameter
fitting, and behavioral benchmark circuits over 10 K - 298 K."""

from .device import (
    BiasPoint,
    DeviceGeometry,
    EvalResult,
    ModelCard,
    drain_current,
    effective_temperature,
    ids_grid,
    mobility,
    off_current,
    subthreshold_swing,
    thermal_voltage,
    vth,
)
from .statvar import (
    DeltaVthStats,
    McConfig,
    MismatchModel,
    VariationModel,
    delta_vth_stats,
    fit_pelgrom,
    fwhm_from_sigma,
    pelgrom_sigma,
    relative_rms,
    sample_card_pairs,
    sample_cards,
)

__version__ = "0.1.0"
