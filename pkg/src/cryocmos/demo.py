"""Synthetic demo cards, statistics models, and dataset generation.

Everything here is synthetic: cards are calibrated to reproduce the
qualitative cryogenic behaviour of a 40 nm low-power bulk process
(threshold rise of ~0.2 V from 298 K to 10 K, applied symmetrically to
NMOS and PMOS; mobility enhancement; subthreshold-swing floor) without
representing any measured wafer. Generated files carry a synthetic
provenance marker.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .device import DeviceGeometry, ModelCard, effective_temperature
from .statvar import MismatchModel, VariationModel

DVTH_CRYO = 0.200          # V, Vth(10 K) - Vth(298 K) target
DEMO_T_SAT = 25.0          # K
DEMO_TEMPS = (10.0, 77.0, 150.0, 220.0, 298.0)
DEMO_VDD = 1.1

# linear drift rate that lands the 0.2 V shift exactly on the Vth law
_KAPPA = DVTH_CRYO / (
    effective_temperature(298.0, DEMO_T_SAT) - effective_temperature(10.0, DEMO_T_SAT)
)


def demo_nmos_card() -> ModelCard:
    return ModelCard(
        polarity="nmos",
        vth0_298=0.45,
        kappa_vth=_KAPPA,
        mu0_298=300.0,
        gamma_mu=0.70,
        n_ideality=1.15,
        cox_areal=1.4e-14,
        t_sat=DEMO_T_SAT,
        dibl_eta=0.05,
        theta_mob=1.5,
        r_source=0.0,
        r_drain=0.0,
    )


def demo_pmos_card() -> ModelCard:
    # hole mobility: lower magnitude, weaker temperature exponent
    return ModelCard(
        polarity="pmos",
        vth0_298=0.45,
        kappa_vth=_KAPPA,
        mu0_298=120.0,
        gamma_mu=0.45,
        n_ideality=1.18,
        cox_areal=1.4e-14,
        t_sat=DEMO_T_SAT,
        dibl_eta=0.06,
        theta_mob=1.2,
        r_source=0.0,
        r_drain=0.0,
    )


def demo_card(polarity: str) -> ModelCard:
    return demo_nmos_card() if polarity == "nmos" else demo_pmos_card()


def demo_geometry(polarity: str = "nmos", W: float = 1.0, L: float = 0.1) -> DeviceGeometry:
    return DeviceGeometry(polarity=polarity, W=W, L=L)


def demo_mismatch_model() -> MismatchModel:
    # A_VTH ratios 10 K / 298 K pinned to 2.0 (long) and 1.5 (short)
    return MismatchModel(
        a_vth_long={298.0: 2.5, 10.0: 5.0},
        a_vth_short={298.0: 2.0, 10.0: 3.0},
    )


def demo_variation_model() -> VariationModel:
    return VariationModel(
        vth_by_t={298.0: (4.0, 5.0), 10.0: (8.0, 10.0)},
        mu_rel_by_t={298.0: 0.02, 10.0: 0.05},
    )


# Fig. 5-style gate aspect ratios, 0.12/0.04 um up to 1/1 um
PELGROM_GEOMETRIES = (
    (0.12, 0.04), (0.24, 0.04), (0.5, 0.04), (1.0, 0.04),
    (0.12, 0.06), (0.5, 0.06), (1.0, 0.06),
    (0.24, 0.1), (1.0, 0.1),
    (0.24, 0.24), (0.5, 0.5), (1.0, 0.5),
    (0.5, 1.0), (1.0, 1.0),
)
