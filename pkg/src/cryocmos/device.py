"""Temperature-dependent MOSFET DC compact model.

Single-expression interpolated (EKV-flavoured) drain-current model with
closed-form temperature laws:

    T_eff  = sqrt(T^2 + t_sat^2)                   smooth cryogenic saturation
    phi_t  = kB * T_eff / q
    Vth(T) = vth0_298 + kappa_vth * (298 - T_eff) - dibl_eta * Vds
    mu(T)  = mu0_298 * (298 / T_eff)^gamma_mu
    Id     = 2 n mu Cox (W/L) phi_t^2
             * [ln^2(1 + e^u) - ln^2(1 + e^w)] / (1 + theta_mob * sp(Vov))
    u      = (Vgs - Vth) / (2 n phi_t),  w = u - Vds / (2 phi_t)

The mobility-degradation hinge sp(Vov) is a softplus of width phi_t whose
limit is max(Vov, 0); this keeps the expression infinitely smooth through
the weak/strong-inversion transition so the analytic gm/gds match central
finite differences everywhere.

Width-normalized series resistances (ohm*um) are folded in by plain
fixed-point correction of the terminal voltages (at most 10 iterations,
converged at 1e-9 relative current change); non-convergence is flagged on
the result, never silent.

Units: W, L in um; Cox in F/um^2; mobility in cm^2/Vs; currents in A.
PMOS cards are evaluated as their NMOS image with all voltages negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KB = 1.380649e-23     # J/K
QE = 1.602177e-19     # C
T_REF = 298.0         # K, reference temperature of the card parameters

_RSERIES_MAX_ITER = 10
_RSERIES_RTOL = 1e-9


@dataclass(frozen=True)
class DeviceGeometry:
    """Gate geometry: total width W = w_finger * n_fingers, both in um."""

    polarity: str
    W: float
    L: float
    n_fingers: int = 1
    w_finger: float | None = None

    def __post_init__(self):
        if self.polarity not in ("nmos", "pmos"):
            raise ValueError(f"polarity must be 'nmos' or 'pmos', got {self.polarity!r}")
        if not (self.W > 0 and self.L > 0):
            raise ValueError(f"W and L must be positive, got W={self.W}, L={self.L}")
        if self.n_fingers < 1:
            raise ValueError(f"n_fingers must be >= 1, got {self.n_fingers}")
        if self.w_finger is None:
            object.__setattr__(self, "w_finger", self.W / self.n_fingers)
        elif abs(self.w_finger * self.n_fingers - self.W) > 1e-9 * abs(self.W):
            raise ValueError(
                f"inconsistent geometry: w_finger*n_fingers = "
                f"{self.w_finger * self.n_fingers} != W = {self.W}"
            )

    @property
    def area(self) -> float:
        return self.W * self.L


@dataclass(frozen=True)
class BiasPoint:
    """Operating point (v_gs, v_ds, v_bs in V, temperature in K)."""

    v_gs: float
    v_ds: float
    temperature: float
    v_bs: float = 0.0

    def __post_init__(self):
        if not (4.0 <= self.temperature <= 400.0):
            raise ValueError(f"temperature must lie in [4, 400] K, got {self.temperature}")
        for name in ("v_gs", "v_ds", "v_bs"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class ModelCard:
    """Geometry-independent parameter set for one device type.

    v_bs is accepted by the evaluator but ignored (no body-effect data);
    velocity saturation is likewise not modeled.
    """

    polarity: str
    vth0_298: float          # V
    kappa_vth: float         # V/K, linear Vth drift vs (298 - T_eff)
    mu0_298: float           # cm^2/Vs
    gamma_mu: float          # mobility power-law exponent
    n_ideality: float        # subthreshold ideality (>= 1)
    cox_areal: float         # F/um^2
    t_sat: float = 30.0      # K, thermal-activation saturation temperature
    dibl_eta: float = 0.0    # V/V
    theta_mob: float = 0.0   # 1/V vertical-field degradation
    r_source: float = 0.0    # ohm*um, width-normalized
    r_drain: float = 0.0     # ohm*um
    schema_version: str = "1"

    def __post_init__(self):
        if self.polarity not in ("nmos", "pmos"):
            raise ValueError(f"polarity must be 'nmos' or 'pmos', got {self.polarity!r}")
        if not self.mu0_298 > 0:
            raise ValueError(f"mu0_298 must be positive, got {self.mu0_298}")
        if not self.cox_areal > 0:
            raise ValueError(f"cox_areal must be positive, got {self.cox_areal}")
        if not self.n_ideality >= 1.0:
            raise ValueError(f"n_ideality must be >= 1, got {self.n_ideality}")
        if not (0.0 < self.t_sat <= 100.0):
            raise ValueError(f"t_sat must lie in (0, 100] K, got {self.t_sat}")
        if self.r_source < 0 or self.r_drain < 0:
            raise ValueError("series resistances must be >= 0")


@dataclass(frozen=True)
class EvalResult:
    i_d: float               # A
    g_m: float               # S
    g_ds: float              # S
    ss: float                # mV/dec
    region: str              # subthreshold | transition | strong-inversion
    flags: tuple = field(default_factory=tuple)


def effective_temperature(temperature: float, t_sat: float) -> float:
    """Smooth effective temperature sqrt(T^2 + t_sat^2); floors at t_sat."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if not t_sat > 0:
        raise ValueError(f"t_sat must be positive, got {t_sat}")
    return math.hypot(temperature, t_sat)


def thermal_voltage(t_eff: float) -> float:
    """kB*T_eff/q in volts."""
    if not t_eff > 0:
        raise ValueError(f"t_eff must be positive, got {t_eff}")
    return KB * t_eff / QE


def vth(card: ModelCard, geom: DeviceGeometry, bias: BiasPoint) -> float:
    """Threshold voltage at the bias temperature including DIBL.

    For PMOS cards this is the NMOS-image value (positive for an
    enhancement device); the bias voltages are mirrored accordingly.
    """
    v_ds = bias.v_ds if card.polarity == "nmos" else -bias.v_ds
    return _vth_internal(card, bias.temperature, v_ds)


def _vth_internal(card: ModelCard, temperature: float, v_ds) -> float:
    t_eff = effective_temperature(temperature, card.t_sat)
    return card.vth0_298 + card.kappa_vth * (T_REF - t_eff) - card.dibl_eta * v_ds


def mobility(card: ModelCard, temperature: float) -> float:
    """Channel mobility mu0_298 * (298/T_eff)^gamma_mu in cm^2/Vs."""
    t_eff = effective_temperature(temperature, card.t_sat)
    return card.mu0_298 * (T_REF / t_eff) ** card.gamma_mu


def subthreshold_swing(card: ModelCard, geom: DeviceGeometry, temperature: float) -> float:
    """SS = n * phi_t(T_eff) * ln(10) in mV/dec; saturates as T -> 0."""
    t_eff = effective_temperature(temperature, card.t_sat)
    return card.n_ideality * thermal_voltage(t_eff) * math.log(10.0) * 1e3


def _sigmoid(x):
    # overflow-free logistic, full float range (tanh form saturates too early)
    e = np.exp(-np.abs(x))
    return np.where(np.asarray(x) >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _ids_core(card: ModelCard, geom: DeviceGeometry, v_gs, v_ds, temperature: float):
    """Intrinsic current and its partial derivatives (no series R).

    Inputs already in the NMOS frame. Accepts scalars or arrays; returns
    (i_d, dI/dv_gs, dI/dv_ds).
    """
    t_eff = effective_temperature(temperature, card.t_sat)
    phit = thermal_voltage(t_eff)
    n = card.n_ideality
    mu_um2 = mobility(card, temperature) * 1e8          # um^2 / Vs
    k_pre = 2.0 * n * mu_um2 * card.cox_areal * (geom.W / geom.L) * phit * phit

    vth_t = card.vth0_298 + card.kappa_vth * (T_REF - t_eff) - card.dibl_eta * v_ds
    vov = v_gs - vth_t
    u = vov / (2.0 * n * phit)
    w = u - v_ds / (2.0 * phit)

    fu = np.logaddexp(0.0, u)                            # ln(1 + e^u)
    fw = np.logaddexp(0.0, w)
    su = _sigmoid(u)                                     # dF/du
    sw = _sigmoid(w)
    bracket = fu * fu - fw * fw

    # softplus hinge of width phi_t; limit is max(vov, 0)
    sp = phit * np.logaddexp(0.0, vov / phit)
    sig = _sigmoid(vov / phit)
    den = 1.0 + card.theta_mob * sp

    i_d = k_pre * bracket / den

    eta = card.dibl_eta
    # d(vov)/dv_gs = 1, d(vov)/dv_ds = +eta (vth drops with v_ds)
    db_dvgs = (fu * su - fw * sw) / (n * phit)
    db_dvds = (fu * su * eta + fw * sw * (n - eta)) / (n * phit)
    dden_dvgs = card.theta_mob * sig
    dden_dvds = card.theta_mob * sig * eta

    g_m = k_pre * (db_dvgs * den - bracket * dden_dvgs) / (den * den)
    g_ds = k_pre * (db_dvds * den - bracket * dden_dvds) / (den * den)
    return i_d, g_m, g_ds


def ids_grid(card: ModelCard, geom: DeviceGeometry, v_gs, v_ds, temperature: float):
    """Vectorized drain-current evaluation over arrays of (v_gs, v_ds).

    Returns (i_d, g_m, g_ds, converged_mask). PMOS cards are mirrored to
    their NMOS image internally; reported magnitudes are positive in the
    device's own frame.
    """
    v_gs = np.asarray(v_gs, dtype=float)
    v_ds = np.asarray(v_ds, dtype=float)
    if not (np.all(np.isfinite(v_gs)) and np.all(np.isfinite(v_ds))):
        raise ValueError("bias voltages must be finite")
    if card.polarity == "pmos":
        v_gs, v_ds = -v_gs, -v_ds

    r_s = card.r_source / geom.W
    r_d = card.r_drain / geom.W

    i_d, f1, f2 = _ids_core(card, geom, v_gs, v_ds, temperature)
    converged = np.ones(np.broadcast(v_gs, v_ds).shape, dtype=bool)
    if r_s > 0.0 or r_d > 0.0:
        converged = np.zeros_like(converged)
        for _ in range(_RSERIES_MAX_ITER):
            i_new, f1, f2 = _ids_core(
                card, geom, v_gs - i_d * r_s, v_ds - i_d * (r_s + r_d), temperature
            )
            step_ok = np.abs(i_new - i_d) <= _RSERIES_RTOL * np.abs(i_new) + 1e-30
            i_d = i_new
            converged = converged | step_ok
            if np.all(step_ok):
                break
        denom = 1.0 + f1 * r_s + f2 * (r_s + r_d)
        f1 = f1 / denom
        f2 = f2 / denom
    return i_d, f1, f2, converged


def drain_current(card: ModelCard, geom: DeviceGeometry, bias: BiasPoint) -> EvalResult:
    """Evaluate the DC model at one bias point.

    i_d >= 0 for v_ds >= 0 in the device's own frame; g_m and g_ds are the
    analytic derivatives of the same expression (chain-ruled through the
    series-resistance correction).
    """
    i_d, g_m, g_ds, conv = ids_grid(card, geom, bias.v_gs, bias.v_ds, bias.temperature)
    flags = () if bool(np.all(conv)) else ("rseries-not-converged",)

    t_eff = effective_temperature(bias.temperature, card.t_sat)
    phit = thermal_voltage(t_eff)
    v_gs = bias.v_gs if card.polarity == "nmos" else -bias.v_gs
    v_ds = bias.v_ds if card.polarity == "nmos" else -bias.v_ds
    x = (v_gs - _vth_internal(card, bias.temperature, v_ds)) / (card.n_ideality * phit)
    if x < -3.0:
        region = "subthreshold"
    elif x > 3.0:
        region = "strong-inversion"
    else:
        region = "transition"

    ss = subthreshold_swing(card, geom, bias.temperature)
    return EvalResult(float(i_d), float(g_m), float(g_ds), ss, region, flags)


def off_current(card: ModelCard, geom: DeviceGeometry, temperature: float, v_ds: float) -> float:
    """Leakage current at v_gs = 0 for the given drain bias."""
    i_d, _, _, _ = ids_grid(card, geom, 0.0, v_ds, temperature)
    return float(i_d)


def nmos_image(card: ModelCard) -> ModelCard:
    """The NMOS card with identical parameters (PMOS mirror identity)."""
    from dataclasses import replace

    return replace(card, polarity="nmos")
