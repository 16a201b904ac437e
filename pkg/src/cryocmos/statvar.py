"""Global variation and local mismatch statistics.

Pelgrom mismatch sigma(dVth) = A_VTH / sqrt(W*L) with two channel-length
families split at L = 0.1 um (the A_VTH temperature ratio differs between
long and short channels), geometry-dependent global-variation widths
sigma_G = B/sqrt(W*L) + sigma0, deterministic seeded Monte Carlo card
sampling, and the relative-RMS model-accuracy metric.

All mismatch/variation sigmas are handled in mV (A_VTH and B in mV*um);
conversion to volts happens only when perturbing a card.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .device import DeviceGeometry, ModelCard

L_SPLIT_DEFAULT = 0.1      # um, short/long channel family boundary
PAIR_TO_DEVICE = 1.0 / math.sqrt(2.0)   # iid halves of a matched pair
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

MC_MODES = ("global-only", "mismatch-only", "both")


def _interp_table(table: dict, temperature: float, what: str):
    """Linear interpolation in T over a {T: value} table; no extrapolation."""
    if not table:
        raise ValueError(f"no {what} data available")
    temps = sorted(table)
    if temperature < temps[0] or temperature > temps[-1]:
        raise ValueError(
            f"{what}: T = {temperature} K outside tabulated range "
            f"[{temps[0]}, {temps[-1]}] K; extrapolation refused"
        )
    if temperature in table:
        return table[temperature]
    hi = next(t for t in temps if t > temperature)
    lo = temps[temps.index(hi) - 1]
    frac = (temperature - lo) / (hi - lo)
    vlo, vhi = table[lo], table[hi]
    if isinstance(vlo, tuple):
        return tuple(a + frac * (b - a) for a, b in zip(vlo, vhi))
    return vlo + frac * (vhi - vlo)


@dataclass(frozen=True)
class MismatchModel:
    """Pelgrom coefficients A_VTH in mV*um per temperature and L family."""

    a_vth_long: dict = field(default_factory=dict)    # {T: A_VTH}, L > l_split
    a_vth_short: dict = field(default_factory=dict)   # {T: A_VTH}, L <= l_split
    l_split: float = L_SPLIT_DEFAULT

    def __post_init__(self):
        for table in (self.a_vth_long, self.a_vth_short):
            if any(a <= 0 for a in table.values()):
                raise ValueError("all A_VTH coefficients must be positive")

    def family(self, L: float) -> str:
        return "short" if L <= self.l_split else "long"

    def a_vth(self, L: float, temperature: float) -> float:
        table = self.a_vth_short if self.family(L) == "short" else self.a_vth_long
        return _interp_table(table, temperature, f"A_VTH ({self.family(L)} family)")


@dataclass(frozen=True)
class VariationModel:
    """Global variation widths: sigma_G(W, L, T) = B(T)/sqrt(W*L) + sigma0(T).

    vth_by_t maps T -> (B in mV*um, sigma0 in mV); mu_rel_by_t maps
    T -> relative mobility sigma (dimensionless).
    """

    vth_by_t: dict = field(default_factory=dict)
    mu_rel_by_t: dict = field(default_factory=dict)

    def __post_init__(self):
        for b, s0 in self.vth_by_t.values():
            if b < 0 or s0 < 0:
                raise ValueError("variation widths must be >= 0")
        if any(s < 0 for s in self.mu_rel_by_t.values()):
            raise ValueError("variation widths must be >= 0")

    def sigma_g_vth(self, W: float, L: float, temperature: float) -> float:
        """Global Vth sigma in mV."""
        b, s0 = _interp_table(self.vth_by_t, temperature, "global Vth variation")
        return b / math.sqrt(W * L) + s0

    def sigma_g_mu_rel(self, temperature: float) -> float:
        return _interp_table(self.mu_rel_by_t, temperature, "global mobility variation")


def fwhm_from_sigma(sigma: float) -> float:
    """FWHM = 2*sqrt(2*ln 2)*sigma of a normal distribution."""
    return FWHM_PER_SIGMA * sigma


@dataclass(frozen=True)
class McConfig:
    n_samples: int
    master_seed: int
    mode: str = "both"

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.mode not in MC_MODES:
            raise ValueError(f"mode must be one of {MC_MODES}, got {self.mode!r}")


def pelgrom_sigma(model: MismatchModel, geom: DeviceGeometry, temperature: float) -> float:
    """Matched-pair sigma(dVth) = A_VTH / sqrt(W*L) in mV."""
    return model.a_vth(geom.L, temperature) / math.sqrt(geom.area)


def fit_pelgrom(pairs, temperature: float = 298.0, l_split: float = L_SPLIT_DEFAULT):
    """Fit Pelgrom slopes from (geometry, observed sigma(dVth) in mV) pairs.

    Least-squares slope through the origin in sigma vs 1/sqrt(W*L)
    coordinates, fitted per channel-length family. Returns
    (MismatchModel, diagnostics) where diagnostics carries the uncentered
    R^2 and point count per family.
    """
    groups = {"short": [], "long": []}
    for geom, sigma in pairs:
        fam = "short" if geom.L <= l_split else "long"
        groups[fam].append((1.0 / math.sqrt(geom.area), float(sigma)))

    tables = {"short": {}, "long": {}}
    diag = {}
    for fam, pts in groups.items():
        if not pts:
            continue
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        if np.unique(x).size < 2:
            raise ValueError(
                f"{fam} family needs >= 2 distinct 1/sqrt(W*L) abscissae, "
                f"got {np.unique(x).size}"
            )
        a = float(np.dot(x, y) / np.dot(x, x))
        ss_res = float(np.sum((y - a * x) ** 2))
        ss_tot = float(np.sum(y**2))
        tables[fam][temperature] = a
        diag[fam] = {
            "a_vth": a,
            "r2": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0,
            "n_points": len(pts),
        }
    if not diag:
        raise ValueError("no data points given")
    model = MismatchModel(
        a_vth_long=tables["long"], a_vth_short=tables["short"], l_split=l_split
    )
    return model, diag


@dataclass(frozen=True)
class DeltaVthStats:
    mean: float
    sigma: float
    v_min: float
    v_max: float
    n: int


def delta_vth_stats(vth_10k, vth_298k) -> DeltaVthStats:
    """Per-die dVth = Vth(10 K) - Vth(298 K): mean, unbiased sigma, range."""
    a = np.asarray(vth_10k, dtype=float)
    b = np.asarray(vth_298k, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"unpaired samples: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise ValueError(f"need >= 2 paired samples, got {a.size}")
    d = a - b
    return DeltaVthStats(
        mean=float(np.mean(d)),
        sigma=float(np.std(d, ddof=1)),
        v_min=float(np.min(d)),
        v_max=float(np.max(d)),
        n=int(d.size),
    )


def _sample_rng(master_seed: int, index: int) -> np.random.Generator:
    # substream contract: state depends on (master_seed, index) only
    return np.random.default_rng([master_seed, index])


def _draw_shifts(rng, geom, var, mm, temperature):
    """Fixed draw order so mode switches never shift other streams."""
    g_vth = rng.normal(0.0, var.sigma_g_vth(geom.W, geom.L, temperature) * 1e-3)
    g_mu = rng.normal(0.0, var.sigma_g_mu_rel(temperature))
    sig_dev = pelgrom_sigma(mm, geom, temperature) * PAIR_TO_DEVICE * 1e-3
    m_a = rng.normal(0.0, sig_dev)
    m_b = rng.normal(0.0, sig_dev)
    return g_vth, g_mu, m_a, m_b


def _perturb(base: ModelCard, mode: str, g_vth, g_mu, m_vth) -> ModelCard:
    use_g = mode in ("global-only", "both")
    use_m = mode in ("mismatch-only", "both")
    dvth = (g_vth if use_g else 0.0) + (m_vth if use_m else 0.0)
    mu_fac = 1.0 + (g_mu if use_g else 0.0)
    return replace(base, vth0_298=base.vth0_298 + dvth, mu0_298=base.mu0_298 * mu_fac)


def sample_cards(
    base: ModelCard,
    geom: DeviceGeometry,
    var: VariationModel,
    mm: MismatchModel,
    cfg: McConfig,
    temperature: float = 298.0,
) -> list:
    """Monte Carlo card sampling, one device per sample.

    Sample i draws its global (die-shared) shifts and its mismatch shift
    from a generator derived from (master_seed, i) only, so results are
    reproducible under any evaluation order or parallel schedule. The
    1/sqrt(2) factor converts the pair-difference Pelgrom sigma to a
    per-device sigma.
    """
    out = []
    for i in range(cfg.n_samples):
        g_vth, g_mu, m_a, _ = _draw_shifts(_sample_rng(cfg.master_seed, i), geom, var, mm, temperature)
        out.append(_perturb(base, cfg.mode, g_vth, g_mu, m_a))
    return out


def sample_card_pairs(
    base: ModelCard,
    geom: DeviceGeometry,
    var: VariationModel,
    mm: MismatchModel,
    cfg: McConfig,
    temperature: float = 298.0,
) -> list:
    """Matched-pair sampling: both devices share the sample's global draw.

    The Vth difference of a pair then has sigma = pelgrom_sigma exactly.
    """
    out = []
    for i in range(cfg.n_samples):
        g_vth, g_mu, m_a, m_b = _draw_shifts(_sample_rng(cfg.master_seed, i), geom, var, mm, temperature)
        out.append(
            (
                _perturb(base, cfg.mode, g_vth, g_mu, m_a),
                _perturb(base, cfg.mode, g_vth, g_mu, m_b),
            )
        )
    return out


def relative_rms(i_model, i_ref, floor: float = 1e-10) -> float:
    """Relative RMS deviation in percent over points with |i_ref| >= floor.

    The floor excludes noise-dominated deep-subthreshold points; both
    curves must be sampled on the same v_gs grid.
    """
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    i_model = np.asarray(i_model, dtype=float)
    i_ref = np.asarray(i_ref, dtype=float)
    if i_model.shape != i_ref.shape:
        raise ValueError(f"grid mismatch: {i_model.shape} vs {i_ref.shape}")
    mask = np.abs(i_ref) >= floor
    if not np.any(mask):
        raise ValueError(f"no reference points at or above the {floor} A floor")
    rel = (i_model[mask] - i_ref[mask]) / i_ref[mask]
    return float(np.sqrt(np.mean(rel * rel)) * 100.0)
