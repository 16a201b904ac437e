"""Small-signal parameter extraction and synthesis.

Hybrid-pi topology used throughout: intrinsic core (g_m, g_ds between the
internal drain/source nodes; C_gs gate-source; C_gd gate-drain; C_gb gate
to ground) embedded in series R_g, R_d, R_s. Cold-FET extraction reads the
series resistances from the high-frequency real parts of Z (top decade of
the grid) and the capacitances from the low-frequency imaginary parts of Y
(bottom decade), per Dambrine-style reasoning.

Notes on identifiability with 2-port data only:

* Re(Z11 - Z12) carries a channel-distribution residual on top of R_g; it
  decays as 1/omega^2 in this lumped topology, so R_g is the intercept of
  a two-term fit a + b*(f_max/f)^2 and the b-term is reported as the
  fitted channel constant.
* C_gs and C_gb are parallel paths to ground at low frequency, so the
  Im(Y11+Y12)/omega partition is reported as C_gs and C_gb is the closure
  residual C_gg - C_gd - C_gs (zero for strong-inversion cold-FET data).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .device import DeviceGeometry
from .twoport import TwoPort, convert

RESISTANCE_KEYS = ("r_g", "r_d", "r_s")
SCALING_BASIS = ("1", "w_f/n_f", "1/(w_f*n_f)", "L/(w_f*n_f)")


@dataclass(frozen=True)
class SmallSignalSet:
    """Extracted parasitic and intrinsic hybrid-pi elements."""

    r_g: float                 # ohm
    r_d: float
    r_s: float
    c_gg: float                # F
    c_gd: float
    c_gb: float
    g_m: float = 0.0           # S
    g_ds: float = 0.0
    temperature: float = float("nan")
    flags: tuple = field(default_factory=tuple)
    diagnostics: dict | None = None

    @property
    def c_gs(self) -> float:
        return self.c_gg - self.c_gd - self.c_gb


def synth_small_signal(ss: SmallSignalSet, freqs) -> TwoPort:
    """Exact nodal synthesis of the hybrid-pi two-port (Y representation).

    Solves the 6-unknown branch/node system (vg, vd, vs, iG, iD, iS) per
    frequency, so zero series resistances are handled exactly: with all
    parasitics zero, Y21 = g_m - j*omega*C_gd at every grid point.
    """
    freqs = np.asarray(freqs, dtype=float)
    n = freqs.size
    w = 2.0 * np.pi * freqs
    c_gs = ss.c_gs

    a = np.zeros((n, 6, 6), dtype=complex)
    jw = 1j * w
    # vg + R_g*iG = v1 ; vd + R_d*iD = v2 ; vs - R_s*iS = 0
    a[:, 0, 0], a[:, 0, 3] = 1.0, ss.r_g
    a[:, 1, 1], a[:, 1, 4] = 1.0, ss.r_d
    a[:, 2, 2], a[:, 2, 5] = 1.0, -ss.r_s
    # KCL at gate-internal node
    a[:, 3, 0] = jw * (c_gs + ss.c_gd + ss.c_gb)
    a[:, 3, 1] = -jw * ss.c_gd
    a[:, 3, 2] = -jw * c_gs
    a[:, 3, 3] = -1.0
    # KCL at drain-internal node (g_m controlled by v_gs = vg - vs)
    a[:, 4, 0] = -jw * ss.c_gd + ss.g_m
    a[:, 4, 1] = jw * ss.c_gd + ss.g_ds
    a[:, 4, 2] = -(ss.g_ds + ss.g_m)
    a[:, 4, 4] = -1.0
    # KCL at source-internal node: iS (to ground) = current entering si
    a[:, 5, 0] = jw * c_gs + ss.g_m
    a[:, 5, 1] = ss.g_ds
    a[:, 5, 2] = -(jw * c_gs + ss.g_ds + ss.g_m)
    a[:, 5, 5] = -1.0

    rhs = np.zeros((n, 6, 2), dtype=complex)
    rhs[:, 0, 0] = 1.0    # excitation 1: v1 = 1, v2 = 0
    rhs[:, 1, 1] = 1.0    # excitation 2: v1 = 0, v2 = 1
    x = np.linalg.solve(a, rhs)

    mats = np.empty((n, 2, 2), dtype=complex)
    mats[:, 0, 0] = x[:, 3, 0]   # iG under excitation 1
    mats[:, 1, 0] = x[:, 4, 0]   # iD under excitation 1
    mats[:, 0, 1] = x[:, 3, 1]
    mats[:, 1, 1] = x[:, 4, 1]
    return TwoPort(freqs, mats, rep="Y")


def _window(freqs: np.ndarray, decades: float, top: bool) -> np.ndarray:
    if top:
        return freqs >= freqs[-1] / 10.0**decades
    return freqs <= freqs[0] * 10.0**decades


def coldfet_extract(
    net: TwoPort,
    temperature: float = float("nan"),
    r_window_decades: float = 1.0,
    c_window_decades: float = 1.0,
    negative_tolerance: float = 0.01,
) -> SmallSignalSet:
    """Cold-FET extraction of series resistances and gate capacitances.

    The input is the measured (or synthesized) network at the cold-FET
    bias (strong inversion, V_DS = 0). Works from any representation tag.
    Non-physical negative values beyond `negative_tolerance` (relative to
    the element scale) flag the result instead of raising.
    """
    z = convert(net, "Z").mats
    y = convert(net, "Y").mats
    freqs = net.freqs
    w = 2.0 * np.pi * freqs

    hi = _window(freqs, r_window_decades, top=True)
    lo = _window(freqs, c_window_decades, top=False)

    r_s = float(np.mean(z[hi, 0, 1].real))
    r_d = float(np.mean(z[hi, 1, 1].real)) - r_s
    # R_g: intercept of Re(Z11-Z12) = R_g + b*(f_max/f)^2 over the top decade
    yy = (z[hi, 0, 0] - z[hi, 0, 1]).real
    basis = np.column_stack([np.ones(hi.sum()), (freqs[-1] / freqs[hi]) ** 2])
    coef, *_ = np.linalg.lstsq(basis, yy, rcond=None)
    r_g = float(coef[0])
    r_ch_term = float(coef[1] * np.mean(basis[:, 1]))

    c_gg = float(np.mean(y[lo, 0, 0].imag / w[lo]))
    c_gd = float(np.mean(-y[lo, 0, 1].imag / w[lo]))
    c_gs = float(np.mean((y[lo, 0, 0] + y[lo, 0, 1]).imag / w[lo]))
    c_gb = c_gg - c_gd - c_gs
    g_m = float(np.mean(y[lo, 1, 0].real))
    g_ds = float(np.mean(y[lo, 1, 1].real))

    flags = []
    r_scale = max(abs(r_g), abs(r_d), abs(r_s), 1.0)
    c_scale = max(abs(c_gg), 1e-15)
    for name, val, scale in (
        ("r_g", r_g, r_scale), ("r_d", r_d, r_scale), ("r_s", r_s, r_scale),
        ("c_gg", c_gg, c_scale), ("c_gd", c_gd, c_scale),
    ):
        if val < -negative_tolerance * scale:
            flags.append(f"negative-{name}")
    if c_gg < c_gd + c_gb - negative_tolerance * c_scale:
        flags.append("capacitance-closure")

    return SmallSignalSet(
        r_g=r_g, r_d=r_d, r_s=r_s,
        c_gg=c_gg, c_gd=c_gd, c_gb=c_gb,
        g_m=g_m, g_ds=g_ds,
        temperature=temperature,
        flags=tuple(flags),
        diagnostics={
            "r_ch_term": r_ch_term,
            "n_points_r": int(hi.sum()),
            "n_points_c": int(lo.sum()),
        },
    )


@dataclass(frozen=True)
class FtResult:
    f_t: float          # Hz
    method: str         # measured-crossing | extrapolated


def ft_extract(net: TwoPort, slope_tolerance: float = 0.1) -> FtResult:
    """Unity-gain frequency of |H21|.

    If |H21| crosses 1 inside the grid, the crossing is log-log
    interpolated. Otherwise the -20 dB/decade single-pole region (log-log
    slope within `slope_tolerance` of -1) is extrapolated from its
    highest-frequency point via f_T = f * |H21|(f).
    """
    h = convert(net, "H").mats
    mag = np.abs(h[:, 1, 0])
    freqs = net.freqs

    above = mag >= 1.0
    for i in range(freqs.size - 1):
        if above[i] and not above[i + 1]:
            lm0, lm1 = np.log(mag[i]), np.log(mag[i + 1])
            t = lm0 / (lm0 - lm1)
            f_t = np.exp(np.log(freqs[i]) + t * (np.log(freqs[i + 1]) - np.log(freqs[i])))
            return FtResult(float(f_t), "measured-crossing")

    slope = np.gradient(np.log(mag), np.log(freqs))
    single_pole = np.abs(slope + 1.0) < slope_tolerance
    if not np.any(single_pole):
        raise ValueError(
            "|H21| has no unity crossing and no -20 dB/decade single-pole region"
        )
    i = int(np.flatnonzero(single_pole)[-1])
    return FtResult(float(freqs[i] * mag[i]), "extrapolated")


@dataclass(frozen=True)
class ParasiticScaling:
    """One global polynomial coefficient set per series resistance.

    Fixed basis per resistance: {1, w_f/n_f, 1/(w_f*n_f), L/(w_f*n_f)}
    with w_f the finger width (um) and n_f the finger count.
    """

    coeffs: dict                      # {"r_g"|"r_d"|"r_s": ndarray(4)}
    residuals: dict | None = None     # per-sample fit residuals
    flags: tuple = field(default_factory=tuple)

    def predict(self, geom: DeviceGeometry) -> dict:
        x = scaling_basis(geom)
        return {k: float(np.dot(self.coeffs[k], x)) for k in RESISTANCE_KEYS}


def scaling_basis(geom: DeviceGeometry) -> np.ndarray:
    wf, nf = geom.w_finger, geom.n_fingers
    return np.array([1.0, wf / nf, 1.0 / (wf * nf), geom.L / (wf * nf)])


def fit_parasitic_scaling(samples) -> ParasiticScaling:
    """Global least-squares fit of (geometry -> R_g, R_d, R_s) scaling laws.

    samples: iterable of (DeviceGeometry, SmallSignalSet). Requires at
    least as many distinct geometries as basis terms and a full-rank
    design matrix.
    """
    samples = list(samples)
    if len(samples) < len(SCALING_BASIS):
        raise ValueError(
            f"need >= {len(SCALING_BASIS)} samples, got {len(samples)}"
        )
    x = np.array([scaling_basis(g) for g, _ in samples])
    if np.linalg.matrix_rank(x) < len(SCALING_BASIS):
        raise ValueError("rank-deficient design matrix: geometries do not span the basis")

    coeffs, residuals = {}, {}
    flags = []
    for key in RESISTANCE_KEYS:
        yv = np.array([getattr(ss, key) for _, ss in samples])
        c, *_ = np.linalg.lstsq(x, yv, rcond=None)
        coeffs[key] = c
        residuals[key] = yv - x @ c
        if np.any(x @ c <= 0.0):
            flags.append(f"nonpositive-prediction-{key}")
    return ParasiticScaling(coeffs=coeffs, residuals=residuals, flags=tuple(flags))
