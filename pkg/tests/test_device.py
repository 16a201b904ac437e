"""DC compact model tests: frozen oracle values, gradient checks, limits."""

import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest

from cryocmos.device import (
    KB,
    QE,
    BiasPoint,
    DeviceGeometry,
    ModelCard,
    drain_current,
    effective_temperature,
    ids_grid,
    mobility,
    nmos_image,
    off_current,
    subthreshold_swing,
    thermal_voltage,
    vth,
)
from cryocmos.demo import demo_geometry, demo_nmos_card, demo_pmos_card

NMOS = demo_nmos_card()
PMOS = demo_pmos_card()
GEOM = demo_geometry()


def oracle_ids(card, geom, v_gs, v_ds, temperature, dps=50):
    """Extended-precision evaluation of the same closed form (mpmath)."""
    with mp.workdps(dps):
        teff = mp.sqrt(mp.mpf(temperature) ** 2 + mp.mpf(card.t_sat) ** 2)
        phit = mp.mpf("1.380649e-23") * teff / mp.mpf("1.602177e-19")
        n = mp.mpf(card.n_ideality)
        mu = mp.mpf(card.mu0_298) * (298 / teff) ** mp.mpf(card.gamma_mu) * mp.mpf("1e8")
        k = 2 * n * mu * mp.mpf(card.cox_areal) * (mp.mpf(geom.W) / mp.mpf(geom.L)) * phit**2
        r_s = mp.mpf(card.r_source) / mp.mpf(geom.W)
        r_d = mp.mpf(card.r_drain) / mp.mpf(geom.W)

        def intrinsic(vg, vd):
            vth_t = (
                mp.mpf(card.vth0_298)
                + mp.mpf(card.kappa_vth) * (298 - teff)
                - mp.mpf(card.dibl_eta) * vd
            )
            vov = vg - vth_t
            u = vov / (2 * n * phit)
            w = u - vd / (2 * phit)
            fu = mp.log(1 + mp.exp(u))
            fw = mp.log(1 + mp.exp(w))
            sp = phit * mp.log(1 + mp.exp(vov / phit))
            return k * (fu**2 - fw**2) / (1 + mp.mpf(card.theta_mob) * sp)

        i = intrinsic(mp.mpf(v_gs), mp.mpf(v_ds))
        for _ in range(60):
            i_new = intrinsic(v_gs - i * r_s, v_ds - i * (r_s + r_d))
            if abs(i_new - i) <= mp.mpf("1e-30") * abs(i_new):
                i = i_new
                break
            i = i_new
        return float(i)


class TestEffectiveTemperature:
    def test_room_temperature(self):
        assert effective_temperature(298.0, 30.0) == pytest.approx(299.506, abs=1e-3)

    def test_cryo_point(self):
        assert effective_temperature(10.0, 30.0) == pytest.approx(math.sqrt(1000.0), rel=1e-12)

    def test_zero_limit_floors_at_t_sat(self):
        assert effective_temperature(1e-12, 30.0) == pytest.approx(30.0, rel=1e-12)

    def test_monotone_and_bounded_below(self):
        temps = np.linspace(1.0, 400.0, 100)
        te = [effective_temperature(t, 30.0) for t in temps]
        assert all(b > a for a, b in zip(te, te[1:]))
        assert all(t >= 30.0 for t in te)

    @pytest.mark.parametrize("bad", [0.0, -5.0])
    def test_nonpositive_temperature_rejected(self, bad):
        with pytest.raises(ValueError):
            effective_temperature(bad, 30.0)


class TestThermalVoltage:
    def test_room_temperature_constant(self):
        assert thermal_voltage(298.0) == pytest.approx(KB * 298.0 / QE, rel=1e-15)
        assert thermal_voltage(298.0) == pytest.approx(0.025680, abs=5e-7)

    def test_linearity(self):
        assert thermal_voltage(596.0) == pytest.approx(2.0 * thermal_voltage(298.0), rel=1e-15)

    def test_cryo_effective_point(self):
        assert thermal_voltage(math.sqrt(1000.0)) == pytest.approx(0.0027250, abs=1e-6)


class TestVth:
    def test_reference_temperature_near_vth0(self):
        b = BiasPoint(0.0, 0.0, 298.0)
        assert vth(NMOS, GEOM, b) == pytest.approx(NMOS.vth0_298, abs=1e-3)

    def test_cryo_shift_is_200mV(self):
        d = vth(NMOS, GEOM, BiasPoint(0, 0.0, 10.0)) - vth(NMOS, GEOM, BiasPoint(0, 0.0, 298.0))
        assert d == pytest.approx(0.200, abs=1e-12)

    def test_dibl_linear_shift(self):
        card = replace(NMOS, dibl_eta=0.05)
        hi = vth(card, GEOM, BiasPoint(0, 1.1, 298.0))
        lo = vth(card, GEOM, BiasPoint(0, 0.0, 298.0))
        assert lo - hi == pytest.approx(0.055, rel=1e-12)

    def test_pmos_mirrors_drain_bias(self):
        # PMOS operated at v_ds = -1.1 sees the same DIBL as its NMOS image at +1.1
        p = vth(PMOS, GEOM, BiasPoint(0, -1.1, 298.0))
        n = vth(nmos_image(PMOS), GEOM, BiasPoint(0, 1.1, 298.0))
        assert p == n


class TestMobility:
    def test_reference_point(self):
        assert mobility(NMOS, 298.0) == pytest.approx(NMOS.mu0_298, rel=1e-2)

    def test_power_law_point(self):
        card = replace(NMOS, gamma_mu=1.0)
        t = math.sqrt(149.0**2 - card.t_sat**2)   # T_eff = 149 K exactly
        assert mobility(card, t) == pytest.approx(2.0 * card.mu0_298, rel=1e-12)

    def test_cryo_enhancement_ordering(self):
        assert mobility(NMOS, 10.0) > mobility(NMOS, 77.0) > mobility(NMOS, 298.0)


class TestDrainCurrent:
    def test_zero_vds_gives_zero_exactly(self):
        for v_gs in (0.0, 0.3, 0.7, 1.1):
            assert drain_current(NMOS, GEOM, BiasPoint(v_gs, 0.0, 298.0)).i_d == 0.0

    def test_deep_subthreshold_slope(self):
        phit = thermal_voltage(effective_temperature(298.0, NMOS.t_sat))
        expected = 1.0 / (NMOS.n_ideality * phit * math.log(10.0))
        v = np.array([0.05, 0.051])
        i0 = drain_current(NMOS, GEOM, BiasPoint(v[0], 0.5, 298.0)).i_d
        i1 = drain_current(NMOS, GEOM, BiasPoint(v[1], 0.5, 298.0)).i_d
        slope = (math.log10(i1) - math.log10(i0)) / (v[1] - v[0])
        assert slope == pytest.approx(expected, rel=1e-3)

    def test_matches_extended_precision_oracle(self):
        b = BiasPoint(vth(NMOS, GEOM, BiasPoint(0, 1.1, 298.0)) + 0.5, 1.1, 298.0)
        got = drain_current(NMOS, GEOM, b).i_d
        want = oracle_ids(NMOS, GEOM, b.v_gs, b.v_ds, 298.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_oracle_with_series_resistance(self):
        card = replace(NMOS, r_source=20.0, r_drain=20.0)
        got = drain_current(card, GEOM, BiasPoint(1.0, 1.1, 298.0))
        want = oracle_ids(card, GEOM, 1.0, 1.1, 298.0)
        assert got.flags == ()
        assert got.i_d == pytest.approx(want, rel=1e-8)

    def test_nonconvergent_fixed_point_is_flagged(self):
        # huge series resistance makes the plain fixed point diverge
        card = replace(NMOS, r_source=500.0, r_drain=500.0)
        res = drain_current(card, GEOM, BiasPoint(1.1, 1.1, 10.0))
        assert "rseries-not-converged" in res.flags

    def test_nonfinite_bias_rejected(self):
        with pytest.raises(ValueError):
            ids_grid(NMOS, GEOM, np.array([0.5, np.nan]), 0.5, 298.0)

    def test_region_tags(self):
        assert drain_current(NMOS, GEOM, BiasPoint(0.0, 0.5, 298.0)).region == "subthreshold"
        assert drain_current(NMOS, GEOM, BiasPoint(1.1, 0.5, 298.0)).region == "strong-inversion"
        v = vth(NMOS, GEOM, BiasPoint(0, 0.5, 298.0))
        assert drain_current(NMOS, GEOM, BiasPoint(v, 0.5, 298.0)).region == "transition"

    def test_grid_eval_matches_scalar(self):
        v_gs = np.linspace(0, 1.1, 7)
        v_ds = np.full_like(v_gs, 0.6)
        i, gm, gds, _ = ids_grid(NMOS, GEOM, v_gs, v_ds, 77.0)
        for k, vg in enumerate(v_gs):
            r = drain_current(NMOS, GEOM, BiasPoint(vg, 0.6, 77.0))
            assert r.i_d == i[k] and r.g_m == gm[k] and r.g_ds == gds[k]


@pytest.mark.parametrize("temperature", [298.0, 10.0])
@pytest.mark.parametrize(
    "card",
    [NMOS, replace(NMOS, r_source=15.0, r_drain=15.0)],
    ids=["no-rseries", "rseries"],
)
def test_gradients_match_central_differences(card, temperature):
    """Analytic gm/gds vs central differences (h = 1e-5 V) within 1e-5 rel."""
    h = 1e-5
    rng = np.random.default_rng(7)
    v_gs = rng.uniform(0.05, 1.1, 40)
    v_ds = rng.uniform(0.05, 1.1, 40)
    i, gm, gds, conv = ids_grid(card, GEOM, v_gs, v_ds, temperature)
    assert np.all(conv)
    mask = i > 1e-12
    ip, *_ = ids_grid(card, GEOM, v_gs + h, v_ds, temperature)
    im, *_ = ids_grid(card, GEOM, v_gs - h, v_ds, temperature)
    gm_fd = (ip - im) / (2 * h)
    ip, *_ = ids_grid(card, GEOM, v_gs, v_ds + h, temperature)
    im, *_ = ids_grid(card, GEOM, v_gs, v_ds - h, temperature)
    gds_fd = (ip - im) / (2 * h)
    assert np.all(np.abs(gm[mask] - gm_fd[mask]) <= 1e-5 * np.abs(gm_fd[mask]))
    assert np.all(np.abs(gds[mask] - gds_fd[mask]) <= 1e-5 * np.abs(gds_fd[mask]))


def test_monotone_in_vgs_and_vds():
    v = np.linspace(0.0, 1.1, 50)
    vg, vd = np.meshgrid(v, v, indexing="ij")
    i, _, _, _ = ids_grid(NMOS, GEOM, vg, vd, 298.0)
    assert np.all(i >= 0.0)
    assert np.all(np.diff(i, axis=0) >= 0.0)   # increasing in v_gs
    assert np.all(np.diff(i, axis=1) >= 0.0)   # increasing in v_ds


def test_smooth_across_inversion_transition():
    """1 mV steps agree with the analytic midpoint log-derivative within 1%.

    A region-stitched model shows a kink here; a smooth one does not.
    """
    for temperature in (298.0, 10.0):
        v = np.arange(0.0, 1.1, 1e-3)
        i, _, _, _ = ids_grid(NMOS, GEOM, v, 0.6, temperature)
        im, gm_m, _, _ = ids_grid(NMOS, GEOM, (v[:-1] + v[1:]) / 2, 0.6, temperature)
        step = np.diff(np.log(i))
        pred = 1e-3 * gm_m / im
        assert np.max(np.abs(step - pred)) < 0.01


class TestSubthresholdSwing:
    def test_room_temperature_ideal(self):
        card = replace(NMOS, n_ideality=1.0, t_sat=1e-6)
        assert subthreshold_swing(card, GEOM, 298.0) == pytest.approx(59.13, abs=5e-3)

    def test_cryo_ordering(self):
        ss = [subthreshold_swing(NMOS, GEOM, t) for t in (10.0, 77.0, 298.0)]
        assert ss[0] < ss[1] < ss[2]

    def test_floor_value(self):
        card = replace(NMOS, n_ideality=1.0, t_sat=30.0)
        floor = math.log(10.0) * KB * 30.0 / QE * 1e3
        assert floor == pytest.approx(5.95, abs=5e-3)
        assert subthreshold_swing(card, GEOM, 1e-6) == pytest.approx(floor, rel=1e-9)

    def test_monotone_nondecreasing_in_t(self):
        temps = np.linspace(1.0, 400.0, 200)
        ss = [subthreshold_swing(NMOS, GEOM, t) for t in temps]
        assert all(b >= a for a, b in zip(ss, ss[1:]))


class TestOffCurrent:
    def test_zero_vds(self):
        assert off_current(NMOS, GEOM, 298.0, 0.0) == 0.0

    def test_cryo_suppression(self):
        ratio = off_current(NMOS, GEOM, 10.0, 1.1) / off_current(NMOS, GEOM, 298.0, 1.1)
        assert ratio < 1e-3

    def test_strictly_increasing_in_t(self):
        vals = [off_current(NMOS, GEOM, t, 1.1) for t in (10.0, 77.0, 150.0, 298.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_pmos_equals_mirrored_nmos_image():
    image = nmos_image(PMOS)
    geom_p = demo_geometry("pmos")
    for v_gs, v_ds, t in [(-0.8, -1.1, 298.0), (-1.1, -0.3, 10.0), (0.2, 0.5, 77.0)]:
        rp = drain_current(PMOS, geom_p, BiasPoint(v_gs, v_ds, t))
        rn = drain_current(image, geom_p, BiasPoint(-v_gs, -v_ds, t))
        assert (rp.i_d, rp.g_m, rp.g_ds, rp.region) == (rn.i_d, rn.g_m, rn.g_ds, rn.region)


class TestValidation:
    def test_geometry_consistency(self):
        g = DeviceGeometry("nmos", W=1.0, L=0.04, n_fingers=4)
        assert g.w_finger == pytest.approx(0.25)
        with pytest.raises(ValueError):
            DeviceGeometry("nmos", W=1.0, L=0.04, n_fingers=4, w_finger=0.3)
        with pytest.raises(ValueError):
            DeviceGeometry("nmos", W=-1.0, L=0.04)
        with pytest.raises(ValueError):
            DeviceGeometry("nfet", W=1.0, L=0.04)

    def test_bias_point_range(self):
        with pytest.raises(ValueError):
            BiasPoint(0.0, 0.0, 3.0)
        with pytest.raises(ValueError):
            BiasPoint(np.inf, 0.0, 300.0)

    def test_card_invariants(self):
        with pytest.raises(ValueError):
            ModelCard("nmos", 0.45, 1e-4, -1.0, 0.5, 1.1, 1e-14)
        with pytest.raises(ValueError):
            ModelCard("nmos", 0.45, 1e-4, 300.0, 0.5, 0.9, 1e-14)
        with pytest.raises(ValueError):
            ModelCard("nmos", 0.45, 1e-4, 300.0, 0.5, 1.1, 1e-14, t_sat=150.0)
