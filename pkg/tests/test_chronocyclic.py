"""Grids, the two-photon source model, Fourier transforms, and Schmidt analysis."""

import math

import numpy as np
import pytest

import chronokey as ck


def _normalize(values, spacing):
    return values / math.sqrt(float((np.abs(values) ** 2).sum() * spacing))


class TestGrids:
    def test_midpoint_points_and_spacing(self):
        g = ck.FrequencyGrid(8, span=4.0)
        assert g.spacing == pytest.approx(1.0)
        assert np.allclose(g.points, np.arange(8) - 3.5)
        assert abs(g.points.sum()) < 1e-12

    def test_center_offsets_points(self):
        g = ck.FrequencyGrid(8, span=4.0, center=2.5)
        assert np.allclose(g.points, np.arange(8) - 3.5 + 2.5)

    @pytest.mark.parametrize("n", [0, 1, 3, 24, 100])
    def test_rejects_non_power_of_two_sizes(self, n):
        with pytest.raises(ck.ParameterError):
            ck.FrequencyGrid(n, span=4.0)

    @pytest.mark.parametrize("span", [0.0, -1.0])
    def test_rejects_non_positive_span(self, span):
        with pytest.raises(ck.ParameterError):
            ck.TimeGrid(64, span=span)

    def test_dual_grid_satisfies_exchange_relation(self):
        g = ck.FrequencyGrid(256, span=10.0)
        d = g.dual()
        # spacing product must equal 2*pi/n for the unitary transform pair
        assert d.spacing * g.spacing * 256 == pytest.approx(2.0 * math.pi, rel=1e-15)
        dd = d.dual()
        assert dd.span == pytest.approx(g.span, rel=1e-12)
        assert np.allclose(dd.points, g.points)


class TestTransform:
    def test_round_trip_restores_input(self):
        rng = np.random.default_rng(7)
        g = ck.FrequencyGrid(128, span=6.0)
        values = rng.normal(size=128) + 1j * rng.normal(size=128)
        tg, forward = ck.transform_1d(values, g, sign=-1)
        g2, back = ck.transform_1d(forward, tg, sign=+1)
        assert np.allclose(g2.points, g.points)
        assert np.abs(back - values).max() < 1e-9

    def test_transform_preserves_total_mass(self):
        rng = np.random.default_rng(11)
        g = ck.FrequencyGrid(256, span=8.0)
        values = _normalize(rng.normal(size=256) + 1j * rng.normal(size=256), g.spacing)
        tg, out = ck.transform_1d(values, g, sign=-1)
        mass = float((np.abs(out) ** 2).sum() * tg.spacing)
        assert mass == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_maps_to_reciprocal_width(self):
        sigma = 2.0
        g = ck.FrequencyGrid(512, span=16.0)
        values = _normalize(np.exp(-g.points**2 / (2 * sigma**2)) + 0j, g.spacing)
        tg, out = ck.transform_1d(values, g, sign=-1)
        intensity = np.abs(out) ** 2 * tg.spacing
        std = math.sqrt(float((intensity * tg.points**2).sum()))
        assert std == pytest.approx(1.0 / (sigma * math.sqrt(2.0)), rel=1e-6)

    def test_rejects_invalid_sign(self):
        g = ck.FrequencyGrid(64, span=4.0)
        with pytest.raises(ck.ParameterError):
            ck.transform_1d(np.zeros(64, dtype=complex), g, sign=2)


class TestSource:
    def test_amplitude_is_normalized_on_grid(self):
        jsa = ck.make_gaussian_jsa(delta_plus=6.0, delta_minus=1.0)
        mass = float((np.abs(jsa.amplitudes) ** 2).sum() * jsa.grid.spacing**2)
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_parametric_record_keeps_design_widths(self):
        jsa = ck.make_gaussian_jsa(delta_plus=6.0, delta_minus=1.0)
        assert jsa.kind == "parametric-gaussian"
        assert jsa.delta_plus == 6.0
        assert jsa.delta_minus == 1.0

    def test_default_grid_covers_and_resolves(self):
        for wide, narrow in [(12.0, 0.2), (6.0, 1.0), (1.0, 1.0)]:
            g = ck.default_grid(wide, narrow)
            assert g.n_points & (g.n_points - 1) == 0
            assert g.span >= 4.0 * max(wide, narrow) * (1 - 1e-12)
            assert g.spacing <= min(wide, narrow) / 8.0 * (1 + 1e-12)

    def test_rejects_grid_with_too_small_span(self):
        grid = ck.FrequencyGrid(1024, span=20.0)
        with pytest.raises(ck.GridCoverageError):
            ck.make_gaussian_jsa(delta_plus=12.0, delta_minus=0.2, grid=grid)

    def test_rejects_grid_too_coarse_for_correlation_width(self):
        grid = ck.FrequencyGrid(64, span=48.0)
        with pytest.raises(ck.GridCoverageError):
            ck.make_gaussian_jsa(delta_plus=12.0, delta_minus=0.2, grid=grid)

    @pytest.mark.parametrize("bad", [0.0, -2.0])
    def test_rejects_non_positive_widths(self, bad):
        with pytest.raises(ck.ParameterError):
            ck.make_gaussian_jsa(delta_plus=bad, delta_minus=1.0)

    def test_amplitudes_are_read_only(self):
        jsa = ck.make_gaussian_jsa(delta_plus=6.0, delta_minus=1.0)
        with pytest.raises(ValueError):
            jsa.amplitudes[0, 0] = 1.0


class TestSchmidt:
    # closed form (r + 1/r)/2 for a Gaussian amplitude with width ratio r
    @pytest.mark.parametrize(
        "wide,narrow,expected",
        [
            (1.0, 1.0, 1.0),
            (5.2, 1.0, 2.6961538461538462),
            (12.0, 0.2, 30.008333333333333),
        ],
    )
    def test_analytic_mode_count(self, wide, narrow, expected):
        assert ck.analytic_schmidt_number(wide, narrow) == pytest.approx(
            expected, rel=1e-12
        )

    def test_numeric_matches_analytic_within_a_percent(self):
        jsa = ck.make_gaussian_jsa(delta_plus=5.2, delta_minus=1.0)
        dec = ck.schmidt_decompose(jsa)
        assert dec.schmidt_number == pytest.approx(2.6961538461538462, rel=1e-2)
        sumsq = float((dec.singular_values**2).sum())
        assert sumsq == pytest.approx(1.0, abs=1e-6)
        assert np.all(np.diff(dec.singular_values) <= 1e-15)

    def test_separable_source_has_single_mode(self):
        jsa = ck.make_gaussian_jsa(delta_plus=1.0, delta_minus=1.0)
        dec = ck.schmidt_decompose(jsa)
        assert dec.schmidt_number == pytest.approx(1.0, abs=1e-10)
        assert dec.singular_values[0] == pytest.approx(1.0, abs=1e-8)

    def test_mode_count_is_symmetric_under_width_exchange(self):
        a = ck.schmidt_decompose(ck.make_gaussian_jsa(delta_plus=5.2, delta_minus=1.0))
        b = ck.schmidt_decompose(ck.make_gaussian_jsa(delta_plus=1.0, delta_minus=5.2))
        assert a.schmidt_number == pytest.approx(b.schmidt_number, rel=1e-9)


@pytest.fixture(scope="module")
def pair():
    jsa = ck.make_gaussian_jsa(delta_plus=5.2, delta_minus=1.0)
    return jsa, ck.to_temporal(jsa)


class TestTemporal:
    def test_transform_preserves_mass(self, pair):
        _, jta = pair
        mass = float((np.abs(jta.amplitudes) ** 2).sum() * jta.grid.spacing**2)
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_reciprocal_widths_are_recorded(self, pair):
        jsa, jta = pair
        assert jta.t_plus == pytest.approx(1.0 / jsa.delta_minus)
        assert jta.t_minus == pytest.approx(1.0 / jsa.delta_plus)

    def test_round_trip_through_time_domain(self, pair):
        jsa, jta = pair
        back = ck.from_temporal(jta)
        assert back.kind == "sampled"
        assert np.abs(back.amplitudes - jsa.amplitudes).max() < 1e-9

    def test_correlation_sign_flips_between_domains(self, pair):
        # anti-correlated frequencies arrive at correlated times
        jsa, jta = pair
        wf = jsa.grid.points
        wi = np.abs(jsa.amplitudes) ** 2
        cov_f = float((wi * np.outer(wf, wf)).sum()) / float(wi.sum())
        tf = jta.grid.points
        ti = np.abs(jta.amplitudes) ** 2
        cov_t = float((ti * np.outer(tf, tf)).sum()) / float(ti.sum())
        assert cov_f < 0.0
        assert cov_t > 0.0

    def test_fitted_widths_recover_design(self, designed16):
        _, source, _ = designed16
        wide, narrow = ck.fitted_spectral_widths(source)
        assert wide == pytest.approx(12.0, rel=1e-3)
        assert narrow == pytest.approx(0.2, rel=1e-3)
        jta = ck.to_temporal(source)
        long_axis, short_axis = ck.fitted_temporal_widths(jta)
        assert long_axis == pytest.approx(1.0 / 0.2, rel=1e-3)
        assert short_axis == pytest.approx(1.0 / 12.0, rel=1e-3)
