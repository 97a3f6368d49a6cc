import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ep_blowup.exceptions import InadmissibleDatumError
from ep_blowup.profiles import (AnalyticPair, GaussianPulse, Tabulated, critical_background,
                                datum_at, fd_weights, radial_grid, validate_profile)


class TestGaussian:
    def test_datum_at_one(self):
        d = datum_at(GaussianPulse(0.2), 1.0)
        g = 0.2 * math.exp(-0.5)
        assert (d.F0, d.u0) == (0.0, 0.0)
        assert d.G0 == pytest.approx(0.121306, abs=1e-6) and d.G0 == pytest.approx(g)
        assert d.v0 == pytest.approx(-g)
        assert d.r0 == 1.0

    def test_origin(self):
        d = datum_at(GaussianPulse(0.2), 0.0)
        assert (d.F0, d.G0, d.u0, d.v0) == (0.0, 0.2, 0.0, 0.0)

    @pytest.mark.parametrize("a", [0.0, 0.25, 0.3, -0.1])
    def test_rejects_amplitude(self, a):
        with pytest.raises(InadmissibleDatumError):
            GaussianPulse(a)

    @given(st.floats(1e-3, 0.249), st.floats(0, 20))
    def test_sign_properties(self, a, r):
        d = datum_at(GaussianPulse(a), r)
        assert d.u0 == 0 and d.v0 <= 0

    @given(st.floats(1e-3, 0.249), st.floats(0.01, 8))
    def test_v0_is_r_times_slope(self, a, r):
        g = lambda x: a * math.exp(-x * x / 2)  # noqa: E731
        h = 1e-5
        slope = (g(r + h) - g(r - h)) / (2 * h)
        assert datum_at(GaussianPulse(a), r).v0 == pytest.approx(r * slope, abs=1e-8)


class TestAnalytic:
    def test_linear_velocity(self):
        p = AnalyticPair.linear_velocity(0.7)
        for r in (0.0, 0.5, 3.0):
            d = datum_at(p, r)
            assert d.F0 == 0.7 and d.u0 == 0.0

    def test_zero_profile_at_origin(self):
        d = datum_at(AnalyticPair.zero(), 0.0)
        assert (d.u0, d.v0) == (0.0, 0.0)

    def test_divergence_identity(self):
        # V0 = r sin r: F0 = sin r, div V0 = 4 sin r + r cos r
        p = AnalyticPair(math.sin, lambda r: 0.0, math.cos, lambda r: 0.0)
        for r in np.linspace(0, 3, 7):
            d = datum_at(p, r)
            div = 4 * math.sin(r) + r * math.cos(r)
            assert d.u0 == pytest.approx(div - 4 * d.F0, abs=1e-12)

    def test_domain(self):
        p = AnalyticPair(lambda r: 0.0, lambda r: 0.0, lambda r: 0.0, lambda r: 0.0, r_max=2.0)
        with pytest.raises(ValueError):
            datum_at(p, 2.5)
        with pytest.raises(ValueError):
            datum_at(p, -0.1)

    def test_non_finite_limit(self):
        p = AnalyticPair(lambda r: 1 / r if r else math.inf, lambda r: 0.0,
                         lambda r: 0.0, lambda r: 0.0)
        with pytest.raises(ValueError):
            datum_at(p, 0.0)


class TestTabulated:
    def _gaussian_table(self, a, h, r_max=6.0):
        r = np.arange(0, r_max + h / 2, h)
        return Tabulated(r, np.zeros_like(r), a * r * np.exp(-r * r / 2))

    def test_matches_analytic_profile(self):
        tab = self._gaussian_table(0.2, 0.01)
        exact = GaussianPulse(0.2)
        for r in (0.0, 0.37, 1.0, 2.5, 5.99):
            t, e = datum_at(tab, r), datum_at(exact, r)
            assert t.G0 == pytest.approx(e.G0, abs=1e-8)
            assert t.v0 == pytest.approx(e.v0, abs=1e-6)

    def test_refinement_converges(self):
        exact = datum_at(GaussianPulse(0.2), 1.3)
        errs = []
        for h in (0.1, 0.05, 0.025):
            d = datum_at(self._gaussian_table(0.2, h), 1.3)
            errs.append(abs(d.v0 - exact.v0))
        # fourth order: halving h cuts the error by roughly 16
        assert errs[1] < errs[0] / 8 and errs[2] < errs[1] / 8

    def test_three_samples(self):
        tab = Tabulated([0.0, 0.5, 1.0], [0.0, 0.5, 1.0], [0.0, 0.0, 0.0])
        d = datum_at(tab, 0.5)
        assert d.F0 == pytest.approx(1.0) and d.u0 == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("r, V, E", [
        ([0, 1], [0, 1], [0, 1]),
        ([0, 2, 1], [0, 0, 0], [0, 0, 0]),
        ([-1, 0, 1], [0, 0, 0], [0, 0, 0]),
        ([0, 1, 2], [0, math.nan, 0], [0, 0, 0]),
        ([0, 1, 2], [0, 0], [0, 0, 0]),
    ])
    def test_rejects_bad_samples(self, r, V, E):
        with pytest.raises(ValueError):
            Tabulated(r, V, E)

    def test_csv(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("r,V0,E0\n0,0,0\n0.5,0.05,0.01\n1,0.1,0.02\n1.5,0.15,0.03\n2,0.2,0.04\n")
        tab = Tabulated.from_csv(path)
        d = datum_at(tab, 1.0)
        assert d.F0 == pytest.approx(0.1) and d.G0 == pytest.approx(0.02)
        assert d.u0 == pytest.approx(0, abs=1e-12)

    def test_csv_bad_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("r,V,E\n0,0,0\n")
        with pytest.raises(ValueError, match="header"):
            Tabulated.from_csv(path)

    def test_csv_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("r,V0,E0\n0,0,0\n1,x,0\n2,0,0\n")
        with pytest.raises(ValueError, match=":3:"):
            Tabulated.from_csv(path)


def test_fd_weights_exact_on_polynomials():
    x = np.array([0.0, 0.3, 0.7, 1.0, 1.6])
    w = fd_weights(x, 0.5, 1)
    for k in range(5):
        assert w @ x ** k == pytest.approx(k * 0.5 ** (k - 1) if k else 0.0, abs=1e-10)


class TestValidate:
    def test_gaussian_valid(self):
        assert validate_profile(GaussianPulse(0.2), radial_grid(6, 0.05)).ok

    def test_zero_valid(self):
        assert validate_profile(AnalyticPair.zero(), radial_grid(6, 0.05)).ok

    def test_reports_first_violation(self):
        # G0 = 0.1 r, so v0 = 0.1 r and the density 1 - 0.5 r fails first at r = 2
        p = AnalyticPair(lambda r: 0.0, lambda r: 0.1 * r, lambda r: 0.0, lambda r: 0.1)
        rep = validate_profile(p, radial_grid(6, 0.5))
        assert not rep.ok and rep.r0 == 2.0 and "density" in rep.reason

    def test_reports_field_bound(self):
        p = AnalyticPair(lambda r: 0.0, lambda r: 0.1 * r, lambda r: 0.0, lambda r: 0.0)
        rep = validate_profile(p, radial_grid(6, 0.5))
        assert not rep.ok and rep.r0 == 2.5 and "1/4" in rep.reason

    def test_reports_density(self):
        p = AnalyticPair(lambda r: 0.0, lambda r: 0.0, lambda r: 0.0, lambda r: 2.0)
        rep = validate_profile(p, [0.0, 1.0])
        assert not rep.ok and rep.r0 == 1.0 and "density" in rep.reason


def test_radial_grid():
    g = radial_grid(6, 0.05)
    assert len(g) == 121 and g[0] == 0 and g[-1] == pytest.approx(6)
    assert np.all(np.diff(g) > 0)
    with pytest.raises(ValueError):
        radial_grid(1, 0)


class TestCriticalBackground:
    def test_value(self):
        assert critical_background(0.01, 2) == pytest.approx(0.21)

    def test_origin(self):
        assert critical_background(3.0, 0) == 0.25

    @given(st.floats(1e-3, 10), st.floats(0, 10))
    def test_ode_residual(self, C, r):
        h = 1e-6
        slope = (critical_background(C, r + h) - critical_background(C, max(r - h, 0))) / (r + h - max(r - h, 0))
        resid = r * slope - 2 * critical_background(C, r) + 0.5
        assert abs(resid) < 1e-6 * (1 + C * r * r)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            critical_background(0, 1)
