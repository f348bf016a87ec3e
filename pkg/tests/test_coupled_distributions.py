import math

import numpy as np
import pytest
from scipy import integrate, stats

from riskprofile.coupled_distributions import (
    CoupledExponential1D,
    CoupledGaussian1D,
    MultivariateCoupledGaussian,
    ce_pdf,
    cg_cdf,
    cg_normalization,
    cg_pdf,
    cg_sample,
    coupled_avg_identities,
    density_avg,
    density_gen_mean,
    mcg_pdf,
)
from riskprofile.errors import DivergentIntegralError, InputError, ParameterError

R_GRID = (-1.5, -0.9, -2 / 3, -0.15, 0.0, 0.6, 1.0, 3.0)
INV_SQRT_2PI_E = 1.0 / math.sqrt(2.0 * math.pi * math.e)


def _integrate_pdf(pdf, lo, hi, center):
    total = 0.0
    for a, b in ((lo, center), (center, hi)):
        val, _ = integrate.quad(pdf, a, b, epsabs=1e-13, epsrel=1e-11, limit=500)
        total += val
    return total


class TestUnivariateGaussian:
    def test_examples(self):
        std = CoupledGaussian1D(0.0, 1.0, 0.0)
        assert cg_pdf(std, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-15)
        assert cg_pdf(std, 1.0) == pytest.approx(INV_SQRT_2PI_E, rel=1e-15)
        assert cg_pdf(CoupledGaussian1D(0.0, 1.0, 1.0), 2.0) == 0.0
        assert CoupledGaussian1D(0.0, 1.0, 1.0).support == pytest.approx((-math.sqrt(3), math.sqrt(3)))

    def test_normalization_closed_forms(self):
        assert cg_normalization(0.0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-15)
        # mpmath quadrature of the unnormalized kernels
        assert cg_normalization(-2 / 3) == pytest.approx(2.82842712474619009760, rel=1e-14)
        assert cg_normalization(1.0) == pytest.approx(2.30940107675850305804, rel=1e-14)
        assert cg_normalization(1.0, 2.5) == pytest.approx(2.5 * 2.30940107675850305804, rel=1e-14)

    @pytest.mark.parametrize("r", R_GRID)
    def test_normalization_matches_quadrature(self, r):
        c = r / (2 + r)
        lo, hi = CoupledGaussian1D(0.0, 1.0, r).support

        def kernel(x):
            b = 1 - c * x * x
            return b ** (1 / r) if b > 0 else 0.0

        if r == 0:
            kernel = lambda x: math.exp(-0.5 * x * x)  # noqa: E731
        z = _integrate_pdf(kernel, lo, hi, 0.0)
        assert cg_normalization(r) == pytest.approx(z, rel=1e-8)

    @pytest.mark.parametrize("r", R_GRID)
    @pytest.mark.parametrize("mu,sigma", [(0.0, 1.0), (1.5, 0.3)])
    def test_integrates_to_one(self, r, mu, sigma):
        dist = CoupledGaussian1D(mu, sigma, r)
        lo, hi = dist.support
        assert _integrate_pdf(lambda x: cg_pdf(dist, x), lo, hi, mu) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("eps", [1e-3, -1e-3])
    def test_gaussian_limit(self, eps):
        x = np.linspace(-5, 5, 401)
        ref = stats.norm.pdf(x)
        err = np.max(np.abs(cg_pdf(CoupledGaussian1D(0.0, 1.0, eps), x) - ref))
        err_small = np.max(np.abs(cg_pdf(CoupledGaussian1D(0.0, 1.0, eps / 100), x) - ref))
        assert err < 1e-3
        assert err_small < err / 50

    @pytest.mark.parametrize("r", (-2 / 3, -0.15, 0.0, 0.6, 1.0))
    def test_cdf_matches_quadrature(self, r):
        dist = CoupledGaussian1D(0.3, 1.2, r)
        lo, _ = dist.support
        for x in (-1.0, 0.3, 1.1):
            val, _ = integrate.quad(lambda t: cg_pdf(dist, t), lo, x, epsabs=1e-13, epsrel=1e-11)
            assert cg_cdf(dist, x) == pytest.approx(val, abs=1e-9)

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            CoupledGaussian1D(0.0, 1.0, -2.0)
        with pytest.raises(ParameterError):
            CoupledGaussian1D(0.0, 0.0, 0.5)
        with pytest.raises(ParameterError):
            cg_normalization(-2.5)


class TestCoupledExponential:
    @pytest.mark.parametrize("r", (-0.5, -0.25, 0.0, 0.25, 0.5, 1.0))
    def test_integrates_to_one(self, r):
        dist = CoupledExponential1D(0.5, 2.0, r)
        lo, hi = dist.support
        val, _ = integrate.quad(lambda x: ce_pdf(dist, x), lo, hi, epsabs=1e-13, epsrel=1e-11, limit=500)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_zero_below_location(self):
        assert ce_pdf(CoupledExponential1D(0.0, 1.0, 0.0), -0.1) == 0.0
        assert ce_pdf(CoupledExponential1D(0.0, 1.0, 0.0), 0.0) == 1.0

    def test_domain(self):
        with pytest.raises(ParameterError):
            CoupledExponential1D(0.0, 1.0, -1.0)


class TestMultivariate:
    def test_mode(self):
        dist = MultivariateCoupledGaussian(np.zeros(2), np.eye(2), 0.0)
        assert mcg_pdf(dist, np.zeros(2)) == pytest.approx(1.0 / (2 * math.pi), rel=1e-15)

    def test_independence_factorization(self):
        rng = np.random.default_rng(3)
        var = np.array([0.5, 2.0, 1.3])
        mu = np.array([0.1, -1.0, 2.0])
        dist = MultivariateCoupledGaussian(mu, np.diag(var), 0.0)
        X = rng.normal(size=(50, 3))
        prod = np.prod([cg_pdf(CoupledGaussian1D(mu[i], math.sqrt(var[i]), 0.0), X[:, i])
                        for i in range(3)], axis=0)
        np.testing.assert_allclose(mcg_pdf(dist, X), prod, rtol=1e-12)

    def test_r_d_mapping(self):
        dist = MultivariateCoupledGaussian(np.zeros(3), np.eye(3), 0.25)
        assert dist.r_d == pytest.approx(-2 * 0.25 / (1 + 3 * 0.25), rel=1e-15)
        back = MultivariateCoupledGaussian.from_r(np.zeros(3), np.eye(3), dist.r_d)
        assert back.kappa == pytest.approx(0.25, rel=1e-14)

    def test_full_covariance_closed_form(self):
        A = np.array([[2.0, 0.6], [0.6, 1.0]])
        dist = MultivariateCoupledGaussian(np.zeros(2), A, 0.2)
        x = np.array([[0.3, -0.4], [1.0, 1.0]])
        q = np.einsum("ij,jk,ik->i", x, np.linalg.inv(A), x)
        r = dist.r_d
        p, c = -1 / r, -r / (2 + r)
        # d = 2 heavy tail: Z = pi B(1, p - 1) / c |A|^(1/2), B(1, p - 1) = 1 / (p - 1)
        z = math.pi / (p - 1) / c * math.sqrt(np.linalg.det(A))
        ref = (1 + c * q) ** -p / z
        np.testing.assert_allclose(mcg_pdf(dist, x), ref, rtol=1e-12)

    def test_plane_quadrature(self):
        dist = MultivariateCoupledGaussian(np.array([0.2, -0.1]), np.diag([1.0, 0.5]), 0.25)
        val, _ = integrate.dblquad(lambda y, x: mcg_pdf(dist, np.array([x, y])),
                                   -np.inf, np.inf, -np.inf, np.inf, epsabs=1e-10, epsrel=1e-8)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_three_dim_compact_quadrature(self):
        # symmetric about the origin: integrate one octant of the support ball
        dist = MultivariateCoupledGaussian(np.zeros(3), np.eye(3), -0.1)
        a = math.sqrt((2 + dist.r_d) / dist.r_d)
        val, _ = integrate.tplquad(
            lambda z, y, x: mcg_pdf(dist, np.array([x, y, z])),
            0, a,
            0, lambda x: math.sqrt(max(a * a - x * x, 0.0)),
            0, lambda x, y: math.sqrt(max(a * a - x * x - y * y, 0.0)),
            epsabs=1e-9, epsrel=1e-7)
        assert 8 * val == pytest.approx(1.0, abs=1e-5)

    def test_validation(self):
        with pytest.raises(ParameterError):
            MultivariateCoupledGaussian(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), 0.0)
        with pytest.raises(ParameterError):
            MultivariateCoupledGaussian(np.zeros(2), np.array([[1.0, 0.1], [0.0, 1.0]]), 0.0)
        with pytest.raises(ParameterError):
            MultivariateCoupledGaussian(np.zeros(2), np.eye(2), -0.5)
        # heavy tail too heavy to normalize in 3 dims
        with pytest.raises(ParameterError):
            MultivariateCoupledGaussian.from_r(np.zeros(3), np.eye(3), -0.9)
        dist = MultivariateCoupledGaussian(np.zeros(2), np.eye(2), 0.0)
        with pytest.raises(InputError):
            mcg_pdf(dist, np.zeros(3))


KS_N = 100_000
KS_BOUND = stats.kstwo.ppf(0.99, KS_N)


class TestSampling:
    def test_deterministic(self):
        dist = CoupledGaussian1D(0.0, 1.0, 0.6)
        np.testing.assert_array_equal(cg_sample(dist, 1000, seed=42), cg_sample(dist, 1000, seed=42))
        assert not np.array_equal(cg_sample(dist, 1000, seed=42), cg_sample(dist, 1000, seed=43))

    def test_gaussian_mean(self):
        x = cg_sample(CoupledGaussian1D(2.0, 3.0, 0.0), KS_N, seed=7)
        assert abs(x.mean() - 2.0) < 4 * 3.0 / math.sqrt(KS_N)

    def test_compact_inside_support(self):
        dist = CoupledGaussian1D(1.0, 0.5, 1.0)
        x, acc = cg_sample(dist, 10_000, seed=1, return_acceptance=True)
        lo, hi = dist.support
        assert np.all((x > lo) & (x < hi))
        assert 0 < acc <= 1

    @pytest.mark.parametrize("r", (-2 / 3, -0.15, 0.0, 0.6, 1.0))
    def test_ks_univariate(self, r):
        dist = CoupledGaussian1D(0.5, 1.5, r)
        x = cg_sample(dist, KS_N, seed=20171015)
        stat = stats.kstest(x, lambda t: cg_cdf(dist, t)).statistic
        assert stat < KS_BOUND

    @pytest.mark.parametrize("kappa", (0.3, 0.0, -0.1))
    def test_ks_radial_multivariate(self, kappa):
        # squared Mahalanobis radius: scaled F for heavy tails, Beta for compact, chi2 for Gaussian
        d = 3
        A = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])
        dist = MultivariateCoupledGaussian(np.array([1.0, 0.0, -1.0]), A, kappa)
        X = cg_sample(dist, KS_N, seed=99)
        diff = X - dist.mu
        q = np.einsum("ij,jk,ik->i", diff, np.linalg.inv(A), diff)
        r = dist.r_d
        if r == 0:
            cdf = stats.chi2(d).cdf
        elif r < 0:
            nu = -2 / r - d
            c = -r / (2 + r)
            cdf = lambda t: stats.f(d, nu).cdf(t * c * nu / d)  # noqa: E731
        else:
            c = r / (2 + r)
            cdf = lambda t: stats.beta(d / 2, 1 / r + 1).cdf(t * c)  # noqa: E731
        assert stats.kstest(q, cdf).statistic < KS_BOUND

    def test_invalid_n(self):
        with pytest.raises(InputError):
            cg_sample(CoupledGaussian1D(0.0, 1.0, 0.0), 0)


class TestAverages:
    def test_density_avg_closed_forms(self):
        std = CoupledGaussian1D(0.0, 1.0, 0.0)
        assert density_avg(lambda x: cg_pdf(std, x)) == pytest.approx(INV_SQRT_2PI_E, abs=1e-8)
        expo = CoupledExponential1D(0.0, 1.0, 0.0)
        assert density_avg(lambda x: ce_pdf(expo, x), expo.support) == pytest.approx(math.exp(-1), abs=1e-8)
        assert density_avg(lambda x: 0.5, (0.0, 2.0)) == pytest.approx(0.5, abs=1e-12)

    def test_density_avg_is_density_one_scale_out(self):
        dist = CoupledGaussian1D(0.7, 1.9, 0.0)
        avg = density_avg(lambda x: cg_pdf(dist, x), center=0.7)
        assert avg == pytest.approx(cg_pdf(dist, 0.7 + 1.9), rel=1e-8)

    def test_density_avg_rejects_unnormalized(self):
        with pytest.raises(InputError):
            density_avg(lambda x: 0.4, (0.0, 2.0))

    @pytest.mark.parametrize("r_D", (-2 / 3, -0.15, 0.0, 0.6, 1.0))
    @pytest.mark.parametrize("sigma", (0.5, 1.0, 2.0))
    def test_matched_generalized_mean(self, r_D, sigma):
        dist = CoupledGaussian1D(0.0, sigma, r_D)
        assert density_gen_mean(dist, r_D) == pytest.approx(cg_pdf(dist, sigma), rel=1e-5)

    def test_divergent_flagged(self):
        # nu = 2 tails ~ x**-3; f**0.1 is not integrable
        with pytest.raises(DivergentIntegralError):
            density_gen_mean(CoupledGaussian1D(0.0, 1.0, -2 / 3), 0.9)

    def test_identity_report(self):
        report = coupled_avg_identities()
        assert not report.any_flagged
        assert report.max_rel_dev < 1e-5
        rows = {(row.family, row.r_D, row.sigma): row for row in report.rows}
        assert rows[("exponential", 0.0, 1.0)].rhs == pytest.approx(math.exp(-1), rel=1e-15)
        assert rows[("exponential", 0.0, 1.0)].lhs == pytest.approx(math.exp(-1), rel=1e-8)
        assert rows[("gaussian", 0.0, 2.0)].lhs == pytest.approx(INV_SQRT_2PI_E / 2, rel=1e-8)
        assert rows[("gaussian", -0.5, 1.0)].rel_dev < 1e-5
