#include "amber/errors.hpp"
#include "amber/fading.hpp"
#include "amber/quadrature.hpp"
#include "amber/specfun.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

using namespace amber;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lemma-style 2-D oracle: both angles integrated explicitly, no reduction.
double joint_pdf_2d_oracle(double mu, double nu, const FadingParams& p) {
    const double beta = 0.5 * p.alpha_mag * p.sigma_h2;
    auto k0arg = [&](double th0, double th1) {
        double d2 = mu + nu - 2.0 * std::sqrt(mu * nu) * std::cos(th1 - th0);
        double d = std::sqrt(std::max(d2, 0.0)) / beta;
        return d > 0.0 ? bessel_k0(d) : 0.0;
    };
    double inner = integrate(
        [&](double th0) {
            return integrate([&](double th1) { return k0arg(th0, th1); }, 0.0, 2.0 * kPi,
                             {1e-12, 1e-9, 40, 12});
        },
        0.0, 2.0 * kPi, {1e-11, 1e-8, 40, 12});
    return std::exp(-mu / p.sigma_h2) / (kPi * p.sigma_h2) /
           (2.0 * kPi * std::pow(p.alpha_mag * p.sigma_h2, 2)) * inner;
}

double chi2_critical_p01(int dof) {
    // upper 1% point of a central chi-squared via bisection on gamma_q
    double lo = dof * 0.5, hi = dof * 3.0 + 50.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (gamma_q(dof / 2.0, mid / 2.0) > 0.01)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("alpha from attenuation") {
    CHECK(default_alpha_mag() == doctest::Approx(0.88104887300800843).epsilon(1e-14));
    CHECK(alpha_mag_from_attenuation_db(1.1, AttenuationConvention::power) ==
          doctest::Approx(std::pow(10.0, -1.1 / 40.0)).epsilon(1e-14));
}

TEST_CASE("sample_channel degenerate alpha collapses the hypotheses") {
    FadingParams p{1.0, 0.0};
    RngStream rng(7);
    for (int i = 0; i < 1000; ++i) {
        ChannelPair ch = sample_channel(rng, p);
        CHECK(ch.h0 == ch.h1);
        CHECK(ch.mu == ch.nu);
    }
}

TEST_CASE("sample_channel moments") {
    FadingParams p = FadingParams::standard();
    RngStream rng(11);
    const int n = 1000000;
    double sum_mu = 0.0, sum_nu = 0.0;
    for (int i = 0; i < n; ++i) {
        ChannelPair ch = sample_channel(rng, p);
        sum_mu += ch.mu;
        sum_nu += ch.nu;
    }
    CHECK(sum_mu / n == doctest::Approx(1.0).epsilon(0.01));
    // E[nu] = sigma_h2 + |alpha|^2 sigma_h2^2 = 1.776...
    double expect = 1.0 + p.alpha_mag * p.alpha_mag;
    CHECK(expect == doctest::Approx(1.7762).epsilon(1e-3));
    CHECK(sum_nu / n == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("channel magnitude invariants hold per draw") {
    FadingParams p = FadingParams::standard();
    RngStream rng(13);
    for (int i = 0; i < 1000; ++i) {
        ChannelPair ch = sample_channel(rng, p);
        CHECK(ch.mu == std::norm(ch.h0));
        CHECK(ch.nu == std::norm(ch.h1));
    }
}

TEST_CASE("joint_pdf_mu_nu domain") {
    FadingParams p = FadingParams::standard();
    CHECK_THROWS_AS(joint_pdf_mu_nu(0.0, 1.0, p), std::domain_error);
    CHECK_THROWS_AS(joint_pdf_mu_nu(1.0, -1.0, p), std::domain_error);
    CHECK_THROWS_AS(joint_pdf_mu_nu(1.0, 1.0, FadingParams{1.0, 0.0}), std::invalid_argument);
    CHECK(joint_pdf_mu_nu(1.0, 1.0, p) > 0.0); // diagonal itself is fine
}

TEST_CASE("joint density: angle reduction equals the raw 2-D form") {
    FadingParams p = FadingParams::standard();
    const double grid[][2] = {{0.3, 0.3},  {0.5, 1.9}, {1.0, 1.625}, {1.0, 0.625},
                              {2.0, 0.2},  {0.1, 3.0}, {1.3, 1.1},   {0.9, 1.0},
                              {2.5, 2.49}, {4.0, 0.8}};
    for (const auto& g : grid) {
        double fast = joint_pdf_mu_nu(g[0], g[1], p);
        double slow = joint_pdf_2d_oracle(g[0], g[1], p);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-6));
    }
}

TEST_CASE("joint density integrates to one") {
    FadingParams p = FadingParams::standard();
    const double mu_max = -std::log(1e-10);
    const double nu_max = nu_tail_bound(p);
    double mass = integrate(
        [&](double mu) {
            return integrate([&](double nu) { return joint_pdf_mu_nu(mu, nu, p); }, 0.0, nu_max,
                             {1e-9, 1e-7, 40, 14});
        },
        0.0, mu_max, {1e-8, 1e-6, 40, 14});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mu marginal of the joint density is exponential") {
    FadingParams p = FadingParams::standard();
    for (double mu : {0.7, 0.2, 2.0}) {
        double marg = integrate([&](double nu) { return joint_pdf_mu_nu(mu, nu, p); }, 0.0,
                                nu_tail_bound(p), {1e-10, 1e-8, 40, 14});
        CHECK(marg == doctest::Approx(std::exp(-mu)).epsilon(1e-6));
    }
}

TEST_CASE("nu marginal: normalization, sampling agreement, finite at 0+") {
    FadingParams p = FadingParams::standard();
    QuadConfig qc{1e-9, 1e-7, 40, 12};

    // normalization
    double nu_max = nu_tail_bound(p);
    double mass = integrate([&](double nu) { return marginal_pdf_nu(nu, p, qc); }, 0.0, nu_max,
                            {1e-7, 1e-5, 30, 12});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

    // finite (and small) near the origin, where K0 blows up only logarithmically
    double near0 = marginal_pdf_nu(1e-6, p, qc);
    CHECK(std::isfinite(near0));
    CHECK(near0 > 0.0);
    CHECK(near0 < 10.0);

    // KS of sampled nu against the tabulated marginal CDF
    const int n = 1000000;
    std::vector<double> samples(n);
    RngStream rng(21);
    for (int i = 0; i < n; ++i) samples[i] = sample_channel(rng, p).nu;
    std::sort(samples.begin(), samples.end());

    const int grid_n = 400;
    std::vector<double> grid_t(grid_n + 1), grid_f(grid_n + 1);
    grid_t[0] = 0.0;
    grid_f[0] = 0.0;
    double acc = 0.0;
    const GaussRule& rule = gauss_legendre(10);
    for (int i = 1; i <= grid_n; ++i) {
        double a = nu_max * (i - 1) / grid_n;
        double b = nu_max * i / grid_n;
        acc += gauss_panel([&](double nu) { return marginal_pdf_nu(nu, p, qc); }, a, b, rule);
        grid_t[i] = b;
        grid_f[i] = std::min(acc, 1.0);
    }
    double ks = oracles::ks_statistic_grid(samples, grid_t, grid_f);
    CHECK(ks < 0.01);
}

TEST_CASE("2-D histogram of samples matches joint density cell masses") {
    FadingParams p = FadingParams::standard();
    // 20x20 grid covering ~99% of the mass
    const int nb = 20;
    const double mu_hi = 4.7;
    const double nu_hi = 7.0;
    const int n = 1000000;

    std::vector<std::uint64_t> counts(nb * nb, 0);
    RngStream rng(31);
    std::uint64_t inside = 0;
    for (int i = 0; i < n; ++i) {
        ChannelPair ch = sample_channel(rng, p);
        if (ch.mu >= mu_hi || ch.nu >= nu_hi) continue;
        int bi = static_cast<int>(ch.mu / mu_hi * nb);
        int bj = static_cast<int>(ch.nu / nu_hi * nb);
        ++counts[bi * nb + bj];
        ++inside;
    }

    const GaussRule& rule = gauss_legendre(12);
    std::vector<double> prob(nb * nb, 0.0);
    double total_p = 0.0;
    for (int i = 0; i < nb; ++i) {
        double mu_a = mu_hi * i / nb, mu_b = mu_hi * (i + 1) / nb;
        for (int j = 0; j < nb; ++j) {
            double nu_a = nu_hi * j / nb, nu_b = nu_hi * (j + 1) / nb;
            double cell = gauss_panel(
                [&](double mu) {
                    return gauss_panel([&](double nu) { return joint_pdf_mu_nu(mu, nu, p); },
                                       nu_a, nu_b, rule);
                },
                mu_a, mu_b, rule);
            prob[i * nb + j] = cell;
            total_p += cell;
        }
    }
    CHECK(total_p > 0.98);

    // condition on the window for a clean multinomial chi-squared
    double chi2 = 0.0;
    int dof = -1;
    for (int c = 0; c < nb * nb; ++c) {
        double e = static_cast<double>(inside) * prob[c] / total_p;
        if (e < 5.0) continue; // standard sparse-cell exclusion
        double d = static_cast<double>(counts[c]) - e;
        chi2 += d * d / e;
        ++dof;
    }
    CHECK(dof > 300);
    CHECK(chi2 < chi2_critical_p01(dof));
}

TEST_CASE("h1 - h0 is independent of h0") {
    FadingParams p = FadingParams::standard();
    RngStream rng(41);
    const int n = 200000;
    std::vector<double> lo_group, hi_group;
    std::vector<std::pair<double, double>> draws(n);
    for (int i = 0; i < n; ++i) {
        ChannelPair ch = sample_channel(rng, p);
        draws[i] = {ch.mu, std::abs(ch.h1 - ch.h0)};
    }
    std::vector<double> mus(n);
    for (int i = 0; i < n; ++i) mus[i] = draws[i].first;
    std::nth_element(mus.begin(), mus.begin() + n / 2, mus.end());
    double median = mus[n / 2];
    for (int i = 0; i < n; ++i)
        (draws[i].first < median ? lo_group : hi_group).push_back(draws[i].second);
    CHECK(oracles::two_sample_ks_pvalue(lo_group, hi_group) > 0.01);
}

TEST_CASE("nu tail bound covers fresh samples and is cached") {
    FadingParams p = FadingParams::standard();
    double bound = nu_tail_bound(p);
    CHECK(bound == nu_tail_bound(p)); // cache hit returns the identical value
    RngStream rng(51);
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i)
        worst = std::max(worst, sample_channel(rng, p).nu);
    CHECK(worst < bound);
}
