#include "amber/errors.hpp"
#include "amber/quadrature.hpp"
#include "amber/rng.hpp"
#include "amber/specfun.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace amber;

TEST_CASE("central chi-squared density") {
    // k = 2 is exponential with rate 1/2
    CHECK(central_chi2_pdf(0.5, 2) == doctest::Approx(std::exp(-0.25) / 2.0).epsilon(1e-14));
    CHECK(central_chi2_pdf(-1.0, 4) == 0.0);
    CHECK(central_chi2_pdf(0.0, 4) == 0.0);
    // direct Definition-1 arithmetic at x = 3, k = 6: x^2 e^{-x/2} / (2^3 2!)
    CHECK(central_chi2_pdf(3.0, 6) ==
          doctest::Approx(9.0 * std::exp(-1.5) / 16.0).epsilon(1e-14));

    CHECK_THROWS_AS(central_chi2_pdf(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(central_chi2_pdf(0.0, 1), divergent_point_error);
    // k = 1 is fine away from the origin
    CHECK(central_chi2_pdf(0.25, 1) ==
          doctest::Approx(std::exp(-0.125) / (std::sqrt(2.0 * 3.14159265358979324 * 0.25)))
              .epsilon(1e-13));
}

TEST_CASE("bessel_i_log basics and accuracy") {
    CHECK(bessel_i_log(0, 0.0).value == 0.0);
    CHECK(bessel_i_log(1, 0.0).value == -std::numeric_limits<double>::infinity());
    CHECK(std::exp(bessel_i_log(0, 1.0).value) ==
          doctest::Approx(oracles::bessel_i_series(0, 1.0)).epsilon(1e-13));

    for (int n : {0, 1, 2, 5, 10, 40}) {
        for (double z : {0.05, 0.5, 2.0, 10.0, 30.0, 50.0}) {
            double mine = std::exp(bessel_i_log(n, z).value);
            double ref = oracles::bessel_i_series(n, z);
            CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("bessel_i_log series and integral forms agree") {
    for (int n = 0; n <= 10; ++n) {
        for (double z : {0.1, 1.0, 5.0, 12.0, 25.0, 50.0}) {
            double series = std::exp(bessel_i_log(n, z).value);
            double integral = oracles::bessel_i_integral(n, z);
            CHECK(series == doctest::Approx(integral).epsilon(1e-10));
        }
    }
}

TEST_CASE("bessel_i_log stays stable far past double overflow of I_n") {
    // leading Hankel asymptote I_n(z) ~ e^z / sqrt(2 pi z)
    for (double z : {1e3, 1e5, 1e6}) {
        double v = bessel_i_log(0, z).value;
        double asym = z - 0.5 * std::log(2.0 * 3.14159265358979324 * z);
        CHECK(std::isfinite(v));
        CHECK(v == doctest::Approx(asym).epsilon(1e-3));
        CHECK(v > bessel_i_log(3, z).value); // decreasing in order
    }
    CHECK(std::isfinite(bessel_i_log(1999, 1e6).value));
}

TEST_CASE("bessel_k0 against the integral representation") {
    CHECK(bessel_k0(1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-10));
    for (double z : {1e-8, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 400.0, 700.0}) {
        double ref = oracles::k0_integral(z);
        CHECK(bessel_k0(z) == doctest::Approx(ref).epsilon(1e-10));
    }
    // small-z asymptote -ln(z/2) - gamma_Euler, as a ratio
    const double euler = 0.57721566490153286;
    for (double z : {1e-6, 1e-8}) {
        double ratio = bessel_k0(z) / (-std::log(0.5 * z) - euler);
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-6));
    }
    // large-z asymptote sqrt(pi/(2 z)) e^{-z}
    double asym = std::sqrt(3.14159265358979324 / 200.0) * std::exp(-100.0);
    CHECK(bessel_k0(100.0) / asym == doctest::Approx(1.0).epsilon(1e-3));

    CHECK(bessel_k0(800.0) == 0.0); // graceful underflow
    CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k0(-1.0), std::domain_error);
}

TEST_CASE("regularized incomplete gamma") {
    for (double x : {0.1, 0.7, 2.0, 9.0}) {
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
        CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
        CHECK(gamma_p(3.0, x) + gamma_q(3.0, x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(gamma_q(4.0, 0.0) == 1.0);
    CHECK_THROWS_AS(gamma_p(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("marcum_q special values") {
    CHECK(marcum_q(1, 0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
    CHECK(marcum_q(3, 5.0, 0.0) == 1.0);
    // double-series oracle value for Q_1(1,1)
    double ref = oracles::marcum_double_series(1, 1.0, 1.0);
    CHECK(ref == doctest::Approx(0.73288).epsilon(1e-4)); // sanity on the oracle itself
    CHECK(marcum_q(1, 1.0, 1.0) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("marcum_q against the double-series oracle on a grid") {
    for (int m : {1, 2, 5, 20, 150}) {
        for (double a : {0.0, 0.3, 2.0, 8.0, 20.0}) {
            for (double b : {0.1, 1.0, 6.0, 15.0, 30.0}) {
                double ref = oracles::marcum_double_series(m, a, b);
                double mine = marcum_q(m, a, b);
                CHECK(std::fabs(mine - ref) < 1e-11);
            }
        }
    }
}

TEST_CASE("marcum_q monotonicity") {
    RngStream rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        int m = 1 + static_cast<int>(rng.uniform01() * 40);
        double a = rng.uniform01() * 12.0;
        double b = rng.uniform01() * 15.0;
        double q = marcum_q(m, a, b);
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        CHECK(marcum_q(m, a, b + 0.3) <= q + 1e-13);      // nonincreasing in b
        CHECK(marcum_q(m, a + 0.3, b) >= q - 1e-13);      // nondecreasing in a
        CHECK(marcum_q(m + 1, a, b) >= q - 1e-13);        // nondecreasing in M
    }
}

TEST_CASE("marcum_q identities") {
    // Q_M(a, 0) = 1 and Q_M(0, b) = upper tail of a central chi2(2M) at b^2
    for (int m : {1, 4, 30}) {
        for (double a : {0.0, 1.0, 7.0}) CHECK(marcum_q(m, a, 0.0) == 1.0);
        for (double b : {0.5, 2.0, 8.0}) {
            double tail = integrate(
                [&](double x) { return central_chi2_pdf(x, 2 * m); }, b * b,
                b * b + 8.0 * std::sqrt(4.0 * m) + 200.0, {1e-13, 1e-12, 50, 12});
            CHECK(marcum_q(m, 0.0, b) == doctest::Approx(tail).epsilon(1e-8));
        }
    }
}

TEST_CASE("marcum_q stays stable at large degree and argument") {
    // N = 1000 at 20 dB pushes M to 2000 and the arguments past 600
    const double a = std::sqrt(2.0 * 2000.0 * 100.0);
    double prev = 1.0;
    for (double b3 : {0.5 * a, 0.9 * a, a, 1.1 * a, 1.5 * a}) {
        double q = marcum_q(2000, a, b3);
        CHECK(std::isfinite(q));
        CHECK(q >= 0.0);
        CHECK(q <= prev + 1e-12); // nonincreasing in b
        prev = q;
    }
    // cross-check one point against quadrature of the noncentral density
    const int k = 4000;
    const double lambda = a * a;
    const double b = a; // threshold at the noncentrality scale
    double mean = k + lambda;
    double sd = std::sqrt(2.0 * (k + 2.0 * lambda));
    double lo = b * b;
    double hi = mean + 14.0 * sd;
    double tail = integrate(
        [&](double x) { return std::exp(noncentral_chi2_pdf_log(x, k, lambda).value); }, lo, hi,
        {1e-11, 1e-10, 50, 16});
    CHECK(marcum_q(2000, a, b) == doctest::Approx(tail).epsilon(1e-7));
}

TEST_CASE("noncentral chi-squared density basics") {
    CHECK_THROWS_AS(noncentral_chi2_pdf_log(1.0, 5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(noncentral_chi2_pdf_log(1.0, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(noncentral_chi2_pdf_log(1.0, 4, -1.0), std::invalid_argument);

    // lambda = 0 reduces exactly to the central density
    CHECK(noncentral_chi2_pdf_log(2.0, 4, 0.0).value == central_chi2_logpdf(2.0, 4).value);
    CHECK(noncentral_chi2_pdf_log(-3.0, 4, 1.0).value ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("noncentral chi-squared density integrates to one and has mean k+lambda") {
    {
        const int k = 40;
        const double lambda = 80.0;
        double hi = (k + lambda) + 14.0 * std::sqrt(2.0 * (k + 2.0 * lambda));
        double mass = integrate(
            [&](double x) { return std::exp(noncentral_chi2_pdf_log(x, k, lambda).value); },
            0.0, hi, {1e-11, 1e-10, 50, 14});
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    {
        const int k = 6;
        const double lambda = 3.0;
        double hi = (k + lambda) + 18.0 * std::sqrt(2.0 * (k + 2.0 * lambda));
        double mean = integrate(
            [&](double x) { return x * std::exp(noncentral_chi2_pdf_log(x, k, lambda).value); },
            0.0, hi, {1e-11, 1e-10, 50, 14});
        CHECK(mean == doctest::Approx(9.0).epsilon(1e-8));
    }
}

TEST_CASE("noncentral chi-squared: mixture and Bessel routes agree") {
    RngStream rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 2 * (1 + static_cast<int>(rng.uniform01() * 200));
        double lambda = rng.uniform01() * 500.0;
        double x = (k + lambda) * (0.2 + 1.6 * rng.uniform01());
        double a = noncentral_chi2_pdf_log(x, k, lambda).value;
        double b = noncentral_chi2_pdf_log_bessel(x, k, lambda).value;
        if (std::isfinite(a) || std::isfinite(b)) {
            CHECK(std::fabs(a - b) < 1e-9 * std::max(1.0, std::fabs(a)));
        }
    }
    // the huge-parameter corner that motivates the log-domain evaluation
    double a = noncentral_chi2_pdf_log(2.0e5, 300, 2.0e5).value;
    double b = noncentral_chi2_pdf_log_bessel(2.0e5, 300, 2.0e5).value;
    CHECK(std::isfinite(a));
    CHECK(std::fabs(a - b) < 1e-9 * std::fabs(a));
}

TEST_CASE("noncentral chi-squared CDF") {
    CHECK(noncentral_chi2_cdf(0.0, 8, 4.0) == 0.0);
    CHECK(noncentral_chi2_cdf(2.0, 2, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

    // Marcum bridge holds exactly by construction; pin it anyway
    for (double x : {1.0, 10.0, 25.0}) {
        double lhs = noncentral_chi2_cdf(x, 8, 4.0);
        double rhs = 1.0 - marcum_q(4, 2.0, std::sqrt(x));
        CHECK(std::fabs(lhs - rhs) < 1e-12);
    }

    // quadrature oracle at the spec point (x=10, k=8, lambda=4)
    double quad = integrate(
        [&](double x) { return std::exp(noncentral_chi2_pdf_log(x, 8, 4.0).value); }, 0.0, 10.0,
        {1e-12, 1e-11, 50, 14});
    CHECK(noncentral_chi2_cdf(10.0, 8, 4.0) == doctest::Approx(quad).epsilon(1e-8));

    // monotone nondecreasing in x
    double prev = 0.0;
    for (double x = 0.5; x < 40.0; x += 0.5) {
        double c = noncentral_chi2_cdf(x, 8, 4.0);
        CHECK(c >= prev - 1e-14);
        prev = c;
    }
}
