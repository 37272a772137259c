// Test-side oracles, independent of the library implementation paths they
// check. Everything here favours obviousness over speed.
#ifndef AMBER_TESTS_ORACLES_HPP
#define AMBER_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Q_M(a,b) as the plain double series: outer Poisson(a^2/2) weights, inner
// Poisson(b^2/2) partial sums (the survival of the gamma count), both summed
// directly in long double until the neglected outer tail is < 1e-14.
inline double marcum_double_series(int m, double a, double b) {
    const long double x = 0.5L * static_cast<long double>(a) * a;
    const long double y = 0.5L * static_cast<long double>(b) * b;

    // inner partial sum: s(c) = sum_{j=0}^{c-1} e^-y y^j / j!
    auto inner = [&](long long count) {
        long double term = std::exp(-y);
        long double s = 0.0L;
        for (long long j = 0; j < count; ++j) {
            s += term;
            term *= y / static_cast<long double>(j + 1);
        }
        return s;
    };

    long double sum = 0.0L;
    long double w = std::exp(-x); // Poisson weight at k = 0
    long double cum = 0.0L;
    for (long long k = 0; k < 2000000; ++k) {
        sum += w * inner(m + k);
        cum += w;
        if (1.0L - cum < 1e-14L) break;
        w *= x / static_cast<long double>(k + 1);
    }
    return static_cast<double>(sum);
}

// composite Simpson on [a, b]
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// I_n(z) by its integral form, (1/pi) Int_0^pi e^{z cos t} cos(n t) dt
inline double bessel_i_integral(int n, double z, int points = 20001) {
    double v = simpson([&](double t) { return std::exp(z * std::cos(t)) * std::cos(n * t); },
                       0.0, 3.14159265358979323846, points);
    return v / 3.14159265358979323846;
}

// I_n(z) by direct power series in long double
inline double bessel_i_series(int n, double z) {
    const long double half = 0.5L * z;
    long double term = 1.0L;
    for (int i = 1; i <= n; ++i) term *= half / i; // (z/2)^n / n!
    long double sum = 0.0L;
    const long double q = half * half;
    for (int i = 0; i < 100000; ++i) {
        sum += term;
        term *= q / (static_cast<long double>(i + 1) * (n + i + 1));
        if (term < 1e-18L * sum) break;
    }
    return static_cast<double>(sum);
}

// K_0(z) by the integral representation Int_0^inf e^{-z cosh t} dt
inline double k0_integral(double z) {
    // e^{-z cosh T} < 1e-320 cutoff
    double t_max = std::acosh(745.0 / z + 1.0) + 2.0;
    return simpson([&](double t) { return std::exp(-z * std::cosh(t)); }, 0.0, t_max, 40001);
}

// one-sample Kolmogorov-Smirnov statistic; samples must be sorted
inline double ks_statistic(const std::vector<double>& sorted,
                           const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double F = cdf(sorted[i]);
        d = std::max(d, std::fabs((i + 1) / n - F));
        d = std::max(d, std::fabs(F - i / n));
    }
    return d;
}

// same, with the CDF tabulated on an ascending grid and interpolated linearly
inline double ks_statistic_grid(const std::vector<double>& sorted,
                                const std::vector<double>& grid_t,
                                const std::vector<double>& grid_f) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double t = sorted[i];
        double F;
        if (t <= grid_t.front()) {
            F = grid_f.front();
        } else if (t >= grid_t.back()) {
            F = grid_f.back();
        } else {
            auto it = std::upper_bound(grid_t.begin(), grid_t.end(), t);
            std::size_t j = static_cast<std::size_t>(it - grid_t.begin());
            double w = (t - grid_t[j - 1]) / (grid_t[j] - grid_t[j - 1]);
            F = grid_f[j - 1] + w * (grid_f[j] - grid_f[j - 1]);
        }
        d = std::max(d, std::fabs((i + 1) / n - F));
        d = std::max(d, std::fabs(F - i / n));
    }
    return d;
}

// asymptotic Kolmogorov tail probability Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}
inline double kolmogorov_tail(double lambda) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? term : -term);
        if (term < 1e-12) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

// two-sample KS statistic with asymptotic p-value
inline double two_sample_ks_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    double en = std::sqrt(na * nb / (na + nb));
    return kolmogorov_tail((en + 0.12 + 0.11 / en) * d);
}

} // namespace oracles

#endif
