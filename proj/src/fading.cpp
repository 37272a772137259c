#include "amber/fading.hpp"
#include "amber/errors.hpp"
#include "amber/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace amber {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_params(const FadingParams& p, bool allow_zero_alpha) {
    if (!(p.sigma_h2 > 0.0) || !std::isfinite(p.sigma_h2))
        throw std::invalid_argument("FadingParams: sigma_h2 must be positive");
    double lo_ok = allow_zero_alpha ? (p.alpha_mag >= 0.0) : (p.alpha_mag > 0.0);
    if (!lo_ok || p.alpha_mag > 1.0 || !std::isfinite(p.alpha_mag))
        throw std::invalid_argument("FadingParams: alpha_mag must lie in (0, 1]");
}

} // namespace

double alpha_mag_from_attenuation_db(double att_db, AttenuationConvention conv) {
    if (!(att_db >= 0.0))
        throw std::invalid_argument("alpha_mag_from_attenuation_db: attenuation must be >= 0 dB");
    double e = (conv == AttenuationConvention::amplitude) ? att_db / 20.0 : att_db / 40.0;
    return std::pow(10.0, -e);
}

double default_alpha_mag() {
    return alpha_mag_from_attenuation_db(1.1, AttenuationConvention::amplitude);
}

ChannelPair channel_from_gains(double mu, double nu) {
    if (!(mu >= 0.0) || !(nu >= 0.0))
        throw std::invalid_argument("channel_from_gains: gains must be >= 0");
    ChannelPair ch;
    ch.h0 = {std::sqrt(mu), 0.0};
    ch.h1 = {std::sqrt(nu), 0.0};
    ch.mu = mu;
    ch.nu = nu;
    return ch;
}

ChannelPair sample_channel(RngStream& rng, const FadingParams& params) {
    check_params(params, /*allow_zero_alpha=*/true);
    std::complex<double> hr = rng.cgauss(params.sigma_h2);
    std::complex<double> ht = rng.cgauss(params.sigma_h2);
    std::complex<double> hb = rng.cgauss(params.sigma_h2);
    ChannelPair ch;
    ch.h0 = hr;
    ch.h1 = hr + params.alpha_mag * hb * ht;
    ch.mu = std::norm(ch.h0);
    ch.nu = std::norm(ch.h1);
    return ch;
}

namespace {

// integral over theta in [0, pi] of K0(sqrt(mu + nu - 2 sqrt(mu nu) cos t)/beta)
double angle_integral(double mu, double nu, double beta) {
    const double sm = std::sqrt(mu), sn = std::sqrt(nu);
    const double a2 = (sm - sn) * (sm - sn); // squared argument floor at theta = 0
    const double prod = sm * sn;

    // The integrand is flat below theta0 where the cos term stops mattering;
    // grade panels geometrically from pi down to about there (or down to the
    // log singularity when a2 == 0, i.e. mu == nu).
    int levels = 44;
    if (a2 > 0.0) {
        double theta0 = std::sqrt(a2 * 1e-6 / prod);
        if (theta0 > 1e-13) {
            levels = static_cast<int>(std::ceil(std::log2(kPi / theta0)));
            levels = std::clamp(levels, 3, 44);
        }
    }

    const GaussRule& rule = gauss_legendre(12);
    auto f = [&](double t) {
        double s2 = std::sin(0.5 * t);
        double d2 = a2 + 4.0 * prod * s2 * s2;
        double d = std::sqrt(std::max(d2, 0.0)) / beta;
        if (d <= 0.0) return 0.0; // only reachable at t == 0, removed by grading
        return bessel_k0(d);
    };

    double total = 0.0;
    double hi = kPi;
    for (int l = 0; l < levels; ++l) {
        double lo = hi * 0.5;
        total += gauss_panel(f, lo, hi, rule);
        hi = lo;
    }
    total += gauss_panel(f, 0.0, hi, rule);
    return total;
}

} // namespace

double joint_pdf_mu_nu(double mu, double nu, const FadingParams& params) {
    check_params(params, /*allow_zero_alpha=*/false);
    if (!(mu > 0.0) || !(nu > 0.0))
        throw std::domain_error("joint_pdf_mu_nu: defined on the open quadrant mu, nu > 0");
    const double beta = 0.5 * params.alpha_mag * params.sigma_h2;
    const double norm = 1.0 / (2.0 * kPi * params.sigma_h2 * beta * beta);
    return std::exp(-mu / params.sigma_h2) * norm * angle_integral(mu, nu, beta);
}

double marginal_pdf_nu(double nu, const FadingParams& params, const QuadConfig& qc) {
    check_params(params, /*allow_zero_alpha=*/false);
    if (!(nu > 0.0))
        throw std::domain_error("marginal_pdf_nu: nu must be > 0");
    const double mu_max = -params.sigma_h2 * std::log(1e-10);
    return integrate([&](double mu) { return joint_pdf_mu_nu(mu, nu, params); },
                     0.0, mu_max, qc);
}

double nu_tail_bound(const FadingParams& params) {
    check_params(params, /*allow_zero_alpha=*/false);
    static std::mutex mtx;
    static std::map<std::pair<double, double>, double> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(params.sigma_h2, params.alpha_mag);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // Empirical max of ~4.2e6 draws sits near the 1 - 2.4e-7 quantile; the
    // product-exponential tail stretches that by < 2x out at 1 - 1e-9.
    RngStream rng(0x5eedfad1u, 7);
    double vmax = 0.0;
    for (int i = 0; i < (1 << 22); ++i) {
        ChannelPair ch = sample_channel(rng, params);
        vmax = std::max(vmax, ch.nu);
    }
    double bound = 2.0 * vmax;
    cache.emplace(key, bound);
    return bound;
}

} // namespace amber
