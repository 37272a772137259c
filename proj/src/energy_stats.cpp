#include "amber/energy_stats.hpp"
#include "amber/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace amber {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_gain(double gain) {
    if (!(gain >= 0.0) || !std::isfinite(gain))
        throw std::invalid_argument("energy_stats: gain must be finite and >= 0");
}

} // namespace

void validate(const LinkParams& link) {
    if (link.n_samples < 1)
        throw std::invalid_argument("LinkParams: n_samples must be >= 1");
    if (!(link.e_bar > 0.0) || !std::isfinite(link.e_bar))
        throw std::invalid_argument("LinkParams: e_bar must be positive");
    if (!(link.sigma2 > 0.0) || !std::isfinite(link.sigma2))
        throw std::invalid_argument("LinkParams: sigma2 must be positive");
}

LinkParams link_from_snr_db(int n_samples, double snr_db, double e_bar) {
    LinkParams link;
    link.n_samples = n_samples;
    link.e_bar = e_bar;
    link.sigma2 = e_bar / std::pow(10.0, snr_db / 10.0);
    validate(link);
    return link;
}

LogDensity cond_pdf_y_log(double t, double gain, const LinkParams& link) {
    validate(link);
    check_gain(gain);
    if (!(t > 0.0)) return {kNegInf};
    const double scale = 2.0 * link.n_samples / link.sigma2;
    const double lambda = scale * gain * link.e_bar;
    LogDensity base = noncentral_chi2_pdf_log(scale * t, 2 * link.n_samples, lambda);
    return {std::log(scale) + base.value};
}

double cond_pdf_y(double t, double gain, const LinkParams& link) {
    return std::exp(cond_pdf_y_log(t, gain, link).value);
}

double cond_cdf_y(double t, double gain, const LinkParams& link) {
    validate(link);
    check_gain(gain);
    if (!(t > 0.0)) return 0.0;
    const double scale = 2.0 * link.n_samples / link.sigma2;
    const double lambda = scale * gain * link.e_bar;
    return noncentral_chi2_cdf(scale * t, 2 * link.n_samples, lambda);
}

namespace {

double normal_pdf(double t, double mean, double var) {
    double d = t - mean;
    return std::exp(-0.5 * (d * d / var + std::log(var) + kLog2Pi));
}

} // namespace

double cond_pdf_y_gauss1(double t, double gain, const LinkParams& link) {
    validate(link);
    check_gain(gain);
    if (gain == 0.0)
        throw std::invalid_argument(
            "cond_pdf_y_gauss1: zero gain collapses the approximation variance");
    const double mean = gain * link.e_bar + link.sigma2;
    const double var = 2.0 * gain * link.e_bar * link.sigma2 / link.n_samples;
    return normal_pdf(t, mean, var);
}

double cond_pdf_y_gauss2(double t, double gain, const LinkParams& link) {
    validate(link);
    check_gain(gain);
    const double mean = gain * link.e_bar + link.sigma2;
    const double var =
        (2.0 * gain * link.e_bar * link.sigma2 + link.sigma2 * link.sigma2) / link.n_samples;
    return normal_pdf(t, mean, var);
}

} // namespace amber
