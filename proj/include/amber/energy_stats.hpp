#ifndef AMBER_ENERGY_STATS_HPP
#define AMBER_ENERGY_STATS_HPP

#include "amber/specfun.hpp"

namespace amber {

// Per-link constants: sample length N, ambient average energy, and noise
// variance. The ratio e_bar / sigma2 is the link SNR.
struct LinkParams {
    int n_samples = 1;
    double e_bar = 1.0;
    double sigma2 = 1.0;

    double snr() const { return e_bar / sigma2; }
};

void validate(const LinkParams& link);

LinkParams link_from_snr_db(int n_samples, double snr_db, double e_bar = 1.0);

// Conditional law of the averaged received energy Y given the squared gain
// of the active hypothesis: a scaled noncentral chi-squared with 2N degrees
// of freedom and noncentrality 2 N gain e_bar / sigma2.
double cond_pdf_y(double t, double gain, const LinkParams& link);
LogDensity cond_pdf_y_log(double t, double gain, const LinkParams& link);
double cond_cdf_y(double t, double gain, const LinkParams& link);

// Gaussian approximations of the same law. The first replaces the noise
// chi-squared term by its mean (variance 2 gain e_bar sigma2 / N) and
// degenerates at gain = 0, which is rejected; the second keeps the noise
// variance (adds sigma2^2 / N).
double cond_pdf_y_gauss1(double t, double gain, const LinkParams& link);
double cond_pdf_y_gauss2(double t, double gain, const LinkParams& link);

} // namespace amber

#endif
