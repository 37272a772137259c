#ifndef AMBER_FADING_HPP
#define AMBER_FADING_HPP

#include "amber/quadrature.hpp"
#include "amber/rng.hpp"

#include <complex>

namespace amber {

enum class AttenuationConvention { amplitude, power };

// |alpha| corresponding to a given backscatter attenuation in dB, under the
// chosen convention (the measured 1.1 dB loss is quoted without saying
// whether it applies to amplitude or power, so both are selectable).
double alpha_mag_from_attenuation_db(double att_db, AttenuationConvention conv);

// Amplitude reading of the 1.1 dB attenuation, 10^(-1.1/20) ~= 0.881.
double default_alpha_mag();

struct FadingParams {
    double sigma_h2 = 1.0;   // variance of each CN(0, sigma_h2) link gain
    double alpha_mag = 0.0;  // |alpha| in (0, 1]; 0 only as a degenerate test hook

    static FadingParams standard() { return {1.0, default_alpha_mag()}; }
};

// One realization of the correlated gain pair: h0 = h_r is the direct path,
// h1 = h_r + alpha h_b h_t adds the backscatter product path.
struct ChannelPair {
    std::complex<double> h0;
    std::complex<double> h1;
    double mu = 0.0; // |h0|^2
    double nu = 0.0; // |h1|^2
};

// Fixture helper: a deterministic pair with the requested gain magnitudes.
ChannelPair channel_from_gains(double mu, double nu);

// Draws h_r, h_t, h_b i.i.d. CN(0, sigma_h2) from the given stream.
ChannelPair sample_channel(RngStream& rng, const FadingParams& params);

// Joint density of (mu, nu) on the open quadrant. The angular part of the
// underlying 2-D density depends only on the angle difference, so the double
// angle integral is collapsed to a single integral over [0, pi], with panels
// graded geometrically toward 0 where K_0 has an integrable log singularity
// on the mu = nu diagonal.
double joint_pdf_mu_nu(double mu, double nu, const FadingParams& params);

// Numerical marginal of nu: integrates joint_pdf_mu_nu over mu.
double marginal_pdf_nu(double nu, const FadingParams& params,
                       const QuadConfig& qc = {});

// Upper bound on the 1 - 1e-9 quantile of nu, from a deterministic internal
// sample; cached per (sigma_h2, alpha_mag). Used to truncate nu integrals.
double nu_tail_bound(const FadingParams& params);

} // namespace amber

#endif
