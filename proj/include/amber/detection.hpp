#ifndef AMBER_DETECTION_HPP
#define AMBER_DETECTION_HPP

#include "amber/energy_stats.hpp"

#include <string_view>

namespace amber {

enum class DetectionStrategy { MT, MLT, MLT_APP1, MLT_APP2 };

std::string_view to_string(DetectionStrategy s);
DetectionStrategy strategy_from_string(std::string_view name);

struct Threshold {
    double value = 0.0;
    DetectionStrategy strategy = DetectionStrategy::MT;
};

// Midpoint of the two conditional means: sigma2 + e_bar (mu + nu) / 2.
Threshold threshold_mt(double mu, double nu, const LinkParams& link);

// Exact maximum-likelihood threshold: the crossing point of the two exact
// conditional log densities, found by bisection. The initial bracket
// [sigma2 + min(mu,nu) e_bar, sigma2 + max(mu,nu) e_bar] is widened
// geometrically (factor 2, at most 40 times) until it straddles a sign
// change. tol bounds the log-likelihood residual at the returned root.
Threshold threshold_mlt(double mu, double nu, const LinkParams& link, double tol = 1e-10);

// Closed-form crossings of the two Gaussian approximations.
Threshold threshold_mlt_app1(double mu, double nu, const LinkParams& link);
Threshold threshold_mlt_app2(double mu, double nu, const LinkParams& link);

Threshold compute_threshold(DetectionStrategy s, double mu, double nu,
                            const LinkParams& link, double mlt_tol = 1e-10);

} // namespace amber

#endif
