#include "amber/detection.hpp"
#include "amber/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace amber {

std::string_view to_string(DetectionStrategy s) {
    switch (s) {
        case DetectionStrategy::MT: return "mt";
        case DetectionStrategy::MLT: return "mlt";
        case DetectionStrategy::MLT_APP1: return "mlt_app1";
        case DetectionStrategy::MLT_APP2: return "mlt_app2";
    }
    return "?";
}

DetectionStrategy strategy_from_string(std::string_view name) {
    if (name == "mt") return DetectionStrategy::MT;
    if (name == "mlt") return DetectionStrategy::MLT;
    if (name == "mlt_app1") return DetectionStrategy::MLT_APP1;
    if (name == "mlt_app2") return DetectionStrategy::MLT_APP2;
    throw std::invalid_argument("unknown detection strategy: " + std::string(name));
}

namespace {

void check_gains_nonneg(double mu, double nu) {
    if (!(mu >= 0.0) || !(nu >= 0.0) || !std::isfinite(mu) || !std::isfinite(nu))
        throw std::invalid_argument("threshold: gains must be finite and >= 0");
}

void check_gains_distinct_positive(double mu, double nu, const char* who) {
    if (!(mu > 0.0) || !(nu > 0.0) || !std::isfinite(mu) || !std::isfinite(nu))
        throw std::invalid_argument(std::string(who) + ": gains must be finite and > 0");
    if (mu == nu)
        throw no_unique_threshold_error(
            std::string(who) + ": identical conditional densities at mu == nu");
}

} // namespace

Threshold threshold_mt(double mu, double nu, const LinkParams& link) {
    validate(link);
    check_gains_nonneg(mu, nu);
    return {link.sigma2 + 0.5 * link.e_bar * (mu + nu), DetectionStrategy::MT};
}

Threshold threshold_mlt(double mu, double nu, const LinkParams& link, double tol) {
    validate(link);
    check_gains_distinct_positive(mu, nu, "threshold_mlt");
    if (!(tol > 0.0)) throw std::invalid_argument("threshold_mlt: tol must be > 0");

    auto diff = [&](double t) {
        return cond_pdf_y_log(t, nu, link).value - cond_pdf_y_log(t, mu, link).value;
    };

    double lo = link.sigma2 + std::min(mu, nu) * link.e_bar;
    double hi = link.sigma2 + std::max(mu, nu) * link.e_bar;
    double flo = diff(lo);
    double fhi = diff(hi);
    int expansions = 0;
    while (flo * fhi > 0.0) {
        if (++expansions > 40) {
            std::ostringstream os;
            os << "threshold_mlt: no sign change after 40 bracket expansions"
               << " (mu=" << mu << ", nu=" << nu << ", N=" << link.n_samples
               << ", snr=" << link.snr() << ", bracket=[" << lo << ", " << hi << "])";
            throw convergence_error(os.str());
        }
        lo *= 0.5;
        hi *= 2.0;
        flo = diff(lo);
        fhi = diff(hi);
    }

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fm = diff(mid);
        if (std::fabs(fm) <= tol) break;
        if (fm == 0.0) break;
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
        double next = 0.5 * (lo + hi);
        if (next == mid || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid)
            break; // bracket at double-precision resolution
        mid = next;
    }
    return {mid, DetectionStrategy::MLT};
}

Threshold threshold_mlt_app1(double mu, double nu, const LinkParams& link) {
    validate(link);
    check_gains_distinct_positive(mu, nu, "threshold_mlt_app1");
    const double eb = link.e_bar, s2 = link.sigma2;
    double radicand =
        mu * nu * eb * (2.0 * s2 / (link.n_samples * (nu - mu)) * std::log(nu / mu) + eb);
    if (radicand < 0.0)
        throw approximation_invalid_error("threshold_mlt_app1: negative radicand");
    return {s2 + std::sqrt(radicand), DetectionStrategy::MLT_APP1};
}

Threshold threshold_mlt_app2(double mu, double nu, const LinkParams& link) {
    validate(link);
    check_gains_distinct_positive(mu, nu, "threshold_mlt_app2");
    const double eb = link.e_bar, s2 = link.sigma2;
    const double am = 2.0 * mu * eb + s2;
    const double an = 2.0 * nu * eb + s2;
    double radicand = 0.25 * s2 * s2 + mu * nu * eb * eb + 0.5 * (mu + nu) * eb * s2 +
                      am * an * s2 / (2.0 * link.n_samples * (nu - mu) * eb) * std::log(an / am);
    if (radicand < 0.0)
        throw approximation_invalid_error("threshold_mlt_app2: negative radicand");
    return {0.5 * s2 + std::sqrt(radicand), DetectionStrategy::MLT_APP2};
}

Threshold compute_threshold(DetectionStrategy s, double mu, double nu,
                            const LinkParams& link, double mlt_tol) {
    switch (s) {
        case DetectionStrategy::MT: return threshold_mt(mu, nu, link);
        case DetectionStrategy::MLT: return threshold_mlt(mu, nu, link, mlt_tol);
        case DetectionStrategy::MLT_APP1: return threshold_mlt_app1(mu, nu, link);
        case DetectionStrategy::MLT_APP2: return threshold_mlt_app2(mu, nu, link);
    }
    throw std::invalid_argument("compute_threshold: bad strategy");
}

} // namespace amber
