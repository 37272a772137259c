#include "amber/ber.hpp"
#include "amber/errors.hpp"
#include "amber/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace amber {

std::string_view to_string(ReceiverKind r) {
    return r == ReceiverKind::R1_CSI ? "r1" : "r2";
}

ReceiverKind receiver_from_string(std::string_view name) {
    if (name == "r1") return ReceiverKind::R1_CSI;
    if (name == "r2") return ReceiverKind::R2_NOCSI;
    throw std::invalid_argument("unknown receiver: " + std::string(name));
}

std::string_view to_string(BerMethod m) {
    switch (m) {
        case BerMethod::analytic: return "analytic";
        case BerMethod::semi_analytic: return "semi_analytic";
        case BerMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

namespace {

void check_cond_args(double mu, double nu, const Threshold& t, const LinkParams& link) {
    validate(link);
    if (!(mu >= 0.0) || !(nu >= 0.0) || !std::isfinite(mu) || !std::isfinite(nu))
        throw std::invalid_argument("cond_ber: gains must be finite and >= 0");
    if (!(t.value > 0.0) || !std::isfinite(t.value))
        throw std::invalid_argument("cond_ber: threshold must be finite and > 0");
}

struct MarcumPair {
    double q_mu;
    double q_nu;
};

MarcumPair marcum_pair(double mu, double nu, double t, const LinkParams& link) {
    const double c = 2.0 * link.n_samples / link.sigma2;
    const double b = std::sqrt(c * t);
    return {marcum_q(link.n_samples, std::sqrt(c * mu * link.e_bar), b),
            marcum_q(link.n_samples, std::sqrt(c * nu * link.e_bar), b)};
}

} // namespace

double cond_ber_r1(double mu, double nu, const Threshold& t, const LinkParams& link) {
    check_cond_args(mu, nu, t, link);
    MarcumPair q = marcum_pair(mu, nu, t.value, link);
    double p = (nu >= mu) ? 0.5 * (1.0 + q.q_mu - q.q_nu) : 0.5 * (1.0 + q.q_nu - q.q_mu);
    return std::clamp(p, 0.0, 1.0);
}

double cond_ber_r2(double mu, double nu, const Threshold& t, const LinkParams& link) {
    check_cond_args(mu, nu, t, link);
    MarcumPair q = marcum_pair(mu, nu, t.value, link);
    double d = q.q_nu - q.q_mu;
    return std::clamp(0.5 - 0.5 * d * d, 0.0, 0.5);
}

namespace {

// exponential-CDF-spaced panel edges on [0, span], denser where the mass is
std::vector<double> cdf_spaced_edges(double scale, double span, int panels) {
    std::vector<double> edges(panels + 1);
    const double f_end = 1.0 - std::exp(-span / scale);
    edges[0] = 0.0;
    for (int j = 1; j < panels; ++j)
        edges[j] = -scale * std::log1p(-f_end * j / panels);
    edges[panels] = span;
    return edges;
}

} // namespace

AvgBerEvaluator::AvgBerEvaluator(const FadingParams& fading, const AvgBerConfig& cfg)
    : fading_(fading), cfg_(cfg) {
    if (!(fading.sigma_h2 > 0.0) || !(fading.alpha_mag > 0.0) || fading.alpha_mag > 1.0)
        throw std::invalid_argument("AvgBerEvaluator: invalid fading parameters");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || cfg.base_panels < 2 ||
        cfg.gl_order < 2 || cfg.max_level < 1 || !(cfg.tail_eps > 0.0))
        throw std::invalid_argument("AvgBerEvaluator: invalid quadrature config");
    nu_max_ = nu_tail_bound(fading);
}

std::shared_ptr<const AvgBerEvaluator::DensityTable> AvgBerEvaluator::table(int level) const {
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = tables_.find(level);
        if (it != tables_.end()) return it->second;
    }

    const int panels = cfg_.base_panels << level;
    const GaussRule& rule = gauss_legendre(cfg_.gl_order);
    const double mu_scale = fading_.sigma_h2;
    const double mu_max = -fading_.sigma_h2 * std::log(cfg_.tail_eps);
    const double nu_scale =
        fading_.sigma_h2 * (1.0 + fading_.alpha_mag * fading_.alpha_mag * fading_.sigma_h2);

    std::vector<double> mu_edges = cdf_spaced_edges(mu_scale, mu_max, panels);
    std::vector<double> nu_base = cdf_spaced_edges(nu_scale, nu_max_, panels);

    auto tab = std::make_shared<DensityTable>();
    tab->rows.resize(static_cast<std::size_t>(panels) * rule.x.size());
    for (std::size_t p = 0; p + 1 < mu_edges.size(); ++p) {
        const double mid = 0.5 * (mu_edges[p] + mu_edges[p + 1]);
        const double half = 0.5 * (mu_edges[p + 1] - mu_edges[p]);
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            DensityRow& row = tab->rows[p * rule.x.size() + i];
            row.mu = mid + half * rule.x[i];
            row.mu_weight = half * rule.w[i];
        }
    }

    auto fill_row = [&](DensityRow& row) {
        // nu panels: base exponential spacing plus a split at nu = mu, where
        // the R1 conditional expression changes branch
        std::vector<double> edges = nu_base;
        if (row.mu < nu_max_) {
            auto pos = std::lower_bound(edges.begin(), edges.end(), row.mu);
            if (pos == edges.end() || *pos != row.mu) edges.insert(pos, row.mu);
        }
        row.nu.reserve((edges.size() - 1) * rule.x.size());
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double mid = 0.5 * (edges[p] + edges[p + 1]);
            const double half = 0.5 * (edges[p + 1] - edges[p]);
            for (std::size_t j = 0; j < rule.x.size(); ++j) {
                row.nu.push_back(mid + half * rule.x[j]);
                row.nu_weight.push_back(half * rule.w[j]);
            }
        }
        row.density.resize(row.nu.size());
        for (std::size_t j = 0; j < row.nu.size(); ++j)
            row.density[j] = joint_pdf_mu_nu(row.mu, row.nu[j], fading_);
    };

    const unsigned nthreads = std::max(1u, cfg_.threads);
    if (nthreads == 1) {
        for (DensityRow& row : tab->rows) fill_row(row);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (tab->rows.size() + nthreads - 1) / nthreads;
        for (unsigned t = 0; t < nthreads; ++t) {
            std::size_t lo = t * chunk;
            std::size_t hi = std::min(tab->rows.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) fill_row(tab->rows[i]);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::lock_guard<std::mutex> lock(mtx_);
    auto [it, inserted] = tables_.emplace(level, tab);
    return it->second;
}

double AvgBerEvaluator::value_at_level(int level, ReceiverKind receiver,
                                       DetectionStrategy strategy,
                                       const LinkParams& link) const {
    auto tab = table(level);

    auto row_value = [&](const DensityRow& row) {
        double prev_t = -1.0;
        double acc = 0.0;
        for (std::size_t j = 0; j < row.nu.size(); ++j) {
            const double nu = row.nu[j];
            Threshold t;
            if (strategy == DetectionStrategy::MLT && prev_t > 0.0) {
                // warm start: neighbouring nodes have nearby roots
                double lo = prev_t / 1.25, hi = prev_t * 1.25;
                auto diff = [&](double x) {
                    return cond_pdf_y_log(x, nu, link).value -
                           cond_pdf_y_log(x, row.mu, link).value;
                };
                if (diff(lo) * diff(hi) < 0.0) {
                    double flo = diff(lo);
                    double mid = 0.5 * (lo + hi);
                    for (int it = 0; it < 200; ++it) {
                        double fm = diff(mid);
                        if (std::fabs(fm) <= cfg_.mlt_tol || fm == 0.0) break;
                        if ((fm > 0.0) == (flo > 0.0)) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                        double next = 0.5 * (lo + hi);
                        if (next == mid) break;
                        mid = next;
                    }
                    t = {mid, DetectionStrategy::MLT};
                } else {
                    t = threshold_mlt(row.mu, nu, link, cfg_.mlt_tol);
                }
            } else {
                t = compute_threshold(strategy, row.mu, nu, link, cfg_.mlt_tol);
            }
            prev_t = t.value;
            double cber = (receiver == ReceiverKind::R1_CSI)
                              ? cond_ber_r1(row.mu, nu, t, link)
                              : cond_ber_r2(row.mu, nu, t, link);
            acc += row.nu_weight[j] * row.density[j] * cber;
        }
        return row.mu_weight * acc;
    };

    std::vector<double> partial(tab->rows.size());
    const unsigned nthreads = std::max(1u, cfg_.threads);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < tab->rows.size(); ++i) partial[i] = row_value(tab->rows[i]);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (tab->rows.size() + nthreads - 1) / nthreads;
        for (unsigned t = 0; t < nthreads; ++t) {
            std::size_t lo = t * chunk;
            std::size_t hi = std::min(tab->rows.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) partial[i] = row_value(tab->rows[i]);
            });
        }
        for (auto& th : pool) th.join();
    }
    // fixed reduction order, independent of the thread partition
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

AvgBerResult AvgBerEvaluator::evaluate(ReceiverKind receiver, DetectionStrategy strategy,
                                       const LinkParams& link) const {
    validate(link);
    double prev = value_at_level(0, receiver, strategy, link);
    for (int level = 1; level <= cfg_.max_level; ++level) {
        double cur = value_at_level(level, receiver, strategy, link);
        double err = std::fabs(cur - prev);
        if (err <= std::max(cfg_.abs_tol, cfg_.rel_tol * std::fabs(cur))) {
            AvgBerResult out;
            out.estimate = {std::clamp(cur, 0.0, 1.0), BerMethod::analytic, 0.0};
            out.quad_error = err;
            out.level = level;
            return out;
        }
        prev = cur;
    }
    std::ostringstream os;
    os << "avg_ber: quadrature did not converge to rel_tol=" << cfg_.rel_tol
       << " by level " << cfg_.max_level << " (receiver=" << to_string(receiver)
       << ", strategy=" << to_string(strategy) << ", N=" << link.n_samples
       << ", snr=" << link.snr() << ", last value=" << prev << ")";
    throw convergence_error(os.str());
}

BerEstimate avg_ber(ReceiverKind receiver, DetectionStrategy strategy, const LinkParams& link,
                    const FadingParams& fading, const AvgBerConfig& cfg) {
    AvgBerEvaluator eval(fading, cfg);
    return eval.evaluate(receiver, strategy, link).estimate;
}

} // namespace amber
