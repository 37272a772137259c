#ifndef AMBER_BER_HPP
#define AMBER_BER_HPP

#include "amber/detection.hpp"
#include "amber/energy_stats.hpp"
#include "amber/fading.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace amber {

enum class ReceiverKind { R1_CSI, R2_NOCSI };

std::string_view to_string(ReceiverKind r);
ReceiverKind receiver_from_string(std::string_view name);

enum class BerMethod { analytic, semi_analytic, monte_carlo };

std::string_view to_string(BerMethod m);

struct BerEstimate {
    double value = 0.0;
    BerMethod method = BerMethod::analytic;
    double ci_halfwidth = 0.0; // 0 for analytic values
};

// Conditional error probability of the CSI receiver for a given threshold,
// P = (1/2){1 + Q_N(a_lo, b) - Q_N(a_hi, b)} with the roles of mu and nu
// ordered so the decision regions match the relative position of the two
// conditional densities.
double cond_ber_r1(double mu, double nu, const Threshold& t, const LinkParams& link);

// Differentially decoded receiver: an output error needs exactly one of two
// consecutive symbol decisions to flip, so P = 2 p (1 - p) with p the single
// symbol flip probability; equivalently 1/2 - (1/2)(Q_N(a_nu,b) - Q_N(a_mu,b))^2.
double cond_ber_r2(double mu, double nu, const Threshold& t, const LinkParams& link);

struct AvgBerConfig {
    double rel_tol = 1e-3;   // accept when successive refinements agree this well
    double abs_tol = 1e-8;
    int gl_order = 12;
    int base_panels = 12;    // panels per dimension at refinement level 0
    int max_level = 3;
    double tail_eps = 1e-9;  // truncated probability mass per dimension
    double mlt_tol = 1e-10;
    unsigned threads = 1;    // panel parallelism; the result does not depend on it
};

struct AvgBerResult {
    BerEstimate estimate;      // method = analytic, ci_halfwidth = 0
    double quad_error = 0.0;   // |difference between the last two refinement levels|
    int level = 0;             // refinement level of the accepted value
};

// Average BER over the fading law: nested Gauss-Legendre panels over the
// (mu, nu) quadrant, weighting the conditional BER by the joint density.
// For the CSI receiver the nu panels split at nu = mu, where the branch of
// the conditional expression changes; panel nodes never land exactly on the
// diagonal. The joint-density values depend only on the fading parameters
// and the panel layout, so they are cached and reused across (N, SNR,
// strategy, receiver) sweeps.
class AvgBerEvaluator {
public:
    explicit AvgBerEvaluator(const FadingParams& fading, const AvgBerConfig& cfg = {});

    AvgBerResult evaluate(ReceiverKind receiver, DetectionStrategy strategy,
                          const LinkParams& link) const;

    const FadingParams& fading() const { return fading_; }
    const AvgBerConfig& config() const { return cfg_; }

private:
    struct DensityRow {
        double mu = 0.0;
        double mu_weight = 0.0;
        std::vector<double> nu;
        std::vector<double> nu_weight;
        std::vector<double> density;
    };
    struct DensityTable {
        std::vector<DensityRow> rows;
    };

    std::shared_ptr<const DensityTable> table(int level) const;
    double value_at_level(int level, ReceiverKind receiver, DetectionStrategy strategy,
                          const LinkParams& link) const;

    FadingParams fading_;
    AvgBerConfig cfg_;
    double nu_max_ = 0.0;
    mutable std::mutex mtx_;
    mutable std::map<int, std::shared_ptr<const DensityTable>> tables_;
};

// One-shot convenience wrapper around AvgBerEvaluator.
BerEstimate avg_ber(ReceiverKind receiver, DetectionStrategy strategy,
                    const LinkParams& link, const FadingParams& fading,
                    const AvgBerConfig& cfg = {});

} // namespace amber

#endif
