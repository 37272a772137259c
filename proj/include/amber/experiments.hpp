#ifndef AMBER_EXPERIMENTS_HPP
#define AMBER_EXPERIMENTS_HPP

#include "amber/ber.hpp"
#include "amber/simkit.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace amber {

// Bad CLI/config input; the driver maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind { pdf_compare, ber_vs_n, ber_vs_snr, threshold_table, validate };

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_from_string(std::string_view name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::validate;

    std::vector<int> n_list = {150};
    std::vector<double> snr_db_list = {0.0};
    double mu = 1.0;                       // fixture gain under H0
    std::vector<double> nu_list = {1.625}; // fixture gains under H1
    std::vector<ReceiverKind> receivers = {ReceiverKind::R1_CSI};
    std::vector<DetectionStrategy> strategies = {DetectionStrategy::MT};

    AmbientKind ambient = AmbientKind::constant_envelope;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    // Monte Carlo / semi-analytic workloads
    std::uint64_t mc_bits = 1000000;
    std::uint64_t mc_stop_errors = 0;
    std::uint64_t mc_windows = 100000; // pdf_compare histogram windows
    std::uint64_t channels = 10000;    // semi-analytic channel draws
    int coherence_bits = 2;
    int pilot_windows = 16;

    int grid_points = 512; // pdf_compare t-grid resolution

    FadingParams fading = FadingParams::standard();

    double quad_rel_tol = 1e-3;
    double quad_abs_tol = 1e-8;
    double mlt_tol = 1e-10;

    // validate experiment tolerances
    double validate_bridge_tol = 1e-8;
    double validate_mass_tol = 1e-3;

    std::string out_dir = ".";
};

// Flat key-value grammar: one `key = value` per line, `#` starts a comment,
// list values are comma separated. Unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// The full resolved configuration, one "key = value" per line in fixed key
// order; embedded as the comment header of every emitted CSV.
std::string format_config(const ExperimentConfig& cfg);

// Runs the experiment, writing CSV artifacts into cfg.out_dir and progress
// lines to `log`. Returns true when the run (including validate checks)
// succeeded. Numeric failures propagate as exceptions.
bool run_experiment(const ExperimentConfig& cfg, std::ostream& log);

} // namespace amber

#endif
