#include "amber/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace amber {

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::pdf_compare: return "pdf_compare";
        case ExperimentKind::ber_vs_n: return "ber_vs_n";
        case ExperimentKind::ber_vs_snr: return "ber_vs_snr";
        case ExperimentKind::threshold_table: return "threshold_table";
        case ExperimentKind::validate: return "validate";
    }
    return "?";
}

ExperimentKind experiment_from_string(std::string_view name) {
    if (name == "pdf_compare") return ExperimentKind::pdf_compare;
    if (name == "ber_vs_n") return ExperimentKind::ber_vs_n;
    if (name == "ber_vs_snr") return ExperimentKind::ber_vs_snr;
    if (name == "threshold_table") return ExperimentKind::threshold_table;
    if (name == "validate") return ExperimentKind::validate;
    throw config_error("unknown experiment: " + std::string(name));
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) throw config_error("empty element in list value: '" + v + "'");
        out.push_back(t);
    }
    if (out.empty()) throw config_error("empty list value");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': not a number: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw config_error("key '" + key + "': not an unsigned integer: '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw config_error("key '" + key + "': not an integer: '" + v + "'");
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key or value");

        try {
            if (key == "experiment") {
                cfg.experiment = experiment_from_string(value);
            } else if (key == "n_list") {
                cfg.n_list.clear();
                for (const auto& s : split_list(value)) cfg.n_list.push_back(parse_int(key, s));
            } else if (key == "snr_db_list") {
                cfg.snr_db_list.clear();
                for (const auto& s : split_list(value))
                    cfg.snr_db_list.push_back(parse_double(key, s));
            } else if (key == "mu") {
                cfg.mu = parse_double(key, value);
            } else if (key == "nu_list") {
                cfg.nu_list.clear();
                for (const auto& s : split_list(value)) cfg.nu_list.push_back(parse_double(key, s));
            } else if (key == "receivers") {
                cfg.receivers.clear();
                for (const auto& s : split_list(value)) cfg.receivers.push_back(receiver_from_string(s));
            } else if (key == "strategies") {
                cfg.strategies.clear();
                for (const auto& s : split_list(value))
                    cfg.strategies.push_back(strategy_from_string(s));
            } else if (key == "ambient") {
                cfg.ambient = ambient_from_string(value);
            } else if (key == "seed") {
                cfg.seed = parse_u64(key, value);
            } else if (key == "threads") {
                cfg.threads = static_cast<unsigned>(parse_u64(key, value));
            } else if (key == "mc_bits") {
                cfg.mc_bits = parse_u64(key, value);
            } else if (key == "mc_stop_errors") {
                cfg.mc_stop_errors = parse_u64(key, value);
            } else if (key == "mc_windows") {
                cfg.mc_windows = parse_u64(key, value);
            } else if (key == "channels") {
                cfg.channels = parse_u64(key, value);
            } else if (key == "coherence_bits") {
                cfg.coherence_bits = parse_int(key, value);
            } else if (key == "pilot_windows") {
                cfg.pilot_windows = parse_int(key, value);
            } else if (key == "grid_points") {
                cfg.grid_points = parse_int(key, value);
            } else if (key == "sigma_h2") {
                cfg.fading.sigma_h2 = parse_double(key, value);
            } else if (key == "alpha_mag") {
                cfg.fading.alpha_mag = parse_double(key, value);
            } else if (key == "attenuation_db") {
                cfg.fading.alpha_mag = alpha_mag_from_attenuation_db(
                    parse_double(key, value), AttenuationConvention::amplitude);
            } else if (key == "attenuation_db_power") {
                cfg.fading.alpha_mag = alpha_mag_from_attenuation_db(
                    parse_double(key, value), AttenuationConvention::power);
            } else if (key == "quad_rel_tol") {
                cfg.quad_rel_tol = parse_double(key, value);
            } else if (key == "quad_abs_tol") {
                cfg.quad_abs_tol = parse_double(key, value);
            } else if (key == "mlt_tol") {
                cfg.mlt_tol = parse_double(key, value);
            } else if (key == "validate_bridge_tol") {
                cfg.validate_bridge_tol = parse_double(key, value);
            } else if (key == "validate_mass_tol") {
                cfg.validate_mass_tol = parse_double(key, value);
            } else if (key == "out") {
                cfg.out_dir = value;
            } else {
                throw config_error("unknown key '" + key + "'");
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception& e) {
            throw config_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }

    if (cfg.n_list.empty() || cfg.snr_db_list.empty() || cfg.nu_list.empty() ||
        cfg.receivers.empty() || cfg.strategies.empty())
        throw config_error("parameter grids must be non-empty");
    if (!(cfg.quad_rel_tol > 0.0) || !(cfg.quad_abs_tol > 0.0) || !(cfg.mlt_tol > 0.0))
        throw config_error("tolerances must be > 0");
    for (int n : cfg.n_list)
        if (n < 1) throw config_error("n_list entries must be >= 1");
    if (cfg.grid_points < 8) throw config_error("grid_points must be >= 8");
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

template <typename T>
std::string join(const std::vector<T>& xs, const char* (*fmt)(const T&) = nullptr);

std::string join_ints(const std::vector<int>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(xs[i]);
    }
    return s;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += fmt17(xs[i]);
    }
    return s;
}

} // namespace

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "experiment = " << to_string(cfg.experiment) << '\n';
    os << "n_list = " << join_ints(cfg.n_list) << '\n';
    os << "snr_db_list = " << join_doubles(cfg.snr_db_list) << '\n';
    os << "mu = " << fmt17(cfg.mu) << '\n';
    os << "nu_list = " << join_doubles(cfg.nu_list) << '\n';
    os << "receivers = ";
    for (std::size_t i = 0; i < cfg.receivers.size(); ++i)
        os << (i ? ", " : "") << to_string(cfg.receivers[i]);
    os << '\n';
    os << "strategies = ";
    for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
        os << (i ? ", " : "") << to_string(cfg.strategies[i]);
    os << '\n';
    os << "ambient = " << to_string(cfg.ambient) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "threads = " << cfg.threads << '\n';
    os << "mc_bits = " << cfg.mc_bits << '\n';
    os << "mc_stop_errors = " << cfg.mc_stop_errors << '\n';
    os << "mc_windows = " << cfg.mc_windows << '\n';
    os << "channels = " << cfg.channels << '\n';
    os << "coherence_bits = " << cfg.coherence_bits << '\n';
    os << "pilot_windows = " << cfg.pilot_windows << '\n';
    os << "grid_points = " << cfg.grid_points << '\n';
    os << "sigma_h2 = " << fmt17(cfg.fading.sigma_h2) << '\n';
    os << "alpha_mag = " << fmt17(cfg.fading.alpha_mag) << '\n';
    os << "quad_rel_tol = " << fmt17(cfg.quad_rel_tol) << '\n';
    os << "quad_abs_tol = " << fmt17(cfg.quad_abs_tol) << '\n';
    os << "mlt_tol = " << fmt17(cfg.mlt_tol) << '\n';
    os << "validate_bridge_tol = " << fmt17(cfg.validate_bridge_tol) << '\n';
    os << "validate_mass_tol = " << fmt17(cfg.validate_mass_tol) << '\n';
    os << "out = " << cfg.out_dir << '\n';
    return os.str();
}

} // namespace amber
