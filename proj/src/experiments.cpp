#include "amber/experiments.hpp"
#include "amber/errors.hpp"
#include "amber/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>
#include <vector>

namespace amber {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& dir, const std::string& name, const ExperimentConfig& cfg) {
        std::filesystem::create_directories(dir);
        path_ = dir + "/" + name;
        out_.open(path_, std::ios::binary);
        if (!out_) throw std::runtime_error("cannot open output file: " + path_);
        std::istringstream cfg_lines(format_config(cfg));
        std::string line;
        while (std::getline(cfg_lines, line)) out_ << "# " << line << '\n';
    }

    void header(const std::string& cols) { out_ << cols << '\n'; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

// Deterministic multi-threaded histogram of simulated Y windows: integer
// bin counts merge associatively, so the thread count never changes output.
std::vector<double> simulated_density(int bit, const ChannelPair& ch, const LinkParams& link,
                                      AmbientKind ambient, std::uint64_t windows,
                                      std::uint64_t seed, double t_lo, double dt,
                                      std::size_t bins, unsigned threads) {
    const std::uint64_t block = 65536;
    const std::uint64_t n_blocks = (windows + block - 1) / block;
    std::vector<std::vector<std::uint64_t>> counts(n_blocks);

    auto run_block = [&](std::uint64_t b) {
        RngStream rng(seed, b);
        std::vector<std::uint64_t> c(bins, 0);
        const std::uint64_t lo = b * block;
        const std::uint64_t hi = std::min(windows, lo + block);
        for (std::uint64_t i = lo; i < hi; ++i) {
            double y = simulate_y(bit, ch, link, ambient, rng);
            double pos = (y - t_lo) / dt;
            if (pos >= 0.0 && pos < static_cast<double>(bins))
                ++c[static_cast<std::size_t>(pos)];
        }
        counts[b] = std::move(c);
    };

    const unsigned nthreads = std::max(1u, threads);
    if (nthreads == 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t per = (n_blocks + nthreads - 1) / nthreads;
        for (unsigned t = 0; t < nthreads; ++t) {
            std::uint64_t lo = t * per, hi = std::min<std::uint64_t>(n_blocks, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::uint64_t b = lo; b < hi; ++b) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> dens(bins, 0.0);
    for (std::uint64_t b = 0; b < n_blocks; ++b)
        for (std::size_t i = 0; i < bins; ++i) dens[i] += static_cast<double>(counts[b][i]);
    const double norm = 1.0 / (static_cast<double>(windows) * dt);
    for (double& d : dens) d *= norm;
    return dens;
}

void run_pdf_compare(const ExperimentConfig& cfg, std::ostream& log) {
    std::uint64_t fixture = 0;
    for (int n : cfg.n_list) {
        for (double snr_db : cfg.snr_db_list) {
            LinkParams link = link_from_snr_db(n, snr_db);
            for (double nu : cfg.nu_list) {
                ChannelPair ch = channel_from_gains(cfg.mu, nu);
                for (int hyp = 0; hyp <= 1; ++hyp) {
                    const double gain = hyp ? nu : cfg.mu;
                    const double mean = gain * link.e_bar + link.sigma2;
                    const double sd = std::sqrt((2.0 * gain * link.e_bar * link.sigma2 +
                                                 link.sigma2 * link.sigma2) / n);
                    const double t_lo = std::max(mean - 8.0 * sd, 1e-9);
                    const double t_hi = mean + 8.0 * sd;
                    const std::size_t bins = static_cast<std::size_t>(cfg.grid_points);
                    const double dt = (t_hi - t_lo) / static_cast<double>(bins);

                    std::vector<double> hist =
                        simulated_density(hyp, ch, link, cfg.ambient, cfg.mc_windows,
                                          cfg.seed + fixture, t_lo, dt, bins, cfg.threads);

                    char name[160];
                    std::snprintf(name, sizeof(name), "pdf_compare_n%d_snr%g_nu%g_h%d.csv",
                                  n, snr_db, nu, hyp);
                    CsvWriter csv(cfg.out_dir, name, cfg);
                    csv.header("t,exact,gauss1,gauss2,simulated_hist");
                    for (std::size_t i = 0; i < bins; ++i) {
                        double t = t_lo + (static_cast<double>(i) + 0.5) * dt;
                        csv.row({fmt(t), fmt(cond_pdf_y(t, gain, link)),
                                 fmt(gain > 0.0 ? cond_pdf_y_gauss1(t, gain, link) : 0.0),
                                 fmt(cond_pdf_y_gauss2(t, gain, link)), fmt(hist[i])});
                    }
                    log << "wrote " << csv.path() << '\n';
                    ++fixture;
                }
            }
        }
    }
}

void run_ber_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    AvgBerConfig qcfg;
    qcfg.rel_tol = cfg.quad_rel_tol;
    qcfg.abs_tol = cfg.quad_abs_tol;
    qcfg.mlt_tol = cfg.mlt_tol;
    qcfg.threads = cfg.threads;
    AvgBerEvaluator eval(cfg.fading, qcfg);

    const std::string name =
        cfg.experiment == ExperimentKind::ber_vs_n ? "ber_vs_n.csv" : "ber_vs_snr.csv";
    CsvWriter csv(cfg.out_dir, name, cfg);
    csv.header("snr_db,n,receiver,strategy,ber_analytic,ber_semianalytic,ber_mc,mc_ci_halfwidth");

    for (double snr_db : cfg.snr_db_list) {
        for (int n : cfg.n_list) {
            LinkParams link = link_from_snr_db(n, snr_db);
            for (ReceiverKind rx : cfg.receivers) {
                for (DetectionStrategy st : cfg.strategies) {
                    if (rx == ReceiverKind::R2_NOCSI && st != DetectionStrategy::MT)
                        continue; // no CSI: only the pilot MT rule applies
                    AvgBerResult analytic = eval.evaluate(rx, st, link);
                    BerEstimate semi = semi_analytic_avg_ber(rx, st, link, cfg.fading,
                                                             cfg.channels, cfg.seed, cfg.threads);
                    double mc_v = std::nan("");
                    double mc_ci = std::nan("");
                    if (cfg.mc_bits > 0) {
                        TrialPlan plan;
                        plan.n_bits = cfg.mc_bits;
                        plan.seed = cfg.seed;
                        plan.channel_mode = ChannelMode::block_fading;
                        plan.coherence_bits = cfg.coherence_bits;
                        plan.ambient = cfg.ambient;
                        plan.stop_errors = cfg.mc_stop_errors;
                        plan.pilot_windows = cfg.pilot_windows;
                        plan.threads = cfg.threads;
                        BerEstimate mc = (rx == ReceiverKind::R1_CSI)
                                             ? run_receiver_r1(plan, st, link, cfg.fading)
                                             : run_receiver_r2(plan, link, cfg.fading, st);
                        mc_v = mc.value;
                        mc_ci = mc.ci_halfwidth;
                    }
                    csv.row({fmt(snr_db), std::to_string(n), std::string(to_string(rx)),
                             std::string(to_string(st)), fmt(analytic.estimate.value),
                             fmt(semi.value), fmt(mc_v), fmt(mc_ci)});
                    log << "snr=" << snr_db << " n=" << n << " " << to_string(rx) << "/"
                        << to_string(st) << " analytic=" << analytic.estimate.value << '\n';
                }
            }
        }
    }
    log << "wrote " << csv.path() << '\n';
}

void run_threshold_table(const ExperimentConfig& cfg, std::ostream& log) {
    CsvWriter csv(cfg.out_dir, "threshold_table.csv", cfg);
    csv.header("mu,nu,n,snr_db,t_mt,t_mlt,t_mlt_app1,t_mlt_app2");
    for (int n : cfg.n_list) {
        for (double snr_db : cfg.snr_db_list) {
            LinkParams link = link_from_snr_db(n, snr_db);
            for (double nu : cfg.nu_list) {
                double t_mlt_v = std::nan("");
                double t_a1 = std::nan("");
                double t_a2 = std::nan("");
                if (nu != cfg.mu) {
                    t_mlt_v = threshold_mlt(cfg.mu, nu, link, cfg.mlt_tol).value;
                    t_a1 = threshold_mlt_app1(cfg.mu, nu, link).value;
                    t_a2 = threshold_mlt_app2(cfg.mu, nu, link).value;
                }
                csv.row({fmt(cfg.mu), fmt(nu), std::to_string(n), fmt(snr_db),
                         fmt(threshold_mt(cfg.mu, nu, link).value), fmt(t_mlt_v), fmt(t_a1),
                         fmt(t_a2)});
            }
        }
    }
    log << "wrote " << csv.path() << '\n';
}

bool run_validate(const ExperimentConfig& cfg, std::ostream& log) {
    bool ok = true;
    auto check = [&](const char* name, bool pass, const std::string& detail) {
        log << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
        ok = ok && pass;
    };

    {
        // CDF route against direct quadrature of the density
        double worst = 0.0;
        for (int n : {5, 50}) {
            LinkParams link = link_from_snr_db(n, 0.0);
            for (double g : {0.4, 1.0, 2.5}) {
                double t = g * link.e_bar + link.sigma2;
                double cdf = cond_cdf_y(t, g, link);
                double quad = integrate([&](double u) { return cond_pdf_y(u, g, link); }, 0.0,
                                        t, {1e-12, 1e-11, 50, 12});
                worst = std::max(worst, std::fabs(cdf - quad));
            }
        }
        check("marcum_cdf_bridge", worst < cfg.validate_bridge_tol,
              "max |cdf - pdf quadrature| = " + fmt(worst));
    }
    {
        // the two density routes
        double worst = 0.0;
        for (int k : {4, 40, 300}) {
            for (double lam : {0.5, 40.0, 400.0}) {
                for (double frac : {0.5, 1.0, 1.8}) {
                    double x = frac * (k + lam);
                    double a = noncentral_chi2_pdf_log(x, k, lam).value;
                    double b = noncentral_chi2_pdf_log_bessel(x, k, lam).value;
                    worst = std::max(worst, std::fabs(a - b));
                }
            }
        }
        check("ncx2_route_agreement", worst < 1e-9, "max |log diff| = " + fmt(worst));
    }
    {
        double mu_max = -cfg.fading.sigma_h2 * std::log(1e-9);
        double mass = integrate(
            [&](double mu) {
                return integrate([&](double nu) { return joint_pdf_mu_nu(mu, nu, cfg.fading); },
                                 0.0, nu_tail_bound(cfg.fading), {1e-9, 1e-7, 40, 16});
            },
            0.0, mu_max, {1e-8, 1e-6, 40, 16});
        check("joint_density_mass", std::fabs(mass - 1.0) < cfg.validate_mass_tol,
              "total mass = " + fmt(mass));
    }
    {
        // sampled moments of the channel pair
        RngStream rng(cfg.seed, 1);
        const int n = 200000;
        double sm = 0.0, sn = 0.0;
        for (int i = 0; i < n; ++i) {
            ChannelPair ch = sample_channel(rng, cfg.fading);
            sm += ch.mu;
            sn += ch.nu;
        }
        double em = sm / n, en = sn / n;
        double a2 = cfg.fading.alpha_mag * cfg.fading.alpha_mag;
        double s2 = cfg.fading.sigma_h2;
        double expect_nu = s2 + a2 * s2 * s2;
        bool pass = std::fabs(em - s2) < 0.02 * s2 && std::fabs(en - expect_nu) < 0.03 * expect_nu;
        check("channel_moments", pass,
              "E[mu] = " + fmt(em) + " (exp " + fmt(s2) + "), E[nu] = " + fmt(en) + " (exp " +
                  fmt(expect_nu) + ")");
    }
    {
        // fixed-channel Monte Carlo against the conditional closed form
        LinkParams link = link_from_snr_db(150, 0.0);
        TrialPlan plan;
        plan.n_bits = 200000;
        plan.seed = cfg.seed;
        plan.channel_mode = ChannelMode::fixed;
        plan.fixed_channel = channel_from_gains(1.0, 1.625);
        plan.coherence_bits = 1;
        plan.ambient = cfg.ambient;
        plan.threads = cfg.threads;
        BerEstimate mc = run_receiver_r1(plan, DetectionStrategy::MT, link, cfg.fading);
        Threshold t = threshold_mt(1.0, 1.625, link);
        double exact = cond_ber_r1(1.0, 1.625, t, link);
        bool pass = std::fabs(mc.value - exact) < 4.0 * std::max(mc.ci_halfwidth / 1.96, 1e-6);
        check("mc_vs_conditional", pass, "mc = " + fmt(mc.value) + ", exact = " + fmt(exact));
    }
    {
        // channel-sampled average against the quadrature of the average
        LinkParams link = link_from_snr_db(20, 0.0);
        AvgBerConfig qcfg;
        qcfg.rel_tol = cfg.quad_rel_tol;
        qcfg.abs_tol = cfg.quad_abs_tol;
        qcfg.threads = cfg.threads;
        AvgBerEvaluator eval(cfg.fading, qcfg);
        AvgBerResult quad = eval.evaluate(ReceiverKind::R1_CSI, DetectionStrategy::MT, link);
        BerEstimate semi = semi_analytic_avg_ber(ReceiverKind::R1_CSI, DetectionStrategy::MT,
                                                 link, cfg.fading, 20000, cfg.seed, cfg.threads);
        double sigma = std::sqrt(std::pow(semi.ci_halfwidth / 1.96, 2) +
                                 std::pow(quad.quad_error + quad.estimate.value * 1e-3, 2));
        bool pass = std::fabs(semi.value - quad.estimate.value) < 3.0 * sigma;
        check("semianalytic_vs_quadrature", pass,
              "semi = " + fmt(semi.value) + ", quad = " + fmt(quad.estimate.value));
    }
    return ok;
}

} // namespace

bool run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    switch (cfg.experiment) {
        case ExperimentKind::pdf_compare:
            run_pdf_compare(cfg, log);
            return true;
        case ExperimentKind::ber_vs_n:
        case ExperimentKind::ber_vs_snr:
            run_ber_sweep(cfg, log);
            return true;
        case ExperimentKind::threshold_table:
            run_threshold_table(cfg, log);
            return true;
        case ExperimentKind::validate:
            return run_validate(cfg, log);
    }
    throw config_error("unknown experiment kind");
}

} // namespace amber
