#include "amber/simkit.hpp"
#include "amber/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace amber {

std::string_view to_string(AmbientKind k) {
    return k == AmbientKind::constant_envelope ? "constant_envelope"
                                               : "complex_gaussian_normalized";
}

AmbientKind ambient_from_string(std::string_view name) {
    if (name == "constant_envelope") return AmbientKind::constant_envelope;
    if (name == "complex_gaussian_normalized") return AmbientKind::complex_gaussian_normalized;
    throw std::invalid_argument("unknown ambient model: " + std::string(name));
}

double simulate_y(int bit, const ChannelPair& channel, const LinkParams& link,
                  AmbientKind ambient, RngStream& rng) {
    validate(link);
    if (bit != 0 && bit != 1) throw std::invalid_argument("simulate_y: bit must be 0 or 1");
    const std::complex<double> h = bit ? channel.h1 : channel.h0;
    const int n = link.n_samples;
    double acc = 0.0;

    if (ambient == AmbientKind::constant_envelope) {
        const double amp = std::sqrt(link.e_bar);
        for (int i = 0; i < n; ++i) {
            double phi = 6.283185307179586476925286766559 * rng.uniform01();
            std::complex<double> x(amp * std::cos(phi), amp * std::sin(phi));
            std::complex<double> y = h * x + rng.cgauss(link.sigma2);
            acc += std::norm(y);
        }
    } else {
        thread_local std::vector<std::complex<double>> xs;
        xs.resize(n);
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            xs[i] = rng.cgauss(1.0);
            e += std::norm(xs[i]);
        }
        const double s = std::sqrt(n * link.e_bar / e); // window energy pinned to e_bar
        for (int i = 0; i < n; ++i) {
            std::complex<double> y = h * (s * xs[i]) + rng.cgauss(link.sigma2);
            acc += std::norm(y);
        }
    }
    return acc / n;
}

namespace {

constexpr double kZ95 = 1.959963984540054;

double wilson_halfwidth(std::uint64_t errors, std::uint64_t n) {
    if (n == 0) return 0.5;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double z2 = kZ95 * kZ95;
    return kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
}

struct BlockResult {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t symbols = 0;
    std::uint64_t symbol_flips = 0;
    // per-coherence-block error moments for a cluster-robust CI
    std::uint64_t sum_e2 = 0;
    std::uint64_t sum_en = 0;
    std::uint64_t sum_n2 = 0;
};

void check_plan(const TrialPlan& plan, bool for_r2) {
    if (plan.n_bits == 0) throw std::invalid_argument("TrialPlan: n_bits must be >= 1");
    int min_coh = for_r2 ? 2 : 1;
    if (plan.coherence_bits < min_coh)
        throw std::invalid_argument("TrialPlan: coherence_bits too small for this receiver");
    if (for_r2 && plan.pilot_windows < 2)
        throw std::invalid_argument("TrialPlan: pilot preamble needs at least 2 windows");
    if (plan.channel_mode == ChannelMode::fixed &&
        (!(plan.fixed_channel.mu >= 0.0) || !(plan.fixed_channel.nu >= 0.0)))
        throw std::invalid_argument("TrialPlan: fixed channel gains must be >= 0");
}

// Runs `runner` over work blocks in waves, merging results in block order and
// honouring the early-stop rule; bitwise deterministic for any thread count.
template <typename Runner>
BlockResult run_blocks(const TrialPlan& plan, std::uint64_t n_work_blocks,
                       const Runner& runner) {
    const unsigned nthreads = std::max(1u, plan.threads);
    BlockResult total;
    std::uint64_t next = 0;
    while (next < n_work_blocks) {
        std::uint64_t wave = std::min<std::uint64_t>(nthreads, n_work_blocks - next);
        std::vector<BlockResult> results(wave);
        if (wave == 1 || nthreads == 1) {
            for (std::uint64_t i = 0; i < wave; ++i) results[i] = runner(next + i);
        } else {
            std::vector<std::thread> pool;
            for (std::uint64_t i = 0; i < wave; ++i)
                pool.emplace_back([&, i] { results[i] = runner(next + i); });
            for (auto& th : pool) th.join();
        }
        for (std::uint64_t i = 0; i < wave; ++i) {
            total.bits += results[i].bits;
            total.errors += results[i].errors;
            total.symbols += results[i].symbols;
            total.symbol_flips += results[i].symbol_flips;
            total.sum_e2 += results[i].sum_e2;
            total.sum_en += results[i].sum_en;
            total.sum_n2 += results[i].sum_n2;
            if (plan.stop_errors > 0 && total.errors >= plan.stop_errors)
                return total;
        }
        next += wave;
    }
    return total;
}

BerEstimate finish_estimate(const TrialPlan& plan, const BlockResult& r, McRunStats* stats) {
    if (stats) {
        stats->bits = r.bits;
        stats->errors = r.errors;
        stats->symbols = r.symbols;
        stats->symbol_flips = r.symbol_flips;
    }
    const double n = static_cast<double>(r.bits);
    const double p = r.bits ? static_cast<double>(r.errors) / n : 0.0;
    double hw = wilson_halfwidth(r.errors, r.bits);
    if (plan.channel_mode == ChannelMode::block_fading && r.bits > 0) {
        // errors are correlated within a coherence block; widen the CI with
        // the cluster estimate  sum_b (e_b - p n_b)^2
        double ss = static_cast<double>(r.sum_e2) - 2.0 * p * static_cast<double>(r.sum_en) +
                    p * p * static_cast<double>(r.sum_n2);
        if (ss > 0.0) hw = std::max(hw, kZ95 * std::sqrt(ss) / n);
    }
    return {p, BerMethod::monte_carlo, hw};
}

} // namespace

BerEstimate run_receiver_r1(const TrialPlan& plan, DetectionStrategy strategy,
                            const LinkParams& link, const FadingParams& fading,
                            McRunStats* stats) {
    validate(link);
    check_plan(plan, /*for_r2=*/false);

    const std::uint64_t coh = plan.coherence_bits;
    const std::uint64_t n_coh = (plan.n_bits + coh - 1) / coh;
    const std::uint64_t coh_per_work = std::max<std::uint64_t>(1, 4096 / coh);
    const std::uint64_t n_work = (n_coh + coh_per_work - 1) / coh_per_work;

    // fixed channel: the threshold never changes, compute it once
    Threshold fixed_t{};
    bool fixed = plan.channel_mode == ChannelMode::fixed;
    if (fixed)
        fixed_t = compute_threshold(strategy, plan.fixed_channel.mu, plan.fixed_channel.nu, link);

    auto runner = [&](std::uint64_t wb) {
        BlockResult out;
        RngStream rng(plan.seed, wb);
        const std::uint64_t coh_lo = wb * coh_per_work;
        const std::uint64_t coh_hi = std::min(n_coh, coh_lo + coh_per_work);
        for (std::uint64_t cb = coh_lo; cb < coh_hi; ++cb) {
            ChannelPair ch = fixed ? plan.fixed_channel : sample_channel(rng, fading);
            Threshold t = fixed ? fixed_t : compute_threshold(strategy, ch.mu, ch.nu, link);
            const bool orient = ch.nu >= ch.mu;
            const std::uint64_t bits_here =
                (cb + 1 == n_coh && plan.n_bits % coh) ? plan.n_bits % coh : coh;
            std::uint64_t e = 0;
            for (std::uint64_t i = 0; i < bits_here; ++i) {
                const bool b = rng.bernoulli_half();
                const double y = simulate_y(b ? 1 : 0, ch, link, plan.ambient, rng);
                const bool decide_h1 = y > t.value;
                const bool bhat = orient ? decide_h1 : !decide_h1;
                e += (bhat != b);
            }
            out.bits += bits_here;
            out.errors += e;
            out.sum_e2 += e * e;
            out.sum_en += e * bits_here;
            out.sum_n2 += bits_here * bits_here;
        }
        return out;
    };

    BlockResult total = run_blocks(plan, n_work, runner);
    return finish_estimate(plan, total, stats);
}

BerEstimate run_receiver_r2(const TrialPlan& plan, const LinkParams& link,
                            const FadingParams& fading, DetectionStrategy strategy,
                            McRunStats* stats) {
    validate(link);
    check_plan(plan, /*for_r2=*/true);
    if (strategy != DetectionStrategy::MT)
        throw std::invalid_argument(
            "run_receiver_r2: without CSI only the MT pilot threshold is available");

    const std::uint64_t coh = plan.coherence_bits;
    const std::uint64_t n_coh = (plan.n_bits + coh - 1) / coh;
    const std::uint64_t coh_per_work = std::max<std::uint64_t>(1, 4096 / coh);
    const std::uint64_t n_work = (n_coh + coh_per_work - 1) / coh_per_work;

    const int p0 = (plan.pilot_windows + 1) / 2;
    const int p1 = plan.pilot_windows - p0;

    auto runner = [&](std::uint64_t wb) {
        BlockResult out;
        RngStream rng(plan.seed, wb);
        const std::uint64_t coh_lo = wb * coh_per_work;
        const std::uint64_t coh_hi = std::min(n_coh, coh_lo + coh_per_work);
        for (std::uint64_t cb = coh_lo; cb < coh_hi; ++cb) {
            ChannelPair ch = plan.channel_mode == ChannelMode::fixed
                                 ? plan.fixed_channel
                                 : sample_channel(rng, fading);
            // pilot preamble: both symbol energies, threshold at the midpoint
            double m0 = 0.0, m1 = 0.0;
            for (int i = 0; i < p0; ++i) m0 += simulate_y(0, ch, link, plan.ambient, rng);
            for (int i = 0; i < p1; ++i) m1 += simulate_y(1, ch, link, plan.ambient, rng);
            const double that = 0.5 * (m0 / p0 + m1 / p1);
            const bool orient = ch.nu >= ch.mu;

            // reference symbol, then differentially encoded message bits
            bool b_prev = false;
            bool bhat_prev = simulate_y(0, ch, link, plan.ambient, rng) > that;
            const std::uint64_t bits_here =
                (cb + 1 == n_coh && plan.n_bits % coh) ? plan.n_bits % coh : coh;
            std::uint64_t e = 0;
            for (std::uint64_t i = 0; i < bits_here; ++i) {
                const bool m = rng.bernoulli_half();
                const bool b_cur = b_prev != m; // XOR encode
                const double y = simulate_y(b_cur ? 1 : 0, ch, link, plan.ambient, rng);
                const bool bhat = y > that;
                const bool mhat = bhat != bhat_prev; // XOR decode
                e += (mhat != m);
                out.symbols += 1;
                const bool decided_bit = orient ? bhat : !bhat;
                out.symbol_flips += (decided_bit != b_cur);
                b_prev = b_cur;
                bhat_prev = bhat;
            }
            out.bits += bits_here;
            out.errors += e;
            out.sum_e2 += e * e;
            out.sum_en += e * bits_here;
            out.sum_n2 += bits_here * bits_here;
        }
        return out;
    };

    BlockResult total = run_blocks(plan, n_work, runner);
    return finish_estimate(plan, total, stats);
}

BerEstimate semi_analytic_avg_ber(ReceiverKind receiver, DetectionStrategy strategy,
                                  const LinkParams& link, const FadingParams& fading,
                                  std::uint64_t n_channels, std::uint64_t seed,
                                  unsigned threads) {
    validate(link);
    if (n_channels < 1)
        throw std::invalid_argument("semi_analytic_avg_ber: n_channels must be >= 1");

    constexpr std::uint64_t kChunk = 8192;
    const std::uint64_t n_chunks = (n_channels + kChunk - 1) / kChunk;

    struct ChunkSums {
        double s = 0.0;
        double s2 = 0.0;
        std::uint64_t n = 0;
    };
    std::vector<ChunkSums> sums(n_chunks);

    auto run_chunk = [&](std::uint64_t c) {
        RngStream rng(seed, c);
        const std::uint64_t lo = c * kChunk;
        const std::uint64_t hi = std::min(n_channels, lo + kChunk);
        ChunkSums cs;
        for (std::uint64_t i = lo; i < hi; ++i) {
            ChannelPair ch = sample_channel(rng, fading);
            Threshold t = compute_threshold(strategy, ch.mu, ch.nu, link);
            double v = (receiver == ReceiverKind::R1_CSI) ? cond_ber_r1(ch.mu, ch.nu, t, link)
                                                          : cond_ber_r2(ch.mu, ch.nu, t, link);
            cs.s += v;
            cs.s2 += v * v;
            ++cs.n;
        }
        sums[c] = cs;
    };

    const unsigned nthreads = std::max(1u, threads);
    if (nthreads == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t per = (n_chunks + nthreads - 1) / nthreads;
        for (unsigned t = 0; t < nthreads; ++t) {
            std::uint64_t lo = t * per, hi = std::min<std::uint64_t>(n_chunks, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::uint64_t c = lo; c < hi; ++c) run_chunk(c);
            });
        }
        for (auto& th : pool) th.join();
    }

    double s = 0.0, s2 = 0.0;
    for (const ChunkSums& cs : sums) {
        s += cs.s;
        s2 += cs.s2;
    }
    const double n = static_cast<double>(n_channels);
    const double mean = s / n;
    double ci = 0.0;
    if (n_channels > 1) {
        double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
        ci = kZ95 * std::sqrt(var / n);
    }
    return {mean, BerMethod::semi_analytic, ci};
}

} // namespace amber
