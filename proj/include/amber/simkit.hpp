#ifndef AMBER_SIMKIT_HPP
#define AMBER_SIMKIT_HPP

#include "amber/ber.hpp"
#include "amber/detection.hpp"
#include "amber/energy_stats.hpp"
#include "amber/fading.hpp"
#include "amber/rng.hpp"

#include <cstdint>

namespace amber {

// How the ambient waveform is drawn. Both satisfy the constant-window-energy
// property (1/N) sum |x(n)|^2 = e_bar exactly: constant_envelope samples have
// unit modulus and random phase, complex_gaussian_normalized renormalizes
// each window of CN(0,1) draws.
enum class AmbientKind { constant_envelope, complex_gaussian_normalized };

std::string_view to_string(AmbientKind k);
AmbientKind ambient_from_string(std::string_view name);

enum class ChannelMode { fixed, block_fading };

struct TrialPlan {
    std::uint64_t n_bits = 0;
    std::uint64_t seed = 0;
    ChannelMode channel_mode = ChannelMode::block_fading;
    int coherence_bits = 2;          // bits per channel draw; >= 2 for R2
    ChannelPair fixed_channel{};     // used when channel_mode == fixed
    AmbientKind ambient = AmbientKind::constant_envelope;
    std::uint64_t stop_errors = 0;   // stop early once this many errors seen (0 = off)
    int pilot_windows = 16;          // R2 threshold preamble per coherence block
    unsigned threads = 1;            // result is bitwise independent of this
};

// Extra counters a caller can tap alongside the BER estimate.
struct McRunStats {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t symbols = 0;        // R2: message windows observed
    std::uint64_t symbol_flips = 0;   // R2: raw single-symbol decision flips
};

// One realization of the averaged energy Y, built sample by sample from
// y(n) = h x(n) + w(n) with h the gain of the transmitted bit. Never draws
// from the analytic distribution.
double simulate_y(int bit, const ChannelPair& channel, const LinkParams& link,
                  AmbientKind ambient, RngStream& rng);

// Threshold receiver with CSI: per coherence block the threshold is computed
// from the known (mu, nu) with the requested strategy and decisions are
// oriented by which hypothesis has the larger gain.
BerEstimate run_receiver_r1(const TrialPlan& plan, DetectionStrategy strategy,
                            const LinkParams& link, const FadingParams& fading,
                            McRunStats* stats = nullptr);

// Differential receiver without CSI: the threshold is the midpoint of pilot
// energy means measured over a short preamble, message bits are decoded as
// the XOR of consecutive raw threshold decisions. Only the MT rule is
// meaningful here.
BerEstimate run_receiver_r2(const TrialPlan& plan, const LinkParams& link,
                            const FadingParams& fading,
                            DetectionStrategy strategy = DetectionStrategy::MT,
                            McRunStats* stats = nullptr);

// Channel-sampled average of the analytic conditional BER: bridges the full
// symbol-level simulation and the quadrature of the average-BER integral.
BerEstimate semi_analytic_avg_ber(ReceiverKind receiver, DetectionStrategy strategy,
                                  const LinkParams& link, const FadingParams& fading,
                                  std::uint64_t n_channels, std::uint64_t seed,
                                  unsigned threads = 1);

} // namespace amber

#endif
