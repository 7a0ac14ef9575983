#pragma once
/*
 * Two-channel trial simulator.
 *
 * Packets go out every period_us; channel A transmits on the period grid and
 * channel B trails it by a per-packet skew drawn uniformly within the skew
 * bound.  Each channel applies a service model (multicast one-shot or unicast
 * with retransmissions), an optional Gilbert-Elliott burst-loss chain, and
 * any interferers in scope.  Interferer events land in packet slots: an event
 * at time t affects the packet whose transmit slot [i*T, (i+1)*T) contains t,
 * raising its loss probability and adding to its delay.
 *
 * Loss causes combine as independent failure sources: a transmission attempt
 * survives with the product of the per-cause survival probabilities.  Latency
 * contributions are additive.  A copy whose reception would land after
 * trial_end (last transmission plus grace window) is counted as lost.
 *
 * Every stochastic component draws from its own seeded substream, so a
 * channel's outcome stream does not move when components elsewhere in the
 * config are added or removed, and identical (config, seed) reproduces the
 * identical trial.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "redlink/trace.hpp"

namespace redlink {

struct ExponentialTail {
    double mean_us = 150.0;
};
struct LogNormalTail {
    double mu = 5.0; // of log-microseconds
    double sigma = 0.5;
};
struct ConstantTail {
    double value_us = 0.0;
};
using TailLaw = std::variant<ExponentialTail, LogNormalTail, ConstantTail>;

struct UnicastService {
    double per_attempt_error_prob = 0.1;
    int max_retries = 7;
    Microseconds base_latency_us = 600;
    Microseconds retry_latency_us = 600; // added per retransmission
    TailLaw tail = ExponentialTail{};
};

struct MulticastService {
    double error_prob = 0.01;
    Microseconds base_latency_us = 600;
    TailLaw tail = ExponentialTail{};
};

using ServiceModel = std::variant<UnicastService, MulticastService>;

/// Two-state Markov burst-loss model.  The chain starts in its stationary
/// distribution and steps once per packet.
struct GilbertElliott {
    double p_good_to_bad = 0.01;
    double p_bad_to_good = 0.3;
    double error_prob_good = 0.0;
    double error_prob_bad = 0.5;

    double stationary_bad() const;
    double stationary_error_prob() const;
};

enum class InterfererScope { ChannelA, ChannelB, Both };

/// Regular event train, e.g. a management beacon cadence.
struct PeriodicInterferer {
    Microseconds period_us = 102'400;
    Microseconds jitter_us = 0;   // uniform per-event offset
    double hit_prob = 1.0;        // per-event gate
    Microseconds extra_delay_us = 0;
    double extra_loss_prob = 0.0;
};

/// Bursts of closely spaced packets with exponential gaps between bursts,
/// e.g. a bulk transfer sharing the band.
struct BurstyPoissonInterferer {
    double mean_gap_us = 1'000'000.0;
    int burst_packets = 700;
    Microseconds burst_spacing_us = 500;
    Microseconds extra_delay_us = 0;
    double extra_loss_prob = 0.0;
};

struct Interferer {
    std::variant<PeriodicInterferer, BurstyPoissonInterferer> model = PeriodicInterferer{};
    InterfererScope scope = InterfererScope::ChannelA;
    /// Probability that an event in Both scope also hits channel B (every
    /// event hits channel A).  Ignored for single-channel scopes.
    double coupling = 0.0;
};

/// 802.11 beacon cadence on the slow channel.
Interferer beacon_preset();
/// Saturated co-channel transfer: 700-packet bursts, 500 us spacing, 1 s
/// mean exponential gaps.
Interferer lab5ghz_preset();

struct ChannelModel {
    ServiceModel service = MulticastService{};
    std::optional<GilbertElliott> gilbert_elliott;
};

struct SimConfig {
    std::int64_t n_packets = 864'000;
    Microseconds period_us = 100'000;
    Microseconds skew_bound_us = 90;
    Microseconds grace_us = 5'000'000;
    std::uint64_t seed = 1;
    ChannelModel channel_a;
    ChannelModel channel_b;
    std::vector<Interferer> interferers;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SimConfig& config);

/// Non-fatal model caveats (e.g. base latency exceeding the period, which
/// makes consecutive packets overlap in flight).
std::vector<std::string> config_warnings(const SimConfig& config);

/// Runs one trial.  Deterministic in (config, config.seed).
Trial simulate_trial(const SimConfig& config);

/// Per-packet hit masks (channel A, channel B) produced by one interferer
/// over n_packets slots of period_us, using the same event machinery as
/// simulate_trial.  Exposed for studying the coupling behaviour directly.
std::pair<std::vector<char>, std::vector<char>> coupled_event_mask(const Interferer& interferer,
                                                                   Microseconds period_us,
                                                                   std::uint64_t seed,
                                                                   std::int64_t n_packets);

} // namespace redlink
