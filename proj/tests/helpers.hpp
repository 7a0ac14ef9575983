#pragma once
/*
 * Shared test fixtures: compact trace builders and randomized trial
 * generators.  Latency vectors use nullopt for lost packets.
 */

#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "redlink/trace.hpp"

namespace testutil {

using redlink::ChannelId;
using redlink::ChannelTrace;
using redlink::Microseconds;
using redlink::PacketRecord;
using redlink::Trial;

using Latencies = std::vector<std::optional<Microseconds>>;

/// Trace with transmissions on the period grid and the given per-packet
/// latencies.  trial_end < 0 selects last transmit + 5 s.
inline ChannelTrace make_trace(ChannelId ch, const Latencies& latencies,
                               Microseconds period = 10'000, Microseconds trial_end = -1) {
    ChannelTrace t;
    t.channel = ch;
    for (std::size_t i = 0; i < latencies.size(); ++i) {
        PacketRecord r;
        r.seq = static_cast<std::int64_t>(i) + 1;
        r.t_tx = static_cast<Microseconds>(i) * period;
        if (latencies[i]) r.t_rx = r.t_tx + *latencies[i];
        t.records.push_back(r);
    }
    if (trial_end < 0)
        trial_end = (latencies.empty() ? 0 : t.records.back().t_tx) + 5'000'000;
    t.trial_end = trial_end;
    return t;
}

/// Loss pattern from a bit string ('1' = lost); received packets share one
/// constant latency.
inline ChannelTrace trace_from_bits(std::string_view bits, Microseconds latency = 900,
                                    Microseconds period = 10'000) {
    Latencies lat;
    for (char c : bits) lat.push_back(c == '1' ? std::nullopt : std::optional<Microseconds>(latency));
    return make_trace(ChannelId::A, lat, period);
}

inline Trial make_trial(const Latencies& lat_a, const Latencies& lat_b,
                        Microseconds period = 10'000, Microseconds trial_end = -1) {
    Trial t;
    t.period_us = period;
    t.trace_a = make_trace(ChannelId::A, lat_a, period, trial_end);
    t.trace_b = make_trace(ChannelId::B, lat_b, period, trial_end);
    t.trace_b.channel = ChannelId::B;
    return t;
}

/// Randomized trial with per-packet transmit skew, losses, wide latency
/// spread (reordering across many periods) and occasional receptions past
/// trial_end.
inline Trial random_trial(std::mt19937_64& rng, std::int64_t n, Microseconds period = 1'000,
                          Microseconds skew_bound = 90, double loss_prob = 0.3,
                          Microseconds max_latency = 20'000) {
    std::uniform_int_distribution<Microseconds> skew(-skew_bound, skew_bound);
    std::uniform_int_distribution<Microseconds> lat(0, max_latency);
    std::bernoulli_distribution lost(loss_prob);

    Trial t;
    t.period_us = period;
    t.skew_bound_us = skew_bound;
    t.trace_a.channel = ChannelId::A;
    t.trace_b.channel = ChannelId::B;
    Microseconds last_tx = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        PacketRecord a, b;
        a.seq = b.seq = i + 1;
        a.t_tx = i * period;
        b.t_tx = a.t_tx + skew(rng);
        if (!lost(rng)) a.t_rx = a.t_tx + lat(rng);
        if (!lost(rng)) b.t_rx = b.t_tx + lat(rng);
        last_tx = std::max({last_tx, a.t_tx, b.t_tx});
        t.trace_a.records.push_back(a);
        t.trace_b.records.push_back(b);
    }
    // A grace window shorter than the latency spread exercises the
    // reception-closed path.
    const Microseconds grace = max_latency / 2;
    t.trace_a.trial_end = t.trace_b.trial_end = last_tx + grace;
    return t;
}

} // namespace testutil
