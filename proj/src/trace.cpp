#include "redlink/trace.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace redlink {

std::string_view channel_label(ChannelId id) {
    switch (id) {
    case ChannelId::A: return "A";
    case ChannelId::B: return "B";
    case ChannelId::Redundant: return "AB";
    }
    return "?";
}

std::optional<Microseconds> ChannelTrace::received(std::size_t i) const {
    const auto& rx = records[i].t_rx;
    if (rx && *rx <= trial_end) return rx;
    return std::nullopt;
}

std::optional<Microseconds> ChannelTrace::latency(std::size_t i) const {
    if (auto rx = received(i)) return *rx - records[i].t_tx;
    return std::nullopt;
}

std::int64_t ChannelTrace::n_lost() const {
    std::int64_t lost = 0;
    for (std::size_t i = 0; i < records.size(); ++i) lost += loss_indicator(i);
    return lost;
}

void validate(const ChannelTrace& trace) {
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const PacketRecord& r = trace.records[i];
        if (i > 0 && r.seq <= trace.records[i - 1].seq)
            throw std::invalid_argument("trace " + std::string(channel_label(trace.channel)) +
                                        ": seq not strictly increasing at index " + std::to_string(i));
        if (r.t_rx && *r.t_rx < r.t_tx)
            throw std::invalid_argument("trace " + std::string(channel_label(trace.channel)) +
                                        ": t_rx precedes t_tx for seq " + std::to_string(r.seq));
    }
}

void validate(const Trial& trial) {
    validate(trial.trace_a);
    validate(trial.trace_b);
    if (trial.trace_a.size() != trial.trace_b.size())
        throw std::invalid_argument("trial: channel traces differ in length");
    const std::int64_t n = trial.trace_a.size();
    for (std::int64_t i = 0; i < n; ++i) {
        const PacketRecord& a = trial.trace_a.records[i];
        const PacketRecord& b = trial.trace_b.records[i];
        if (a.seq != b.seq)
            throw std::invalid_argument("trial: seq mismatch at index " + std::to_string(i));
        if (std::abs(a.t_tx - b.t_tx) > trial.skew_bound_us)
            throw std::invalid_argument("trial: transmit skew exceeds bound for seq " +
                                        std::to_string(a.seq));
        const Microseconds nominal = trial.trace_a.records[0].t_tx + i * trial.period_us;
        if (trial.period_us > 0 && std::abs(a.t_tx - nominal) > trial.skew_bound_us)
            throw std::invalid_argument("trial: channel A transmission off the period grid at seq " +
                                        std::to_string(a.seq));
    }
}

ChannelTrace merge_redundant(const Trial& trial) {
    validate(trial);
    ChannelTrace merged;
    merged.channel = ChannelId::Redundant;
    merged.trial_end = std::max(trial.trace_a.trial_end, trial.trace_b.trial_end);
    merged.records.reserve(trial.trace_a.records.size());
    for (std::size_t i = 0; i < trial.trace_a.records.size(); ++i) {
        const PacketRecord& a = trial.trace_a.records[i];
        const PacketRecord& b = trial.trace_b.records[i];
        PacketRecord r;
        r.seq = a.seq;
        r.t_tx = std::min(a.t_tx, b.t_tx);
        const auto da = trial.trace_a.latency(i);
        const auto db = trial.trace_b.latency(i);
        if (da || db) {
            Microseconds d = da && db ? std::min(*da, *db) : (da ? *da : *db);
            r.t_rx = r.t_tx + d;
        }
        merged.records.push_back(r);
    }
    return merged;
}

} // namespace redlink
