#pragma once
/*
 * Packet-level trace model for a duplicated wireless link.
 *
 * A trial sends the same numbered packet stream over two channels (A and B).
 * Each channel keeps one record per packet: transmit time, and reception time
 * if a copy ever arrived.  All timestamps are integer microseconds from the
 * trial epoch.  Reception closes at trial_end (last transmission plus a grace
 * window); a copy that lands after that is counted as lost.
 */

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace redlink {

using Microseconds = std::int64_t;

enum class ChannelId { A, B, Redundant };

std::string_view channel_label(ChannelId id);

/// One packet copy on one channel.  t_rx is absent when the copy was never
/// received at all.
struct PacketRecord {
    std::int64_t seq = 0;
    Microseconds t_tx = 0;
    std::optional<Microseconds> t_rx;

    bool operator==(const PacketRecord&) const = default;
};

/// Time-ordered record of one channel over one trial.
struct ChannelTrace {
    ChannelId channel = ChannelId::A;
    Microseconds trial_end = 0;
    std::vector<PacketRecord> records;

    std::int64_t size() const { return static_cast<std::int64_t>(records.size()); }

    /// Reception time of record i, or nullopt if the copy is lost.  A t_rx
    /// past trial_end does not count as a reception.
    std::optional<Microseconds> received(std::size_t i) const;

    /// 1 when record i was lost, 0 when it was received in time.
    int loss_indicator(std::size_t i) const { return received(i) ? 0 : 1; }

    /// One-way latency of record i, or nullopt for a lost packet.
    std::optional<Microseconds> latency(std::size_t i) const;

    std::int64_t n_lost() const;
    std::int64_t n_received() const { return size() - n_lost(); }

    bool operator==(const ChannelTrace&) const = default;
};

/// Throws std::invalid_argument when seq is not strictly increasing or some
/// present t_rx precedes its t_tx.
void validate(const ChannelTrace& trace);

/// A duplicated-transmission trial: one packet stream, two channels.
struct Trial {
    Microseconds period_us = 0;
    Microseconds skew_bound_us = 90;
    ChannelTrace trace_a;
    ChannelTrace trace_b;

    std::int64_t n_packets() const { return trace_a.size(); }

    bool operator==(const Trial&) const = default;
};

/// Validates both traces plus the pairing rules: equal length, aligned seq,
/// per-packet transmit skew within skew_bound_us, and channel A transmissions
/// on the nominal period grid (within skew_bound_us).
void validate(const Trial& trial);

/// First-copy-wins merge of the two channels.  Packet i of the merged link is
/// lost only when both copies are lost; otherwise its latency is the minimum
/// of the per-copy latencies.  Transmit time is the earlier of the two copies,
/// and the stored reception time is t_tx + latency, so that latency() on the
/// merged trace reproduces the minimum exactly even under transmit skew.
ChannelTrace merge_redundant(const Trial& trial);

} // namespace redlink
