#include "redlink/lre.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace redlink {

std::pair<TaggedCopy, TaggedCopy> duplicate(std::int64_t seq, Microseconds t_request,
                                            Microseconds skew, Microseconds skew_bound) {
    if (skew_bound < 0) throw std::domain_error("duplicate: negative skew bound");
    if (skew < -skew_bound || skew > skew_bound)
        throw std::domain_error("duplicate: skew " + std::to_string(skew) +
                                " exceeds bound " + std::to_string(skew_bound));
    return {TaggedCopy{seq, ChannelId::A, t_request},
            TaggedCopy{seq, ChannelId::B, t_request + skew}};
}

Deduplicator::Deduplicator(std::int64_t window_capacity) : capacity_(window_capacity) {
    if (window_capacity <= 0)
        throw std::invalid_argument("Deduplicator: window capacity must be positive");
}

RxVerdict Deduplicator::receive(const TaggedCopy& copy, Microseconds t_rx) {
    if (t_rx < copy.t_tx)
        throw std::invalid_argument("Deduplicator: t_rx precedes t_tx for seq " +
                                    std::to_string(copy.seq));
    if (seen_.empty()) floor_ = copy.seq; // first copy anchors the window
    if (copy.seq < floor_) return RxVerdict::Stale;
    std::int64_t idx = copy.seq - floor_;
    if (idx >= capacity_) {
        // Slide the window up so that copy.seq is the newest trackable seq.
        const std::int64_t shift = idx - capacity_ + 1;
        if (shift >= static_cast<std::int64_t>(seen_.size()))
            seen_.clear();
        else
            seen_.erase(seen_.begin(), seen_.begin() + shift);
        floor_ += shift;
        idx = capacity_ - 1;
    }
    if (idx >= static_cast<std::int64_t>(seen_.size())) seen_.resize(idx + 1, false);
    if (seen_[idx]) return RxVerdict::Discard;
    seen_[idx] = true;
    ++delivered_;
    return RxVerdict::Deliver;
}

TxSchedule tx_schedule(const Trial& trial) {
    TxSchedule sched;
    sched.t_tx_a.reserve(trial.trace_a.records.size());
    sched.t_tx_b.reserve(trial.trace_b.records.size());
    for (std::size_t i = 0; i < trial.trace_a.records.size(); ++i) {
        if (trial.trace_a.records[i].seq != static_cast<std::int64_t>(i) + 1)
            throw std::invalid_argument("tx_schedule: trial seqs must run 1..N");
    }
    for (const PacketRecord& r : trial.trace_a.records) sched.t_tx_a.push_back(r.t_tx);
    for (const PacketRecord& r : trial.trace_b.records) sched.t_tx_b.push_back(r.t_tx);
    sched.trial_end = std::max(trial.trace_a.trial_end, trial.trace_b.trial_end);
    return sched;
}

std::vector<Arrival> arrival_log(const Trial& trial) {
    std::vector<Arrival> log;
    for (const ChannelTrace* trace : {&trial.trace_a, &trial.trace_b}) {
        for (std::size_t i = 0; i < trace->records.size(); ++i) {
            if (auto rx = trace->received(i)) {
                const PacketRecord& r = trace->records[i];
                log.push_back({TaggedCopy{r.seq, trace->channel, r.t_tx}, *rx});
            }
        }
    }
    std::sort(log.begin(), log.end(), [](const Arrival& x, const Arrival& y) {
        if (x.t_rx != y.t_rx) return x.t_rx < y.t_rx;
        return x.copy.channel < y.copy.channel;
    });
    return log;
}

ChannelTrace run_trial(const TxSchedule& sched, std::span<const Arrival> arrivals,
                       std::int64_t window_capacity) {
    if (sched.t_tx_a.size() != sched.t_tx_b.size())
        throw std::invalid_argument("run_trial: schedule channel lengths differ");
    const std::int64_t n = static_cast<std::int64_t>(sched.t_tx_a.size());

    Deduplicator dedup(window_capacity);
    std::vector<std::optional<Microseconds>> best(n);
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        const Arrival& ev = arrivals[k];
        if (k > 0) {
            const Arrival& prev = arrivals[k - 1];
            const bool ordered = prev.t_rx < ev.t_rx ||
                                 (prev.t_rx == ev.t_rx && prev.copy.channel <= ev.copy.channel);
            if (!ordered) throw std::invalid_argument("run_trial: arrivals not sorted");
        }
        if (ev.copy.seq < 1 || ev.copy.seq > n)
            throw std::invalid_argument("run_trial: arrival seq outside schedule");
        if (ev.t_rx > sched.trial_end) continue; // reception closed
        dedup.receive(ev.copy, ev.t_rx);
        // Duplicates still refine the latency bookkeeping: the merged-link
        // latency is the minimum over all copies, not the first arrival's.
        const Microseconds d = ev.t_rx - ev.copy.t_tx;
        auto& b = best[ev.copy.seq - 1];
        if (!b || d < *b) b = d;
    }

    ChannelTrace out;
    out.channel = ChannelId::Redundant;
    out.trial_end = sched.trial_end;
    out.records.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
        PacketRecord r;
        r.seq = i + 1;
        r.t_tx = std::min(sched.t_tx_a[i], sched.t_tx_b[i]);
        if (best[i]) r.t_rx = r.t_tx + *best[i];
        out.records.push_back(r);
    }
    return out;
}

} // namespace redlink
