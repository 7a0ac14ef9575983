#pragma once
/*
 * Link redundancy entity: sender-side duplication and receiver-side
 * first-copy-wins de-duplication keyed on shared sequence numbers.
 *
 * The receiver tracks a sliding window of outstanding sequence numbers.  The
 * first copy of a sequence delivers; the second discards.  A copy whose
 * sequence has already slid below the window floor is discarded with a
 * distinct stale verdict.  The window capacity must exceed the largest
 * reorder span in the arrival stream for online replay to match the offline
 * merge.
 */

#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "redlink/trace.hpp"

namespace redlink {

inline constexpr std::int64_t kDefaultWindowCapacity = 2048;
inline constexpr Microseconds kDefaultSkewBound = 90;

/// One transmitted copy, tagged with the channel it went out on.
struct TaggedCopy {
    std::int64_t seq = 0;
    ChannelId channel = ChannelId::A;
    Microseconds t_tx = 0;

    bool operator==(const TaggedCopy&) const = default;
};

/// Sender-side duplication: copy A transmits at t_request, copy B at
/// t_request + skew.  Throws std::domain_error when |skew| > skew_bound.
std::pair<TaggedCopy, TaggedCopy> duplicate(std::int64_t seq, Microseconds t_request,
                                            Microseconds skew,
                                            Microseconds skew_bound = kDefaultSkewBound);

enum class RxVerdict { Deliver, Discard, Stale };

class Deduplicator {
public:
    explicit Deduplicator(std::int64_t window_capacity = kDefaultWindowCapacity);

    /// Processes one arriving copy.  Throws std::invalid_argument when
    /// t_rx < copy.t_tx.
    RxVerdict receive(const TaggedCopy& copy, Microseconds t_rx);

    std::int64_t deliver_count() const { return delivered_; }

private:
    std::int64_t capacity_;
    std::int64_t floor_ = 0;      // lowest trackable seq; below is stale
    std::deque<bool> seen_;       // seen_[k]: seq floor_+k already delivered
    std::int64_t delivered_ = 0;
};

/// One receiver-side log entry.
struct Arrival {
    TaggedCopy copy;
    Microseconds t_rx = 0;

    bool operator==(const Arrival&) const = default;
};

/// Transmit bookkeeping for one trial, indexed by seq-1.
struct TxSchedule {
    std::vector<Microseconds> t_tx_a;
    std::vector<Microseconds> t_tx_b;
    Microseconds trial_end = 0;
};

TxSchedule tx_schedule(const Trial& trial);

/// All received copies of a trial in arrival order (ties: channel A first).
std::vector<Arrival> arrival_log(const Trial& trial);

/// Replays an arrival stream through the de-duplicator and reconstructs the
/// redundant-link trace.  Arrivals must be sorted by t_rx with ties ordered
/// channel A before B (throws std::invalid_argument otherwise).  Copies
/// arriving after sched.trial_end are ignored: reception has closed.  Per
/// packet the recorded latency is the minimum over all observed copies, so
/// the result equals merge_redundant() of the underlying trial whenever the
/// window capacity covers the reorder span.
ChannelTrace run_trial(const TxSchedule& sched, std::span<const Arrival> arrivals,
                       std::int64_t window_capacity = kDefaultWindowCapacity);

} // namespace redlink
