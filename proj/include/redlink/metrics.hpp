#pragma once
/*
 * Per-trace reliability metrics: loss ratio, latency summary, deadline miss
 * ratios, empirical complementary CDF, lag autocorrelation of the loss
 * indicator sequence, and loss-burst census.
 *
 * Conventions used throughout:
 *   - a deadline miss is strict (d > H); lost packets miss every deadline,
 *   - the 99.99th percentile is nearest-rank over received latencies only,
 *   - standard deviation is the unbiased estimate,
 *   - autocorrelation at lag k averages l_i * l_{i+k} over i = 1..N-K with
 *     the same fixed denominator N-K for every lag, K being the largest lag.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "redlink/trace.hpp"

namespace redlink {

/// {1, 3, 10, 30} ms in microseconds.
std::span<const Microseconds> default_deadlines();

/// Fraction of packets lost.  Throws std::domain_error on an empty trace.
double loss_ratio(const ChannelTrace& trace);

struct LatencySummary {
    double mean_us = 0.0;
    double std_us = 0.0;          // unbiased; 0 for a single sample
    Microseconds p9999_us = 0;    // nearest-rank 99.99th percentile
    Microseconds max_us = 0;
};

/// Summary over received latencies.  Throws std::domain_error when the trace
/// has no receptions.
LatencySummary latency_summary(const ChannelTrace& trace);

/// Fraction of packets that are lost or exceed the deadline (strictly).
double deadline_miss_ratio(const ChannelTrace& trace, Microseconds deadline_us);

/// Empirical complementary CDF over received latencies: the right-continuous
/// step function F(h) = fraction of latencies strictly greater than h.
/// Stored as strictly increasing jump points with the value that holds from
/// each jump point up to the next one.
class ECcdf {
public:
    /// Throws std::domain_error on an empty latency set.
    static ECcdf from_latencies(std::vector<Microseconds> latencies);

    /// Assembles a step function from precomputed points.  Throws
    /// std::invalid_argument when h is not strictly increasing or sizes
    /// differ.
    static ECcdf from_breakpoints(std::vector<Microseconds> h, std::vector<double> v);

    double value_at(Microseconds h) const;
    double value_before(Microseconds h) const; // left limit at h

    const std::vector<Microseconds>& breakpoints() const { return h_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<Microseconds> h_;
    std::vector<double> v_;
};

ECcdf eccdf(const ChannelTrace& trace);

struct Autocorrelation {
    std::vector<double> r;                  // R(k) for k = 0..max_lag
    std::optional<std::vector<double>> pi;  // pi(k) = R(k)/loss^2; absent when lossless
};

/// Throws std::domain_error when max_lag < 0 or max_lag >= N.
Autocorrelation loss_autocorrelation(const ChannelTrace& trace, std::int64_t max_lag);

/// min(1000, n/10), the analysis default.
std::int64_t default_max_lag(std::int64_t n);

/// Census of maximal runs of consecutive losses.  Runs touching either end
/// of the trace count like any other.
struct BurstCensus {
    std::map<std::int64_t, std::int64_t> count_by_length;
    std::int64_t b_max = 0;

    std::int64_t total_losses() const;
};

BurstCensus burst_census(const ChannelTrace& trace);

struct MetricsReport {
    std::int64_t n = 0;
    std::int64_t n_rx = 0;
    std::int64_t n_lost = 0;
    double loss = 0.0;
    std::optional<LatencySummary> latency;  // absent when nothing was received
    std::map<Microseconds, double> dmr;
    std::optional<ECcdf> ccdf;              // absent when nothing was received
    Autocorrelation autocorr;
    BurstCensus bursts;
};

/// Full metric set for one trace.  Empty deadline span selects the default
/// set; unset max_lag selects default_max_lag(n).
MetricsReport metrics_report(const ChannelTrace& trace,
                             std::span<const Microseconds> deadlines = {},
                             std::optional<std::int64_t> max_lag = std::nullopt);

} // namespace redlink
