#include "redlink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redlink {

namespace {

constexpr Microseconds kDefaultDeadlines[] = {1000, 3000, 10000, 30000};

std::vector<Microseconds> received_latencies(const ChannelTrace& trace) {
    std::vector<Microseconds> out;
    out.reserve(trace.records.size());
    for (std::size_t i = 0; i < trace.records.size(); ++i)
        if (auto d = trace.latency(i)) out.push_back(*d);
    return out;
}

} // namespace

std::span<const Microseconds> default_deadlines() { return kDefaultDeadlines; }

double loss_ratio(const ChannelTrace& trace) {
    if (trace.records.empty()) throw std::domain_error("loss_ratio: empty trace");
    return static_cast<double>(trace.n_lost()) / static_cast<double>(trace.size());
}

LatencySummary latency_summary(const ChannelTrace& trace) {
    std::vector<Microseconds> d = received_latencies(trace);
    if (d.empty()) throw std::domain_error("latency_summary: no received packets");
    std::sort(d.begin(), d.end());
    const std::int64_t n = static_cast<std::int64_t>(d.size());

    double sum = 0.0;
    for (Microseconds x : d) sum += static_cast<double>(x);
    const double mean = sum / static_cast<double>(n);

    double ss = 0.0;
    for (Microseconds x : d) {
        const double e = static_cast<double>(x) - mean;
        ss += e * e;
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    const std::int64_t rank = (9999 * n + 9999) / 10000; // ceil(0.9999 n), 1-based
    LatencySummary s;
    s.mean_us = mean;
    s.std_us = sd;
    s.p9999_us = d[rank - 1];
    s.max_us = d.back();
    return s;
}

double deadline_miss_ratio(const ChannelTrace& trace, Microseconds deadline_us) {
    if (trace.records.empty()) throw std::domain_error("deadline_miss_ratio: empty trace");
    std::int64_t miss = 0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        auto d = trace.latency(i);
        if (!d || *d > deadline_us) ++miss;
    }
    return static_cast<double>(miss) / static_cast<double>(trace.size());
}

ECcdf ECcdf::from_latencies(std::vector<Microseconds> latencies) {
    if (latencies.empty()) throw std::domain_error("ECcdf: empty latency set");
    std::sort(latencies.begin(), latencies.end());
    const double n = static_cast<double>(latencies.size());
    ECcdf f;
    for (std::size_t i = 0; i < latencies.size(); ++i) {
        if (i + 1 < latencies.size() && latencies[i + 1] == latencies[i]) continue;
        // i is the last occurrence of this value; everything after exceeds it.
        f.h_.push_back(latencies[i]);
        f.v_.push_back(static_cast<double>(latencies.size() - i - 1) / n);
    }
    return f;
}

ECcdf ECcdf::from_breakpoints(std::vector<Microseconds> h, std::vector<double> v) {
    if (h.size() != v.size() || h.empty())
        throw std::invalid_argument("ECcdf: breakpoint/value size mismatch");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (h[i] <= h[i - 1]) throw std::invalid_argument("ECcdf: breakpoints not increasing");
    ECcdf f;
    f.h_ = std::move(h);
    f.v_ = std::move(v);
    return f;
}

double ECcdf::value_at(Microseconds h) const {
    auto it = std::upper_bound(h_.begin(), h_.end(), h);
    if (it == h_.begin()) return 1.0;
    return v_[static_cast<std::size_t>(it - h_.begin()) - 1];
}

double ECcdf::value_before(Microseconds h) const {
    auto it = std::lower_bound(h_.begin(), h_.end(), h);
    if (it == h_.begin()) return 1.0;
    return v_[static_cast<std::size_t>(it - h_.begin()) - 1];
}

ECcdf eccdf(const ChannelTrace& trace) { return ECcdf::from_latencies(received_latencies(trace)); }

std::int64_t default_max_lag(std::int64_t n) { return std::min<std::int64_t>(1000, n / 10); }

Autocorrelation loss_autocorrelation(const ChannelTrace& trace, std::int64_t max_lag) {
    const std::int64_t n = trace.size();
    if (max_lag < 0 || max_lag >= n)
        throw std::domain_error("loss_autocorrelation: max_lag must satisfy 0 <= K < N");

    std::vector<std::int64_t> pos; // 1-based indices of lost packets
    for (std::int64_t i = 0; i < n; ++i)
        if (trace.loss_indicator(static_cast<std::size_t>(i))) pos.push_back(i + 1);

    // Loss indicators are sparse in practice, so accumulate pair counts over
    // loss positions instead of scanning the dense product for every lag.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(max_lag) + 1, 0);
    const std::int64_t i_max = n - max_lag; // common summation range for all lags
    for (std::size_t a = 0; a < pos.size(); ++a) {
        const std::int64_t p = pos[a];
        if (p > i_max) break;
        ++counts[0];
        for (std::size_t b = a + 1; b < pos.size() && pos[b] - p <= max_lag; ++b)
            ++counts[pos[b] - p];
    }

    Autocorrelation ac;
    const double denom = static_cast<double>(i_max);
    ac.r.reserve(counts.size());
    for (std::int64_t c : counts) ac.r.push_back(static_cast<double>(c) / denom);

    const std::int64_t n_lost = static_cast<std::int64_t>(pos.size());
    if (n_lost > 0) {
        const double y = static_cast<double>(n_lost) / static_cast<double>(n);
        std::vector<double> pi;
        pi.reserve(ac.r.size());
        for (double r : ac.r) pi.push_back(r / (y * y));
        ac.pi = std::move(pi);
    }
    return ac;
}

std::int64_t BurstCensus::total_losses() const {
    std::int64_t sum = 0;
    for (const auto& [len, cnt] : count_by_length) sum += len * cnt;
    return sum;
}

BurstCensus burst_census(const ChannelTrace& trace) {
    BurstCensus census;
    std::int64_t run = 0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        if (trace.loss_indicator(i)) {
            ++run;
        } else if (run > 0) {
            ++census.count_by_length[run];
            census.b_max = std::max(census.b_max, run);
            run = 0;
        }
    }
    if (run > 0) {
        ++census.count_by_length[run];
        census.b_max = std::max(census.b_max, run);
    }
    return census;
}

MetricsReport metrics_report(const ChannelTrace& trace, std::span<const Microseconds> deadlines,
                             std::optional<std::int64_t> max_lag) {
    if (trace.records.empty()) throw std::domain_error("metrics_report: empty trace");
    if (deadlines.empty()) deadlines = default_deadlines();

    MetricsReport rep;
    rep.n = trace.size();
    rep.n_lost = trace.n_lost();
    rep.n_rx = rep.n - rep.n_lost;
    rep.loss = static_cast<double>(rep.n_lost) / static_cast<double>(rep.n);
    if (rep.n_rx > 0) {
        rep.latency = latency_summary(trace);
        rep.ccdf = eccdf(trace);
    }
    for (Microseconds h : deadlines) rep.dmr[h] = deadline_miss_ratio(trace, h);
    rep.autocorr = loss_autocorrelation(trace, max_lag ? *max_lag : default_max_lag(rep.n));
    rep.bursts = burst_census(trace);
    return rep;
}

} // namespace redlink
