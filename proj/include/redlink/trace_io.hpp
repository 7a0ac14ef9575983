#pragma once
/*
 * Trace persistence and report serialization.
 *
 * Trace files are plain CSV, one row per packet, both channels side by side:
 *
 *   # period_us=10000
 *   # skew_bound_us=90
 *   # trial_end_us=14995050
 *   # seed=42
 *   seq,tT_A_us,tR_A_us,tT_B_us,tR_B_us
 *   1,0,850,50,1200
 *   2,10000,,10050,13050
 *
 * An empty reception field marks a lost copy.  Timestamps are integer
 * microseconds from the trial epoch, newlines are '\n', and formatting is
 * locale-independent, so write -> read -> write reproduces the file byte for
 * byte.  Metadata lines are '# key=value'; unknown keys are ignored with a
 * warning, and missing ones fall back to documented defaults (also with a
 * warning): period_us to the median channel A transmit spacing, skew_bound_us
 * to the largest observed skew (at least 90), trial_end_us to the last
 * transmission plus 5 s.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "redlink/independence.hpp"
#include "redlink/metrics.hpp"
#include "redlink/trace.hpp"

namespace redlink {

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedTrial {
    Trial trial;
    std::optional<std::uint64_t> seed; // carried through from metadata
    std::vector<std::string> warnings;
};

void write_trial(const Trial& trial, std::ostream& out,
                 std::optional<std::uint64_t> seed = std::nullopt);
void write_trial_file(const Trial& trial, const std::string& path,
                      std::optional<std::uint64_t> seed = std::nullopt);

/// Throws TraceFormatError (with a line reference) on malformed input and
/// std::invalid_argument on semantic violations (skew bound, period grid).
LoadedTrial read_trial(std::istream& in);
LoadedTrial read_trial_file(const std::string& path);

/// Writes the step function as plot-ready "h_ms value" rows: an anchor at
/// h=0, two rows per jump point (value before and after the jump), and a
/// trailing zero-level anchor past the last breakpoint.
void export_ccdf(const ECcdf& f, std::ostream& out);
void export_ccdf_file(const ECcdf& f, const std::string& path);

/// Scalar metrics as 'key=value' lines (latency keys omitted when nothing
/// was received; lag data is exported separately).
std::string metrics_kv_block(const MetricsReport& rep);

/// Single-line, space-separated report rows in the comparison table column
/// order.  Cells that do not apply print "--".
std::string table_header(std::span<const Microseconds> deadlines);
std::string table_row(std::string_view label, const MetricsReport& rep,
                      const IndependenceReport* indep = nullptr);

/// Three-row (A, B, AB) aligned table; the AB row carries the independence
/// estimates when provided.
std::string format_table(const MetricsReport& a, const MetricsReport& b, const MetricsReport& ab,
                         const IndependenceReport* indep, std::span<const Microseconds> deadlines);

/// Burst census table: counts per burst length (lengths 5 and above pooled)
/// and the longest burst, one row per link.
std::string format_burst_table(const MetricsReport& a, const MetricsReport& b,
                               const MetricsReport& ab);

/// Lag data for all three links: k, then R(k) and pi(k) per link.  Undefined
/// pi (lossless link) prints "nan".
std::string format_autocorr(const Autocorrelation& a, const Autocorrelation& b,
                            const Autocorrelation& ab);

/// Shortest round-trip decimal representation.
std::string fmt_double(double v);
/// Fixed significant digits (printf %g style).
std::string fmt_sig(double v, int digits);
/// Microseconds as milliseconds with exactly three decimals.
std::string fmt_ms(Microseconds us);

} // namespace redlink
