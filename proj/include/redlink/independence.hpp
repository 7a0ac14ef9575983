#pragma once
/*
 * Channel-independence analysis.
 *
 * Under the hypothesis that the two channels fail independently, redundant
 * link figures follow from per-channel ones: loss and deadline-miss ratios
 * multiply, and the latency CCDF of the merged link combines the per-channel
 * CCDFs weighted by each channel's loss probability.  Comparing predicted
 * against measured figures quantifies the coupling between the channels; the
 * CCDF discrepancy is summarised by the Kolmogorov-Smirnov distance.
 */

#include <map>
#include <optional>
#include <span>

#include "redlink/metrics.hpp"
#include "redlink/trace.hpp"

namespace redlink {

/// Product estimate of the redundant-link loss ratio.  Arguments must lie in
/// [0, 1] (throws std::domain_error otherwise).
double product_loss_estimate(double loss_a, double loss_b);

/// Product estimate of the redundant-link deadline miss ratio.
double product_dmr_estimate(double dmr_a, double dmr_b);

/// Predicted latency CCDF of the merged link given per-channel CCDFs and
/// loss probabilities, conditioned on the merged packet being delivered:
///
///   (1 - pA pB) F(h) = pA (1-pB) FB(h) + pB (1-pA) FA(h)
///                    + (1-pA)(1-pB) FA(h) FB(h)
///
/// with pX the channel loss probabilities.  Throws std::domain_error when
/// pA * pB == 1 (no delivery to condition on) or probabilities are outside
/// [0, 1].
ECcdf combined_ccdf(const ECcdf& f_a, const ECcdf& f_b, double loss_a, double loss_b);

/// Kolmogorov-Smirnov distance: the largest absolute gap between the two
/// step functions, checked on both sides of every jump.
double ks_distance(const ECcdf& f1, const ECcdf& f2);

struct IndependenceReport {
    double meas_loss = 0.0;
    double est_loss = 0.0;
    std::map<Microseconds, double> meas_dmr;
    std::map<Microseconds, double> est_dmr;
    ECcdf meas_ccdf;
    ECcdf est_ccdf;
    double d_ks = 0.0;
    // (measured - estimated) / estimated; absent where the estimate is zero.
    std::optional<double> loss_rel_err;
    std::map<Microseconds, std::optional<double>> dmr_rel_err;
};

/// Measured-versus-estimated comparison for one trial.  Empty deadline span
/// selects the default set.
IndependenceReport independence_report(const Trial& trial,
                                       std::span<const Microseconds> deadlines = {});

} // namespace redlink
