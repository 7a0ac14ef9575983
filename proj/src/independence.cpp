#include "redlink/independence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redlink {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error(std::string(what) + " outside [0, 1]");
}

std::vector<Microseconds> merged_breakpoints(const ECcdf& f1, const ECcdf& f2) {
    std::vector<Microseconds> h;
    h.reserve(f1.breakpoints().size() + f2.breakpoints().size());
    std::merge(f1.breakpoints().begin(), f1.breakpoints().end(), f2.breakpoints().begin(),
               f2.breakpoints().end(), std::back_inserter(h));
    h.erase(std::unique(h.begin(), h.end()), h.end());
    return h;
}

std::optional<double> relative_error(double meas, double est) {
    if (est == 0.0) return std::nullopt;
    return (meas - est) / est;
}

} // namespace

double product_loss_estimate(double loss_a, double loss_b) {
    check_probability(loss_a, "loss_a");
    check_probability(loss_b, "loss_b");
    return loss_a * loss_b;
}

double product_dmr_estimate(double dmr_a, double dmr_b) {
    check_probability(dmr_a, "dmr_a");
    check_probability(dmr_b, "dmr_b");
    return dmr_a * dmr_b;
}

ECcdf combined_ccdf(const ECcdf& f_a, const ECcdf& f_b, double loss_a, double loss_b) {
    check_probability(loss_a, "loss_a");
    check_probability(loss_b, "loss_b");
    const double delivered = 1.0 - loss_a * loss_b;
    if (delivered <= 0.0)
        throw std::domain_error("combined_ccdf: both channels always lose, nothing delivered");
    const double ra = 1.0 - loss_a;
    const double rb = 1.0 - loss_b;

    std::vector<Microseconds> h = merged_breakpoints(f_a, f_b);
    std::vector<double> v;
    v.reserve(h.size());
    for (Microseconds x : h) {
        const double fa = f_a.value_at(x);
        const double fb = f_b.value_at(x);
        v.push_back((loss_a * rb * fb + loss_b * ra * fa + ra * rb * fa * fb) / delivered);
    }
    return ECcdf::from_breakpoints(std::move(h), std::move(v));
}

double ks_distance(const ECcdf& f1, const ECcdf& f2) {
    double sup = 0.0;
    for (Microseconds h : merged_breakpoints(f1, f2)) {
        sup = std::max(sup, std::abs(f1.value_at(h) - f2.value_at(h)));
        sup = std::max(sup, std::abs(f1.value_before(h) - f2.value_before(h)));
    }
    return sup;
}

IndependenceReport independence_report(const Trial& trial,
                                       std::span<const Microseconds> deadlines) {
    if (deadlines.empty()) deadlines = default_deadlines();
    const ChannelTrace merged = merge_redundant(trial);

    const double loss_a = loss_ratio(trial.trace_a);
    const double loss_b = loss_ratio(trial.trace_b);

    IndependenceReport rep;
    rep.meas_loss = loss_ratio(merged);
    rep.est_loss = product_loss_estimate(loss_a, loss_b);
    rep.loss_rel_err = relative_error(rep.meas_loss, rep.est_loss);

    for (Microseconds h : deadlines) {
        const double meas = deadline_miss_ratio(merged, h);
        const double est = product_dmr_estimate(deadline_miss_ratio(trial.trace_a, h),
                                                deadline_miss_ratio(trial.trace_b, h));
        rep.meas_dmr[h] = meas;
        rep.est_dmr[h] = est;
        rep.dmr_rel_err[h] = relative_error(meas, est);
    }

    rep.meas_ccdf = eccdf(merged);
    rep.est_ccdf = combined_ccdf(eccdf(trial.trace_a), eccdf(trial.trace_b), loss_a, loss_b);
    rep.d_ks = ks_distance(rep.meas_ccdf, rep.est_ccdf);
    return rep;
}

} // namespace redlink
