/*
 * redlink: simulate and analyse duplicated-link packet trials.
 *
 *   redlink simulate <config> [--seed N] [--out trace.csv]
 *   redlink analyze  <trace>  [--deadlines-ms ...] [--max-lag K] [--acf-out F] [--kv-out F]
 *   redlink compare  <trace>  [--deadlines-ms ...] [--rel-tol X] [--ccdf-prefix P]
 *
 * simulate writes a trace file and prints a one-line summary.  analyze prints
 * the per-link metric table plus the burst census and writes the loss
 * autocorrelation lag data.  compare checks the measured redundant link
 * against the channel-independence prediction and flags PASS/FAIL on the
 * relative-error tolerance.  Identical inputs produce byte-identical outputs.
 */

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redlink/config.hpp"
#include "redlink/independence.hpp"
#include "redlink/metrics.hpp"
#include "redlink/sim.hpp"
#include "redlink/trace_io.hpp"

namespace {

std::vector<redlink::Microseconds> to_deadlines(const std::vector<double>& ms) {
    std::vector<redlink::Microseconds> us;
    for (double v : ms) {
        if (!(v > 0.0)) throw CLI::ValidationError("--deadlines-ms", "deadlines must be positive");
        us.push_back(static_cast<redlink::Microseconds>(std::llround(v * 1000.0)));
    }
    return us;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_path) {
    redlink::SimConfig cfg = redlink::load_sim_config(config_path);
    if (seed) cfg.seed = *seed;
    print_warnings(redlink::config_warnings(cfg));
    const redlink::Trial trial = redlink::simulate_trial(cfg);
    redlink::write_trial_file(trial, out_path, cfg.seed);
    std::cout << "n=" << trial.n_packets() << " seed=" << cfg.seed << " loss_A_pm="
              << redlink::fmt_sig(redlink::loss_ratio(trial.trace_a) * 1000.0, 4) << " loss_B_pm="
              << redlink::fmt_sig(redlink::loss_ratio(trial.trace_b) * 1000.0, 4) << " out="
              << out_path << '\n';
    return 0;
}

int run_analyze(const std::string& trace_path, const std::vector<double>& deadlines_ms,
                std::optional<std::int64_t> max_lag, std::string acf_path,
                const std::string& kv_path) {
    const redlink::LoadedTrial loaded = redlink::read_trial_file(trace_path);
    print_warnings(loaded.warnings);
    const auto deadlines = to_deadlines(deadlines_ms);
    const redlink::ChannelTrace merged = redlink::merge_redundant(loaded.trial);

    const auto rep_a = redlink::metrics_report(loaded.trial.trace_a, deadlines, max_lag);
    const auto rep_b = redlink::metrics_report(loaded.trial.trace_b, deadlines, max_lag);
    const auto rep_ab = redlink::metrics_report(merged, deadlines, max_lag);

    std::cout << redlink::format_table(rep_a, rep_b, rep_ab, nullptr, deadlines) << '\n'
              << redlink::format_burst_table(rep_a, rep_b, rep_ab);

    if (acf_path.empty()) acf_path = trace_path + ".acf";
    std::ofstream acf(acf_path, std::ios::binary);
    if (!acf) throw std::runtime_error("cannot open for writing: " + acf_path);
    acf << redlink::format_autocorr(rep_a.autocorr, rep_b.autocorr, rep_ab.autocorr);
    std::cout << "autocorrelation data written to " << acf_path << '\n';

    if (!kv_path.empty()) {
        std::ofstream kv(kv_path, std::ios::binary);
        if (!kv) throw std::runtime_error("cannot open for writing: " + kv_path);
        kv << "[A]\n" << redlink::metrics_kv_block(rep_a);
        kv << "[B]\n" << redlink::metrics_kv_block(rep_b);
        kv << "[AB]\n" << redlink::metrics_kv_block(rep_ab);
    }
    return 0;
}

int run_compare(const std::string& trace_path, const std::vector<double>& deadlines_ms,
                double rel_tol, const std::string& ccdf_prefix) {
    const redlink::LoadedTrial loaded = redlink::read_trial_file(trace_path);
    print_warnings(loaded.warnings);
    const auto deadlines = to_deadlines(deadlines_ms);
    const redlink::ChannelTrace merged = redlink::merge_redundant(loaded.trial);

    const auto rep_a = redlink::metrics_report(loaded.trial.trace_a, deadlines);
    const auto rep_b = redlink::metrics_report(loaded.trial.trace_b, deadlines);
    const auto rep_ab = redlink::metrics_report(merged, deadlines);
    const auto indep = redlink::independence_report(loaded.trial, deadlines);

    std::cout << redlink::format_table(rep_a, rep_b, rep_ab, &indep, deadlines) << '\n';

    auto err_str = [](const std::optional<double>& e) {
        return e ? redlink::fmt_sig(*e, 4) : std::string("undef");
    };
    bool all_within = !indep.loss_rel_err || std::abs(*indep.loss_rel_err) <= rel_tol;
    std::cout << "rel_err loss: " << err_str(indep.loss_rel_err) << '\n';
    for (const auto& [h, e] : indep.dmr_rel_err) {
        if (e && std::abs(*e) > rel_tol) all_within = false;
        std::cout << "rel_err miss>" << redlink::fmt_sig(static_cast<double>(h) / 1000.0, 6)
                  << "ms: " << err_str(e) << '\n';
    }
    std::cout << "Dks: " << redlink::fmt_sig(indep.d_ks, 3) << '\n';
    std::cout << "independence: " << (all_within ? "PASS" : "FAIL") << " (rel_tol "
              << redlink::fmt_sig(rel_tol, 4) << ")\n";

    if (!ccdf_prefix.empty()) {
        redlink::export_ccdf_file(*rep_a.ccdf, ccdf_prefix + "_a.dat");
        redlink::export_ccdf_file(*rep_b.ccdf, ccdf_prefix + "_b.dat");
        redlink::export_ccdf_file(indep.meas_ccdf, ccdf_prefix + "_ab_meas.dat");
        redlink::export_ccdf_file(indep.est_ccdf, ccdf_prefix + "_ab_est.dat");
        std::cout << "ccdf data written to " << ccdf_prefix << "_{a,b,ab_meas,ab_est}.dat\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"duplicated-link trial simulator and analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path, trace_path, out_path = "trace.csv";
    std::string acf_path, kv_path, ccdf_prefix;
    std::vector<double> deadlines_ms = {1.0, 3.0, 10.0, 30.0};
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> max_lag;
    double rel_tol = 0.10;

    CLI::App* sim = app.add_subcommand("simulate", "run one trial and write its trace");
    sim->add_option("config", config_path, "simulation config file")->required();
    sim->add_option("--seed", seed, "override the config seed");
    sim->add_option("--out", out_path, "output trace path (default trace.csv)");

    CLI::App* ana = app.add_subcommand("analyze", "per-link metrics of a trace");
    ana->add_option("trace", trace_path, "trace file")->required();
    ana->add_option("--deadlines-ms", deadlines_ms, "deadline set, ms")->delimiter(',');
    ana->add_option("--max-lag", max_lag, "largest autocorrelation lag");
    ana->add_option("--acf-out", acf_path, "autocorrelation output path (default <trace>.acf)");
    ana->add_option("--kv-out", kv_path, "also write key=value metric blocks");

    CLI::App* cmp = app.add_subcommand("compare", "measured vs independence-predicted figures");
    cmp->add_option("trace", trace_path, "trace file")->required();
    cmp->add_option("--deadlines-ms", deadlines_ms, "deadline set, ms")->delimiter(',');
    cmp->add_option("--rel-tol", rel_tol, "relative error tolerance for PASS (default 0.10)");
    cmp->add_option("--ccdf-prefix", ccdf_prefix, "write CCDF data files with this prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(config_path, seed, out_path);
        if (ana->parsed()) return run_analyze(trace_path, deadlines_ms, max_lag, acf_path, kv_path);
        return run_compare(trace_path, deadlines_ms, rel_tol, ccdf_prefix);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
