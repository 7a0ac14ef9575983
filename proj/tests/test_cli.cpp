#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "redlink/trace_io.hpp"

using namespace redlink;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Runs the installed binary with the given arguments, capturing the streams.
RunResult run_cli(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    const std::string cmd =
        std::string("\"") + REDLINK_CLI_PATH + "\" " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = status < 0 ? status : (status >> 8) & 0xff;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

const char* kConfig =
    "[trial]\n"
    "n_packets = 50000\n"
    "period_us = 1000\n"
    "grace_us = 100000\n"
    "seed = 5\n"
    "[channel.a]\n"
    "error_prob = 0.05\n"
    "[channel.b]\n"
    "error_prob = 0.1\n";

} // namespace

TEST_CASE("cli simulate/analyze/compare workflow") {
    spit("cli_test.conf", kConfig);

    SUBCASE("simulate writes the trace and a summary line") {
        const RunResult r = run_cli("simulate cli_test.conf --out cli_t1.csv");
        CHECK(r.exit_code == 0);
        CHECK(r.err.empty());
        CHECK(r.out.rfind("n=50000 seed=5 loss_A_pm=", 0) == 0);
        CHECK(r.out.find("out=cli_t1.csv") != std::string::npos);

        const LoadedTrial loaded = read_trial_file("cli_t1.csv");
        CHECK(loaded.trial.n_packets() == 50000);
        CHECK(loaded.seed == 5);

        // Same seed, byte-identical trace; different seed, different trace.
        const RunResult again = run_cli("simulate cli_test.conf --out cli_t2.csv");
        CHECK(again.exit_code == 0);
        CHECK(slurp("cli_t2.csv") == slurp("cli_t1.csv"));
        const RunResult other = run_cli("simulate cli_test.conf --seed 9 --out cli_t3.csv");
        CHECK(other.exit_code == 0);
        CHECK(other.out.find("seed=9") != std::string::npos);
        CHECK(slurp("cli_t3.csv") != slurp("cli_t1.csv"));
        std::remove("cli_t2.csv");
        std::remove("cli_t3.csv");
    }

    SUBCASE("analyze prints tables and writes lag data") {
        REQUIRE(run_cli("simulate cli_test.conf --out cli_t1.csv").exit_code == 0);
        const RunResult r = run_cli("analyze cli_t1.csv --kv-out cli_kv.txt");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("link") != std::string::npos);
        CHECK(r.out.find("miss>1ms") != std::string::npos);
        CHECK(r.out.find("Bmax") != std::string::npos);
        CHECK(r.out.find("autocorrelation data written to cli_t1.csv.acf") != std::string::npos);

        const std::string acf = slurp("cli_t1.csv.acf");
        CHECK(acf.rfind("# k r_A pi_A r_B pi_B r_AB pi_AB", 0) == 0);

        const std::string kv = slurp("cli_kv.txt");
        CHECK(kv.find("[A]\n") != std::string::npos);
        CHECK(kv.find("[AB]\n") != std::string::npos);
        CHECK(kv.find("loss=") != std::string::npos);
        std::remove("cli_t1.csv.acf");
        std::remove("cli_kv.txt");
    }

    SUBCASE("analyze honours a custom deadline set") {
        REQUIRE(run_cli("simulate cli_test.conf --out cli_t1.csv").exit_code == 0);
        const RunResult r = run_cli("analyze cli_t1.csv --deadlines-ms 2,5 --max-lag 10");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("miss>2ms") != std::string::npos);
        CHECK(r.out.find("miss>5ms") != std::string::npos);
        CHECK(r.out.find("miss>1ms") == std::string::npos);
        std::remove("cli_t1.csv.acf");
    }

    SUBCASE("compare on independent channels passes") {
        REQUIRE(run_cli("simulate cli_test.conf --out cli_t1.csv").exit_code == 0);
        // Tolerance sized for the event counts a 50k-packet trial gives the
        // rarest compared figure (the joint loss, around 250 events).
        const RunResult r = run_cli("compare cli_t1.csv --rel-tol 0.5 --ccdf-prefix cli_ccdf");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("rel_err loss: ") != std::string::npos);
        CHECK(r.out.find("Dks: ") != std::string::npos);
        CHECK(r.out.find("independence: PASS (rel_tol 0.5)") != std::string::npos);
        CHECK(slurp("cli_ccdf_a.dat").rfind("# h_ms ccdf", 0) == 0);
        CHECK(slurp("cli_ccdf_ab_est.dat").rfind("# h_ms ccdf", 0) == 0);
        std::remove("cli_ccdf_a.dat");
        std::remove("cli_ccdf_b.dat");
        std::remove("cli_ccdf_ab_meas.dat");
        std::remove("cli_ccdf_ab_est.dat");
    }

    SUBCASE("compare reports undefined errors on a lossless trace") {
        const Trial t = testutil::make_trial(
            testutil::Latencies(100, std::optional<Microseconds>(900)),
            testutil::Latencies(100, std::optional<Microseconds>(900)));
        write_trial_file(t, "cli_clean.csv");
        const RunResult r = run_cli("compare cli_clean.csv");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("rel_err loss: undef") != std::string::npos);
        CHECK(r.out.find("Dks: 0") != std::string::npos);
        CHECK(r.out.find("independence: PASS") != std::string::npos);
        std::remove("cli_clean.csv");
    }

    SUBCASE("errors exit nonzero with a message") {
        const RunResult missing = run_cli("analyze cli_does_not_exist.csv");
        CHECK(missing.exit_code == 1);
        CHECK(missing.err.find("error: ") != std::string::npos);
        CHECK(missing.err.find("cannot open trace file") != std::string::npos);

        spit("cli_bad.conf", "[trial]\nn_packets = ten\n");
        const RunResult bad = run_cli("simulate cli_bad.conf --out cli_t9.csv");
        CHECK(bad.exit_code == 1);
        CHECK(bad.err.find("line 2") != std::string::npos);
        std::remove("cli_bad.conf");

        const RunResult usage = run_cli("frobnicate");
        CHECK(usage.exit_code != 0);
    }

    std::remove("cli_test.conf");
    std::remove("cli_t1.csv");
}
