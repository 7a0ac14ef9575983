#include "redlink/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace redlink {

namespace {

constexpr std::string_view kHeader = "seq,tT_A_us,tR_A_us,tT_B_us,tR_B_us";

[[noreturn]] void fail(int line, const std::string& msg) {
    throw TraceFormatError("trace line " + std::to_string(line) + ": " + msg);
}

std::int64_t parse_i64(std::string_view s, int line, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail(line, std::string("bad ") + what + " value '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s, int line, const char* what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail(line, std::string("bad ") + what + " value '" + std::string(s) + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceFormatError("cannot open for writing: " + path);
    return out;
}

} // namespace

std::string fmt_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string fmt_sig(double v, int digits) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, p);
}

std::string fmt_ms(Microseconds us) {
    const bool neg = us < 0;
    const std::int64_t a = neg ? -us : us;
    std::string s = neg ? "-" : "";
    s += std::to_string(a / 1000);
    s += '.';
    const std::string frac = std::to_string(a % 1000);
    s.append(3 - frac.size(), '0');
    s += frac;
    return s;
}

void write_trial(const Trial& trial, std::ostream& out, std::optional<std::uint64_t> seed) {
    validate(trial);
    out << "# period_us=" << trial.period_us << '\n';
    out << "# skew_bound_us=" << trial.skew_bound_us << '\n';
    out << "# trial_end_us=" << std::max(trial.trace_a.trial_end, trial.trace_b.trial_end) << '\n';
    if (seed) out << "# seed=" << *seed << '\n';
    out << kHeader << '\n';
    for (std::size_t i = 0; i < trial.trace_a.records.size(); ++i) {
        const PacketRecord& a = trial.trace_a.records[i];
        const PacketRecord& b = trial.trace_b.records[i];
        out << a.seq << ',' << a.t_tx << ',';
        if (a.t_rx) out << *a.t_rx;
        out << ',' << b.t_tx << ',';
        if (b.t_rx) out << *b.t_rx;
        out << '\n';
    }
}

void write_trial_file(const Trial& trial, const std::string& path,
                      std::optional<std::uint64_t> seed) {
    auto out = open_out(path);
    write_trial(trial, out, seed);
}

LoadedTrial read_trial(std::istream& in) {
    LoadedTrial loaded;
    Trial& trial = loaded.trial;
    trial.trace_a.channel = ChannelId::A;
    trial.trace_b.channel = ChannelId::B;

    std::optional<Microseconds> meta_period, meta_skew_bound, meta_trial_end;

    std::string raw;
    int line_no = 0;
    bool header_seen = false;
    std::int64_t prev_seq = 0;
    bool have_prev = false;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (line.front() == '#') {
            line.remove_prefix(1);
            while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) continue; // free-form comment
            const std::string_view key = line.substr(0, eq);
            const std::string_view val = line.substr(eq + 1);
            if (key == "period_us")
                meta_period = parse_i64(val, line_no, "period_us");
            else if (key == "skew_bound_us")
                meta_skew_bound = parse_i64(val, line_no, "skew_bound_us");
            else if (key == "trial_end_us")
                meta_trial_end = parse_i64(val, line_no, "trial_end_us");
            else if (key == "seed")
                loaded.seed = parse_u64(val, line_no, "seed");
            else
                loaded.warnings.push_back("line " + std::to_string(line_no) +
                                          ": ignoring unknown metadata key '" + std::string(key) +
                                          "'");
            continue;
        }

        if (!header_seen) {
            if (line != kHeader)
                fail(line_no, "expected header '" + std::string(kHeader) + "'");
            header_seen = true;
            continue;
        }

        std::string_view fields[5];
        std::size_t start = 0;
        int nf = 0;
        for (std::size_t j = 0; j <= line.size(); ++j) {
            if (j == line.size() || line[j] == ',') {
                if (nf == 5) fail(line_no, "too many fields");
                fields[nf++] = line.substr(start, j - start);
                start = j + 1;
            }
        }
        if (nf != 5) fail(line_no, "expected 5 comma-separated fields");

        PacketRecord a, b;
        a.seq = b.seq = parse_i64(fields[0], line_no, "seq");
        a.t_tx = parse_i64(fields[1], line_no, "tT_A_us");
        if (!fields[2].empty()) a.t_rx = parse_i64(fields[2], line_no, "tR_A_us");
        b.t_tx = parse_i64(fields[3], line_no, "tT_B_us");
        if (!fields[4].empty()) b.t_rx = parse_i64(fields[4], line_no, "tR_B_us");

        if (have_prev && a.seq <= prev_seq) fail(line_no, "seq not strictly increasing");
        prev_seq = a.seq;
        have_prev = true;
        if (a.t_rx && *a.t_rx < a.t_tx) fail(line_no, "tR_A_us precedes tT_A_us");
        if (b.t_rx && *b.t_rx < b.t_tx) fail(line_no, "tR_B_us precedes tT_B_us");

        trial.trace_a.records.push_back(a);
        trial.trace_b.records.push_back(b);
    }
    if (!header_seen) throw TraceFormatError("trace: missing header row");

    const auto& ra = trial.trace_a.records;
    if (meta_period) {
        trial.period_us = *meta_period;
    } else {
        Microseconds period = 100'000;
        if (ra.size() >= 2) {
            std::vector<Microseconds> gaps;
            gaps.reserve(ra.size() - 1);
            for (std::size_t i = 1; i < ra.size(); ++i) gaps.push_back(ra[i].t_tx - ra[i - 1].t_tx);
            std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
            period = gaps[gaps.size() / 2];
        }
        trial.period_us = period;
        loaded.warnings.push_back("metadata period_us missing; using " + std::to_string(period));
    }

    if (meta_skew_bound) {
        trial.skew_bound_us = *meta_skew_bound;
    } else {
        Microseconds bound = 90;
        for (std::size_t i = 0; i < ra.size(); ++i)
            bound = std::max(bound, std::abs(ra[i].t_tx - trial.trace_b.records[i].t_tx));
        trial.skew_bound_us = bound;
        loaded.warnings.push_back("metadata skew_bound_us missing; using " + std::to_string(bound));
    }

    Microseconds trial_end = 0;
    if (meta_trial_end) {
        trial_end = *meta_trial_end;
    } else {
        for (std::size_t i = 0; i < ra.size(); ++i)
            trial_end = std::max({trial_end, ra[i].t_tx, trial.trace_b.records[i].t_tx});
        trial_end += 5'000'000;
        loaded.warnings.push_back("metadata trial_end_us missing; using " +
                                  std::to_string(trial_end));
    }
    trial.trace_a.trial_end = trial_end;
    trial.trace_b.trial_end = trial_end;

    validate(trial);
    return loaded;
}

LoadedTrial read_trial_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceFormatError("cannot open trace file: " + path);
    try {
        return read_trial(in);
    } catch (const TraceFormatError& e) {
        throw TraceFormatError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void export_ccdf(const ECcdf& f, std::ostream& out) {
    out << "# h_ms ccdf\n";
    const auto& h = f.breakpoints();
    const auto& v = f.values();
    if (h.empty()) return;
    if (h.front() > 0) out << fmt_ms(0) << " 1\n";
    for (std::size_t j = 0; j < h.size(); ++j) {
        out << fmt_ms(h[j]) << ' ' << fmt_double(j == 0 ? 1.0 : v[j - 1]) << '\n';
        out << fmt_ms(h[j]) << ' ' << fmt_double(v[j]) << '\n';
    }
    const Microseconds extent = h.back() + std::max<Microseconds>(1000, h.back() / 10);
    out << fmt_ms(extent) << ' ' << fmt_double(v.back()) << '\n';
}

void export_ccdf_file(const ECcdf& f, const std::string& path) {
    auto out = open_out(path);
    export_ccdf(f, out);
}

std::string metrics_kv_block(const MetricsReport& rep) {
    std::ostringstream s;
    s << "n=" << rep.n << '\n';
    s << "n_rx=" << rep.n_rx << '\n';
    s << "n_lost=" << rep.n_lost << '\n';
    s << "loss=" << fmt_double(rep.loss) << '\n';
    if (rep.latency) {
        s << "mean_us=" << fmt_double(rep.latency->mean_us) << '\n';
        s << "std_us=" << fmt_double(rep.latency->std_us) << '\n';
        s << "p9999_us=" << rep.latency->p9999_us << '\n';
        s << "max_us=" << rep.latency->max_us << '\n';
    }
    for (const auto& [h, v] : rep.dmr) s << "dmr_us_" << h << '=' << fmt_double(v) << '\n';
    s << "autocorr_max_lag=" << (static_cast<std::int64_t>(rep.autocorr.r.size()) - 1) << '\n';
    s << "burst_max=" << rep.bursts.b_max << '\n';
    for (const auto& [len, cnt] : rep.bursts.count_by_length)
        s << "burst_len_" << len << '=' << cnt << '\n';
    return s.str();
}

namespace {

std::string deadline_ms_label(Microseconds h) { return fmt_sig(static_cast<double>(h) / 1000.0, 6); }

std::vector<std::string> header_cells(std::span<const Microseconds> deadlines) {
    std::vector<std::string> c = {"link", "mean_ms", "std_ms", "p9999_ms", "max_ms"};
    for (Microseconds h : deadlines) {
        c.push_back("miss>" + deadline_ms_label(h) + "ms");
        c.push_back("pred>" + deadline_ms_label(h) + "ms");
    }
    c.push_back("Dks");
    c.push_back("loss_pm");
    c.push_back("pred_pm");
    return c;
}

std::vector<std::string> row_cells(std::string_view label, const MetricsReport& rep,
                                   const IndependenceReport* indep) {
    std::vector<std::string> c;
    c.emplace_back(label);
    if (rep.latency) {
        c.push_back(fmt_sig(rep.latency->mean_us / 1000.0, 4));
        c.push_back(fmt_sig(rep.latency->std_us / 1000.0, 4));
        c.push_back(fmt_sig(static_cast<double>(rep.latency->p9999_us) / 1000.0, 4));
        c.push_back(fmt_sig(static_cast<double>(rep.latency->max_us) / 1000.0, 4));
    } else {
        c.insert(c.end(), 4, "--");
    }
    for (const auto& [h, v] : rep.dmr) {
        c.push_back(fmt_sig(v * 1000.0, 4));
        if (indep && indep->est_dmr.count(h))
            c.push_back(fmt_sig(indep->est_dmr.at(h) * 1000.0, 4));
        else
            c.push_back("--");
    }
    c.push_back(indep ? fmt_sig(indep->d_ks, 3) : "--");
    c.push_back(fmt_sig(rep.loss * 1000.0, 4));
    c.push_back(indep ? fmt_sig(indep->est_loss * 1000.0, 4) : "--");
    return c;
}

std::string join_cells(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ' ';
        s += cells[i];
    }
    return s;
}

} // namespace

std::string table_header(std::span<const Microseconds> deadlines) {
    return join_cells(header_cells(deadlines));
}

std::string table_row(std::string_view label, const MetricsReport& rep,
                      const IndependenceReport* indep) {
    return join_cells(row_cells(label, rep, indep));
}

std::string format_table(const MetricsReport& a, const MetricsReport& b, const MetricsReport& ab,
                         const IndependenceReport* indep, std::span<const Microseconds> deadlines) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back(header_cells(deadlines));
    rows.push_back(row_cells("A", a, nullptr));
    rows.push_back(row_cells("B", b, nullptr));
    rows.push_back(row_cells("AB", ab, indep));

    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

    std::string out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += "  ";
            if (i == 0) { // link label, left-aligned
                out += r[i];
                out.append(width[i] - r[i].size(), ' ');
            } else {
                out.append(width[i] - r[i].size(), ' ');
                out += r[i];
            }
        }
        out += '\n';
    }
    return out;
}

std::string format_burst_table(const MetricsReport& a, const MetricsReport& b,
                               const MetricsReport& ab) {
    std::string out = "link  B=1  B=2  B=3  B=4  B>=5  Bmax\n";
    const MetricsReport* reps[] = {&a, &b, &ab};
    const char* labels[] = {"A", "B", "AB"};
    for (int i = 0; i < 3; ++i) {
        std::int64_t c[5] = {0, 0, 0, 0, 0};
        for (const auto& [len, cnt] : reps[i]->bursts.count_by_length)
            c[std::min<std::int64_t>(len, 5) - 1] += cnt;
        out += labels[i];
        for (std::int64_t x : c) out += "  " + std::to_string(x);
        out += "  " + std::to_string(reps[i]->bursts.b_max);
        out += '\n';
    }
    return out;
}

std::string format_autocorr(const Autocorrelation& a, const Autocorrelation& b,
                            const Autocorrelation& ab) {
    const std::size_t lags = std::min({a.r.size(), b.r.size(), ab.r.size()});
    std::string out = "# k r_A pi_A r_B pi_B r_AB pi_AB\n";
    auto pi_str = [](const Autocorrelation& ac, std::size_t k) {
        return ac.pi ? fmt_double((*ac.pi)[k]) : std::string("nan");
    };
    for (std::size_t k = 0; k < lags; ++k) {
        out += std::to_string(k);
        out += ' ' + fmt_double(a.r[k]) + ' ' + pi_str(a, k);
        out += ' ' + fmt_double(b.r[k]) + ' ' + pi_str(b, k);
        out += ' ' + fmt_double(ab.r[k]) + ' ' + pi_str(ab, k);
        out += '\n';
    }
    return out;
}

} // namespace redlink
