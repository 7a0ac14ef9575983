#include "redlink/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace redlink {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Typed view over one section's entries; tracks which keys were consumed.
class Fields {
public:
    Fields(Section& section, std::string name) : section_(section), name_(std::move(name)) {}

    bool has(const std::string& key) const { return section_.count(key) > 0; }

    template <typename T, typename Parse>
    bool get(const std::string& key, T& out, Parse parse) {
        auto it = section_.find(key);
        if (it == section_.end()) return false;
        it->second.used = true;
        parse(it->second.value, it->second.line, out);
        return true;
    }

    bool get_i64(const std::string& key, std::int64_t& out) {
        return get(key, out, [&](const std::string& v, int line, std::int64_t& x) {
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
                fail(line, "expected integer for '" + key + "', got '" + v + "'");
        });
    }

    bool get_u64(const std::string& key, std::uint64_t& out) {
        return get(key, out, [&](const std::string& v, int line, std::uint64_t& x) {
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
                fail(line, "expected unsigned integer for '" + key + "', got '" + v + "'");
        });
    }

    bool get_int(const std::string& key, int& out) {
        std::int64_t x;
        if (!get_i64(key, x)) return false;
        out = static_cast<int>(x);
        return true;
    }

    bool get_double(const std::string& key, double& out) {
        return get(key, out, [&](const std::string& v, int line, double& x) {
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
                fail(line, "expected number for '" + key + "', got '" + v + "'");
        });
    }

    bool get_word(const std::string& key, std::string& out) {
        return get(key, out,
                   [](const std::string& v, int, std::string& x) { x = v; });
    }

    void reject_unused() const {
        for (const auto& [key, entry] : section_) {
            if (!entry.used)
                fail(entry.line, "unknown key '" + key + "' in section [" + name_ + "]" +
                                     (hint_.empty() ? "" : " (" + hint_ + ")"));
        }
    }

    void set_hint(std::string hint) { hint_ = std::move(hint); }

    int line_of(const std::string& key) const {
        auto it = section_.find(key);
        return it == section_.end() ? 0 : it->second.line;
    }

private:
    Section& section_;
    std::string name_;
    std::string hint_;
};

TailLaw parse_tail(Fields& f) {
    std::string kind = "exponential";
    f.get_word("tail", kind);
    if (kind == "exponential") {
        ExponentialTail t;
        f.get_double("tail_mean_us", t.mean_us);
        return t;
    }
    if (kind == "lognormal") {
        LogNormalTail t;
        f.get_double("tail_mu", t.mu);
        f.get_double("tail_sigma", t.sigma);
        return t;
    }
    if (kind == "constant") {
        ConstantTail t;
        f.get_double("tail_value_us", t.value_us);
        return t;
    }
    fail(f.line_of("tail"), "unknown tail law '" + kind + "' (exponential, lognormal, constant)");
}

ChannelModel parse_channel(Fields& f) {
    ChannelModel ch;
    std::string service = "multicast";
    f.get_word("service", service);
    if (service == "multicast") {
        MulticastService m;
        f.get_double("error_prob", m.error_prob);
        f.get_i64("base_latency_us", m.base_latency_us);
        m.tail = parse_tail(f);
        ch.service = m;
        f.set_hint("multicast service");
    } else if (service == "unicast") {
        UnicastService u;
        f.get_double("per_attempt_error_prob", u.per_attempt_error_prob);
        f.get_int("max_retries", u.max_retries);
        f.get_i64("base_latency_us", u.base_latency_us);
        f.get_i64("retry_latency_us", u.retry_latency_us);
        u.tail = parse_tail(f);
        ch.service = u;
        f.set_hint("unicast service");
    } else {
        fail(f.line_of("service"), "unknown service '" + service + "' (multicast, unicast)");
    }
    return ch;
}

GilbertElliott parse_ge(Fields& f) {
    GilbertElliott ge;
    f.get_double("p_good_to_bad", ge.p_good_to_bad);
    f.get_double("p_bad_to_good", ge.p_bad_to_good);
    f.get_double("error_prob_good", ge.error_prob_good);
    f.get_double("error_prob_bad", ge.error_prob_bad);
    return ge;
}

Interferer parse_interferer(Fields& f) {
    Interferer intf;
    std::string preset;
    if (f.get_word("preset", preset)) {
        if (preset == "beacon")
            intf = beacon_preset();
        else if (preset == "lab5ghz")
            intf = lab5ghz_preset();
        else
            fail(f.line_of("preset"), "unknown preset '" + preset + "' (beacon, lab5ghz)");
    }

    std::string kind;
    if (f.get_word("kind", kind)) {
        const bool want_periodic = kind == "periodic";
        if (!want_periodic && kind != "bursty")
            fail(f.line_of("kind"), "unknown interferer kind '" + kind + "' (periodic, bursty)");
        const bool is_periodic = std::holds_alternative<PeriodicInterferer>(intf.model);
        if (want_periodic != is_periodic)
            intf.model = want_periodic ? std::variant<PeriodicInterferer, BurstyPoissonInterferer>(
                                             PeriodicInterferer{})
                                       : BurstyPoissonInterferer{};
    }

    if (auto* p = std::get_if<PeriodicInterferer>(&intf.model)) {
        f.set_hint("periodic interferer");
        f.get_i64("period_us", p->period_us);
        f.get_i64("jitter_us", p->jitter_us);
        f.get_double("hit_prob", p->hit_prob);
        f.get_i64("extra_delay_us", p->extra_delay_us);
        f.get_double("extra_loss_prob", p->extra_loss_prob);
    } else {
        auto& b = std::get<BurstyPoissonInterferer>(intf.model);
        f.set_hint("bursty interferer");
        f.get_double("mean_gap_us", b.mean_gap_us);
        f.get_int("burst_packets", b.burst_packets);
        f.get_i64("burst_spacing_us", b.burst_spacing_us);
        f.get_i64("extra_delay_us", b.extra_delay_us);
        f.get_double("extra_loss_prob", b.extra_loss_prob);
    }

    std::string scope;
    if (f.get_word("scope", scope)) {
        if (scope == "a")
            intf.scope = InterfererScope::ChannelA;
        else if (scope == "b")
            intf.scope = InterfererScope::ChannelB;
        else if (scope == "both")
            intf.scope = InterfererScope::Both;
        else
            fail(f.line_of("scope"), "unknown scope '" + scope + "' (a, b, both)");
    }
    f.get_double("coupling", intf.coupling);
    return intf;
}

} // namespace

SimConfig parse_sim_config(std::istream& in) {
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;

    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (auto pos = line.find_first_of("#;"); pos != std::string_view::npos)
            line = line.substr(0, pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (current.empty()) fail(line_no, "empty section name");
            sections[current];
            section_lines.emplace(current, line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        if (current.empty()) fail(line_no, "key before any [section]");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");
        auto [it, inserted] = sections[current].emplace(key, Entry{value, line_no, false});
        if (!inserted) fail(line_no, "duplicate key '" + key + "' in section [" + current + "]");
    }

    SimConfig cfg;
    std::vector<std::pair<int, std::string>> interferer_sections;

    for (auto& [name, section] : sections) {
        Fields f(section, name);
        if (name == "trial") {
            f.get_i64("n_packets", cfg.n_packets);
            f.get_i64("period_us", cfg.period_us);
            f.get_i64("skew_bound_us", cfg.skew_bound_us);
            f.get_i64("grace_us", cfg.grace_us);
            f.get_u64("seed", cfg.seed);
        } else if (name == "channel.a") {
            cfg.channel_a = parse_channel(f);
        } else if (name == "channel.b") {
            cfg.channel_b = parse_channel(f);
        } else if (name == "channel.a.gilbert_elliott") {
            cfg.channel_a.gilbert_elliott = parse_ge(f);
        } else if (name == "channel.b.gilbert_elliott") {
            cfg.channel_b.gilbert_elliott = parse_ge(f);
        } else if (name.rfind("interferer.", 0) == 0) {
            const std::string tail = name.substr(11);
            int idx = 0;
            auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), idx);
            if (ec != std::errc{} || p != tail.data() + tail.size() || idx < 1)
                fail(section_lines[name], "interferer sections are [interferer.1], [interferer.2], ...");
            interferer_sections.emplace_back(idx, name);
            continue; // parsed below, in numeric order
        } else {
            fail(section_lines[name], "unknown section [" + name + "]");
        }
        f.reject_unused();
    }

    std::sort(interferer_sections.begin(), interferer_sections.end());
    for (const auto& [idx, name] : interferer_sections) {
        Fields f(sections[name], name);
        cfg.interferers.push_back(parse_interferer(f));
        f.reject_unused();
    }

    try {
        validate(cfg); // field-level semantic checks (ranges, positivity)
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return parse_sim_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace redlink
