#include "redlink/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "redlink/lre.hpp"
#include "redlink/rng.hpp"

namespace redlink {

double GilbertElliott::stationary_bad() const {
    return p_good_to_bad / (p_good_to_bad + p_bad_to_good);
}

double GilbertElliott::stationary_error_prob() const {
    const double pb = stationary_bad();
    return (1.0 - pb) * error_prob_good + pb * error_prob_bad;
}

Interferer beacon_preset() {
    Interferer i;
    i.model = PeriodicInterferer{102'400, 0, 1.0, 500, 0.25};
    return i;
}

Interferer lab5ghz_preset() {
    Interferer i;
    i.model = BurstyPoissonInterferer{1'000'000.0, 700, 500, 250, 0.02};
    return i;
}

namespace {

void check_prob(double p, const std::string& field) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("config: " + field + " outside [0, 1]");
}

void check_nonneg(std::int64_t v, const std::string& field) {
    if (v < 0) throw std::invalid_argument("config: " + field + " must be >= 0");
}

void validate_service(const ServiceModel& service, const std::string& prefix) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            check_nonneg(s.base_latency_us, prefix + ".base_latency_us");
            if constexpr (std::is_same_v<T, UnicastService>) {
                check_prob(s.per_attempt_error_prob, prefix + ".per_attempt_error_prob");
                if (s.max_retries < 0)
                    throw std::invalid_argument("config: " + prefix + ".max_retries must be >= 0");
                check_nonneg(s.retry_latency_us, prefix + ".retry_latency_us");
            } else {
                check_prob(s.error_prob, prefix + ".error_prob");
            }
            std::visit(
                [&](const auto& t) {
                    using U = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<U, ExponentialTail>) {
                        if (t.mean_us < 0.0)
                            throw std::invalid_argument("config: " + prefix + " tail mean < 0");
                    } else if constexpr (std::is_same_v<U, LogNormalTail>) {
                        if (t.sigma < 0.0)
                            throw std::invalid_argument("config: " + prefix + " tail sigma < 0");
                    } else {
                        if (t.value_us < 0.0)
                            throw std::invalid_argument("config: " + prefix + " tail value < 0");
                    }
                },
                s.tail);
        },
        service);
}

void validate_channel(const ChannelModel& ch, const std::string& prefix) {
    validate_service(ch.service, prefix);
    if (ch.gilbert_elliott) {
        const GilbertElliott& ge = *ch.gilbert_elliott;
        check_prob(ge.p_good_to_bad, prefix + ".ge.p_good_to_bad");
        check_prob(ge.p_bad_to_good, prefix + ".ge.p_bad_to_good");
        check_prob(ge.error_prob_good, prefix + ".ge.error_prob_good");
        check_prob(ge.error_prob_bad, prefix + ".ge.error_prob_bad");
        if (ge.p_good_to_bad + ge.p_bad_to_good <= 0.0)
            throw std::invalid_argument("config: " + prefix + ".ge transition probabilities both zero");
    }
}

void validate_interferer(const Interferer& intf, const std::string& prefix) {
    check_prob(intf.coupling, prefix + ".coupling");
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PeriodicInterferer>) {
                if (m.period_us <= 0)
                    throw std::invalid_argument("config: " + prefix + ".period_us must be > 0");
                check_nonneg(m.jitter_us, prefix + ".jitter_us");
                check_prob(m.hit_prob, prefix + ".hit_prob");
                check_nonneg(m.extra_delay_us, prefix + ".extra_delay_us");
                check_prob(m.extra_loss_prob, prefix + ".extra_loss_prob");
            } else {
                if (m.mean_gap_us <= 0.0)
                    throw std::invalid_argument("config: " + prefix + ".mean_gap_us must be > 0");
                if (m.burst_packets <= 0)
                    throw std::invalid_argument("config: " + prefix + ".burst_packets must be > 0");
                if (m.burst_spacing_us <= 0)
                    throw std::invalid_argument("config: " + prefix + ".burst_spacing_us must be > 0");
                check_nonneg(m.extra_delay_us, prefix + ".extra_delay_us");
                check_prob(m.extra_loss_prob, prefix + ".extra_loss_prob");
            }
        },
        intf.model);
}

Microseconds base_latency(const ServiceModel& service) {
    return std::visit([](const auto& s) { return s.base_latency_us; }, service);
}

/// Streams the events of interferer `index` over [0, horizon) and reports
/// each hit as (channel, slot).  Event times, jitter and the per-event gate
/// come from one substream; coupling decisions come from a separate one so
/// that the channel A hit pattern is invariant in the coupling parameter.
void for_each_hit(const Interferer& intf, int index, std::uint64_t seed, Microseconds period_us,
                  std::int64_t n_packets, const std::function<void(ChannelId, std::int64_t)>& apply) {
    const std::string tag = "intf" + std::to_string(index);
    Substream events(seed, stream_label(tag, "events"));
    Substream couple(seed, stream_label(tag, "couple"));
    const double horizon = static_cast<double>(n_packets) * static_cast<double>(period_us);

    auto emit = [&](double t) {
        if (t < 0.0 || t >= horizon) return;
        const std::int64_t slot = static_cast<std::int64_t>(t / static_cast<double>(period_us));
        if (slot < 0 || slot >= n_packets) return;
        switch (intf.scope) {
        case InterfererScope::ChannelA:
            apply(ChannelId::A, slot);
            break;
        case InterfererScope::ChannelB:
            apply(ChannelId::B, slot);
            break;
        case InterfererScope::Both:
            apply(ChannelId::A, slot);
            if (couple.bernoulli(intf.coupling)) apply(ChannelId::B, slot);
            break;
        }
    };

    if (const auto* p = std::get_if<PeriodicInterferer>(&intf.model)) {
        const double phase = events.uniform01() * static_cast<double>(p->period_us);
        for (std::int64_t m = 0;; ++m) {
            double t = phase + static_cast<double>(m) * static_cast<double>(p->period_us);
            if (t >= horizon) break;
            if (p->jitter_us > 0)
                t += static_cast<double>(events.uniform_int(-p->jitter_us, p->jitter_us));
            if (!events.bernoulli(p->hit_prob)) continue;
            emit(t);
        }
    } else {
        const auto& b = std::get<BurstyPoissonInterferer>(intf.model);
        double t = 0.0;
        while (true) {
            t += events.exponential(b.mean_gap_us);
            if (t >= horizon) break;
            for (int j = 0; j < b.burst_packets; ++j)
                emit(t + static_cast<double>(j) * static_cast<double>(b.burst_spacing_us));
            t += static_cast<double>(b.burst_packets - 1) * static_cast<double>(b.burst_spacing_us);
        }
    }
}

struct InterfererEffect {
    Microseconds extra_delay_us = 0;
    double extra_loss_prob = 0.0;
};

InterfererEffect effect_of(const Interferer& intf) {
    return std::visit([](const auto& m) { return InterfererEffect{m.extra_delay_us, m.extra_loss_prob}; },
                      intf.model);
}

double draw_tail(const TailLaw& tail, Substream& rng) {
    if (const auto* e = std::get_if<ExponentialTail>(&tail)) return rng.exponential(e->mean_us);
    if (const auto* l = std::get_if<LogNormalTail>(&tail)) return rng.lognormal(l->mu, l->sigma);
    return std::get<ConstantTail>(tail).value_us;
}

} // namespace

void validate(const SimConfig& config) {
    if (config.n_packets <= 0) throw std::invalid_argument("config: n_packets must be > 0");
    if (config.period_us <= 0) throw std::invalid_argument("config: period_us must be > 0");
    check_nonneg(config.skew_bound_us, "skew_bound_us");
    check_nonneg(config.grace_us, "grace_us");
    validate_channel(config.channel_a, "channel_a");
    validate_channel(config.channel_b, "channel_b");
    for (std::size_t k = 0; k < config.interferers.size(); ++k)
        validate_interferer(config.interferers[k], "interferer" + std::to_string(k + 1));
}

std::vector<std::string> config_warnings(const SimConfig& config) {
    std::vector<std::string> w;
    if (base_latency(config.channel_a.service) > config.period_us)
        w.push_back("channel A base latency exceeds the transmit period; consecutive packets overlap");
    if (base_latency(config.channel_b.service) > config.period_us)
        w.push_back("channel B base latency exceeds the transmit period; consecutive packets overlap");
    return w;
}

Trial simulate_trial(const SimConfig& config) {
    validate(config);
    const std::int64_t n = config.n_packets;

    // Transmit schedule: channel A on the grid, channel B skewed.
    Substream skew_rng(config.seed, "skew");
    std::vector<Microseconds> tx_a(n), tx_b(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const Microseconds t_request = i * config.period_us;
        const Microseconds skew = config.skew_bound_us > 0
                                      ? skew_rng.uniform_int(-config.skew_bound_us, config.skew_bound_us)
                                      : 0;
        const auto [copy_a, copy_b] = duplicate(i + 1, t_request, skew, config.skew_bound_us);
        tx_a[i] = copy_a.t_tx;
        tx_b[i] = copy_b.t_tx;
    }
    const Microseconds last_tx = std::max(tx_a[n - 1], tx_b[n - 1]);
    const Microseconds trial_end = last_tx + config.grace_us;

    // Interferer effects, accumulated per packet and channel.  An event adds
    // its delay and compounds its loss probability multiplicatively.
    std::vector<Microseconds> delay_a, delay_b;
    std::vector<double> survive_a, survive_b;
    if (!config.interferers.empty()) {
        delay_a.assign(n, 0);
        delay_b.assign(n, 0);
        survive_a.assign(n, 1.0);
        survive_b.assign(n, 1.0);
        for (std::size_t k = 0; k < config.interferers.size(); ++k) {
            const Interferer& intf = config.interferers[k];
            const InterfererEffect eff = effect_of(intf);
            for_each_hit(intf, static_cast<int>(k + 1), config.seed, config.period_us, n,
                         [&](ChannelId ch, std::int64_t slot) {
                             if (ch == ChannelId::A) {
                                 delay_a[slot] += eff.extra_delay_us;
                                 survive_a[slot] *= 1.0 - eff.extra_loss_prob;
                             } else {
                                 delay_b[slot] += eff.extra_delay_us;
                                 survive_b[slot] *= 1.0 - eff.extra_loss_prob;
                             }
                         });
        }
    }

    Trial trial;
    trial.period_us = config.period_us;
    trial.skew_bound_us = config.skew_bound_us;

    for (ChannelId ch : {ChannelId::A, ChannelId::B}) {
        const bool is_a = ch == ChannelId::A;
        const ChannelModel& model = is_a ? config.channel_a : config.channel_b;
        const std::vector<Microseconds>& tx = is_a ? tx_a : tx_b;
        const std::vector<Microseconds>& delay = is_a ? delay_a : delay_b;
        const std::vector<double>& survive = is_a ? survive_a : survive_b;
        const std::string_view label = channel_label(ch);

        Substream loss_rng(config.seed, stream_label("loss", label));
        Substream tail_rng(config.seed, stream_label("tail", label));
        Substream ge_rng(config.seed, stream_label("ge", label));

        bool ge_bad = false;
        ChannelTrace trace;
        trace.channel = ch;
        trace.trial_end = trial_end;
        trace.records.reserve(n);

        for (std::int64_t i = 0; i < n; ++i) {
            double p_state = 0.0;
            if (model.gilbert_elliott) {
                const GilbertElliott& ge = *model.gilbert_elliott;
                if (i == 0)
                    ge_bad = ge_rng.bernoulli(ge.stationary_bad());
                else
                    ge_bad = ge_bad ? !ge_rng.bernoulli(ge.p_bad_to_good)
                                    : ge_rng.bernoulli(ge.p_good_to_bad);
                p_state = ge_bad ? ge.error_prob_bad : ge.error_prob_good;
            }
            const double p_intf = survive.empty() ? 0.0 : 1.0 - survive[i];
            const Microseconds d_intf = delay.empty() ? 0 : delay[i];

            PacketRecord r;
            r.seq = i + 1;
            r.t_tx = tx[i];

            bool lost;
            double latency;
            if (const auto* u = std::get_if<UnicastService>(&model.service)) {
                const double p_att =
                    1.0 - (1.0 - u->per_attempt_error_prob) * (1.0 - p_state) * (1.0 - p_intf);
                int attempt = 0;
                lost = true;
                for (; attempt <= u->max_retries; ++attempt) {
                    if (!loss_rng.bernoulli(p_att)) {
                        lost = false;
                        break;
                    }
                }
                latency = static_cast<double>(u->base_latency_us) +
                          static_cast<double>(attempt) * static_cast<double>(u->retry_latency_us) +
                          draw_tail(u->tail, tail_rng) + static_cast<double>(d_intf);
            } else {
                const auto& m = std::get<MulticastService>(model.service);
                const double p = 1.0 - (1.0 - m.error_prob) * (1.0 - p_state) * (1.0 - p_intf);
                lost = loss_rng.bernoulli(p);
                latency = static_cast<double>(m.base_latency_us) + draw_tail(m.tail, tail_rng) +
                          static_cast<double>(d_intf);
            }

            if (!lost) {
                const Microseconds t_rx = r.t_tx + static_cast<Microseconds>(std::llround(latency));
                if (t_rx <= trial_end) r.t_rx = t_rx; // otherwise reception closed: lost
            }
            trace.records.push_back(r);
        }
        if (is_a)
            trial.trace_a = std::move(trace);
        else
            trial.trace_b = std::move(trace);
    }
    return trial;
}

std::pair<std::vector<char>, std::vector<char>> coupled_event_mask(const Interferer& interferer,
                                                                   Microseconds period_us,
                                                                   std::uint64_t seed,
                                                                   std::int64_t n_packets) {
    if (n_packets <= 0) throw std::invalid_argument("coupled_event_mask: n_packets must be > 0");
    if (period_us <= 0) throw std::invalid_argument("coupled_event_mask: period_us must be > 0");
    validate_interferer(interferer, "interferer");
    std::vector<char> mask_a(n_packets, 0), mask_b(n_packets, 0);
    for_each_hit(interferer, 1, seed, period_us, n_packets, [&](ChannelId ch, std::int64_t slot) {
        (ch == ChannelId::A ? mask_a : mask_b)[slot] = 1;
    });
    return {std::move(mask_a), std::move(mask_b)};
}

} // namespace redlink
