#include <doctest.h>

#include <map>
#include <stdexcept>

#include "helpers.hpp"
#include "redlink/lre.hpp"

using namespace redlink;
using testutil::Latencies;

TEST_CASE("duplicate stamps both channels") {
    auto [a, b] = duplicate(7, 1000, 50);
    CHECK(a.seq == 7);
    CHECK(b.seq == 7);
    CHECK(a.channel == ChannelId::A);
    CHECK(b.channel == ChannelId::B);
    CHECK(a.t_tx == 1000);
    CHECK(b.t_tx == 1050);

    auto [a2, b2] = duplicate(8, 1000, -50);
    CHECK(a2.t_tx == 1000);
    CHECK(b2.t_tx == 950);
}

TEST_CASE("duplicate rejects skew beyond the bound") {
    CHECK_THROWS_AS(duplicate(1, 0, 91), std::domain_error);
    CHECK_THROWS_AS(duplicate(1, 0, -91), std::domain_error);
    CHECK_NOTHROW(duplicate(1, 0, 90));
    CHECK_NOTHROW(duplicate(1, 0, 120, 150));
    CHECK_THROWS_AS(duplicate(1, 0, 0, -1), std::domain_error);
}

TEST_CASE("first copy delivers, second discards") {
    Deduplicator d;
    TaggedCopy a{1, ChannelId::A, 0}, b{1, ChannelId::B, 10};
    CHECK(d.receive(a, 500) == RxVerdict::Deliver);
    CHECK(d.receive(b, 700) == RxVerdict::Discard);
    CHECK(d.deliver_count() == 1);
}

TEST_CASE("interleaved sequences deliver exactly once each") {
    Deduplicator d;
    CHECK(d.receive({7, ChannelId::A, 0}, 100) == RxVerdict::Deliver);
    CHECK(d.receive({8, ChannelId::B, 0}, 150) == RxVerdict::Deliver);
    CHECK(d.receive({7, ChannelId::B, 0}, 200) == RxVerdict::Discard);
    CHECK(d.receive({8, ChannelId::A, 0}, 250) == RxVerdict::Discard);
    CHECK(d.deliver_count() == 2);
}

TEST_CASE("copies below the window floor go stale") {
    Deduplicator d(4);
    for (std::int64_t s = 1; s <= 10; ++s)
        CHECK(d.receive({s, ChannelId::A, 0}, s * 10) == RxVerdict::Deliver);
    // window now covers seqs 7..10
    CHECK(d.receive({2, ChannelId::B, 0}, 200) == RxVerdict::Stale);
    CHECK(d.receive({7, ChannelId::B, 0}, 210) == RxVerdict::Discard);
    CHECK(d.deliver_count() == 10);
}

TEST_CASE("receive rejects t_rx before t_tx") {
    Deduplicator d;
    CHECK_THROWS_AS(d.receive({1, ChannelId::A, 1000}, 999), std::invalid_argument);
    CHECK_THROWS_AS(Deduplicator(0), std::invalid_argument);
}

TEST_CASE("exactly-once delivery under duplicate storms") {
    std::mt19937_64 rng(11);
    Deduplicator d;
    std::map<std::int64_t, int> delivered;
    std::uniform_int_distribution<std::int64_t> seq(1, 40);
    for (int k = 0; k < 500; ++k) {
        const std::int64_t s = seq(rng);
        if (d.receive({s, ChannelId::A, 0}, k) == RxVerdict::Deliver) ++delivered[s];
    }
    for (const auto& [s, count] : delivered) CHECK(count == 1);
    CHECK(d.deliver_count() == static_cast<std::int64_t>(delivered.size()));
}

TEST_CASE("run_trial with an empty stream loses everything") {
    Trial t = testutil::make_trial(Latencies{900, 900, 900}, Latencies{950, 950, 950});
    TxSchedule sched = tx_schedule(t);
    ChannelTrace out = run_trial(sched, {});
    CHECK(out.size() == 3);
    CHECK(out.n_lost() == 3);
    CHECK(out.trial_end == sched.trial_end);
}

TEST_CASE("run_trial rejects unsorted arrivals") {
    Trial t = testutil::make_trial(Latencies{900, 900}, Latencies{950, 950});
    TxSchedule sched = tx_schedule(t);
    std::vector<Arrival> ev = {{{2, ChannelId::A, 10'000}, 10'900},
                               {{1, ChannelId::A, 0}, 900}};
    CHECK_THROWS_AS(run_trial(sched, ev), std::invalid_argument);

    // Equal t_rx must order channel A before B.
    std::vector<Arrival> tie = {{{1, ChannelId::B, 0}, 900}, {{1, ChannelId::A, 0}, 900}};
    CHECK_THROWS_AS(run_trial(sched, tie), std::invalid_argument);
}

TEST_CASE("online replay equals offline merge") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 300; ++round) {
        Trial t = testutil::random_trial(rng, 60);
        ChannelTrace online = run_trial(tx_schedule(t), arrival_log(t));
        ChannelTrace offline = merge_redundant(t);
        CHECK(online == offline);
    }
}

TEST_CASE("trace reconstruction survives stale verdicts") {
    // Packet 1's only copy arrives after seqs 2..5 pushed the window floor
    // past it.  The de-duplicator flags it stale (no delivery), but the
    // reconstructed measurement trace still records the reception, so the
    // offline merge is reproduced even with a pathologically small window.
    Trial t;
    t.period_us = 100;
    t.trace_a.channel = ChannelId::A;
    t.trace_b.channel = ChannelId::B;
    for (std::int64_t i = 0; i < 5; ++i) {
        PacketRecord a{i + 1, i * 100, {}}, b{i + 1, i * 100, {}};
        if (i == 0)
            a.t_rx = 5000; // very late
        else
            a.t_rx = i * 100 + 50;
        t.trace_a.records.push_back(a);
        t.trace_b.records.push_back(b);
    }
    t.trace_a.trial_end = t.trace_b.trial_end = 100'000;

    CHECK(run_trial(tx_schedule(t), arrival_log(t)) == merge_redundant(t));
    CHECK(run_trial(tx_schedule(t), arrival_log(t), 2) == merge_redundant(t));
}
