#include <doctest.h>

#include <stdexcept>

#include "helpers.hpp"
#include "oracles.hpp"
#include "redlink/trace.hpp"

using namespace redlink;
using testutil::Latencies;
using testutil::make_trace;
using testutil::make_trial;

TEST_CASE("loss indicator and latency per record") {
    ChannelTrace t;
    t.channel = ChannelId::A;
    t.trial_end = 100'000;
    t.records = {
        {1, 0, 850},          // received, d = 850
        {2, 10'000, {}},      // lost outright
        {3, 20'000, 20'000},  // zero-latency reception
        {4, 30'000, 100'001}, // past trial_end: counts as lost
        {5, 40'000, 100'000}, // exactly at trial_end: still received
    };
    CHECK(t.loss_indicator(0) == 0);
    CHECK(t.latency(0) == 850);
    CHECK(t.loss_indicator(1) == 1);
    CHECK_FALSE(t.latency(1).has_value());
    CHECK(t.latency(2) == 0);
    CHECK(t.loss_indicator(3) == 1);
    CHECK_FALSE(t.received(3).has_value());
    CHECK(t.loss_indicator(4) == 0);
    CHECK(t.n_lost() == 2);
    CHECK(t.n_received() == 3);
}

TEST_CASE("trace validation") {
    ChannelTrace t = make_trace(ChannelId::A, Latencies{500, 600, 700});
    CHECK_NOTHROW(validate(t));

    SUBCASE("seq must strictly increase") {
        t.records[2].seq = t.records[1].seq;
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
    SUBCASE("reception cannot precede transmission") {
        t.records[1].t_rx = t.records[1].t_tx - 1;
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
}

TEST_CASE("trial validation") {
    Trial t = make_trial(Latencies{500, 600}, Latencies{700, 800});
    CHECK_NOTHROW(validate(t));

    SUBCASE("seq alignment") {
        t.trace_b.records[1].seq = 99;
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
    SUBCASE("length mismatch") {
        t.trace_b.records.pop_back();
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
    SUBCASE("skew bound") {
        t.trace_b.records[0].t_tx += t.skew_bound_us + 1;
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
    SUBCASE("channel A stays on the period grid") {
        t.trace_a.records[1].t_tx += t.skew_bound_us + 1;
        t.trace_b.records[1].t_tx = t.trace_a.records[1].t_tx; // keep skew legal
        CHECK_THROWS_AS(validate(t), std::invalid_argument);
    }
}

TEST_CASE("merge takes the faster copy") {
    Trial t = make_trial(Latencies{850}, Latencies{1200});
    ChannelTrace m = merge_redundant(t);
    CHECK(m.channel == ChannelId::Redundant);
    CHECK(m.latency(0) == 850);
}

TEST_CASE("merge delivers when one channel loses") {
    Trial t = make_trial(Latencies{std::nullopt}, Latencies{3000});
    ChannelTrace m = merge_redundant(t);
    CHECK(m.loss_indicator(0) == 0);
    CHECK(m.latency(0) == 3000);
}

TEST_CASE("merge loses only on double loss") {
    // Losses A = {2,3}, B = {3,5}: only packet 3 is lost on the merged link.
    Latencies a = {900, std::nullopt, std::nullopt, 900, 900};
    Latencies b = {950, 950, std::nullopt, 950, std::nullopt};
    ChannelTrace m = merge_redundant(make_trial(a, b));
    CHECK(m.n_lost() == 1);
    CHECK(m.loss_indicator(2) == 1);
    CHECK(m.latency(1) == 950);
    CHECK(m.latency(3) == 900);
}

TEST_CASE("merged latency is the minimum even under transmit skew") {
    // B transmits 50 us early and arrives first, but A's copy is faster.
    Trial t;
    t.period_us = 10'000;
    t.skew_bound_us = 90;
    t.trace_a.channel = ChannelId::A;
    t.trace_b.channel = ChannelId::B;
    t.trace_a.records = {{1, 1000, 1600}}; // d = 600
    t.trace_b.records = {{1, 950, 1590}};  // d = 640, arrives 10 us earlier
    t.trace_a.trial_end = t.trace_b.trial_end = 1'000'000;
    ChannelTrace m = merge_redundant(t);
    CHECK(m.records[0].t_tx == 950);
    CHECK(m.latency(0) == 600);
}

TEST_CASE("merge of a trial against itself changes nothing") {
    std::mt19937_64 rng(42);
    Trial t = testutil::random_trial(rng, 64);
    t.trace_b = t.trace_a;
    t.trace_b.channel = ChannelId::B;
    ChannelTrace m = merge_redundant(t);
    for (std::size_t i = 0; i < t.trace_a.records.size(); ++i) {
        CHECK(m.latency(i) == t.trace_a.latency(i));
        CHECK(m.records[i].t_tx == t.trace_a.records[i].t_tx);
    }
}

TEST_CASE("merge properties on random trials") {
    std::mt19937_64 rng(7);
    for (int trial_no = 0; trial_no < 200; ++trial_no) {
        Trial t = testutil::random_trial(rng, 50);
        ChannelTrace m = merge_redundant(t);
        const auto want = oracle::merged_latencies(t);
        std::int64_t n_lost_both = 0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(m.latency(i) == want[i]);
            const auto da = t.trace_a.latency(i);
            const auto db = t.trace_b.latency(i);
            if (auto d = m.latency(i)) {
                if (da) CHECK(*d <= *da);
                if (db) CHECK(*d <= *db);
            } else {
                CHECK_FALSE(da.has_value());
                CHECK_FALSE(db.has_value());
                ++n_lost_both;
            }
        }
        CHECK(m.n_lost() == n_lost_both);
        CHECK(m.n_received() >= std::max(t.trace_a.n_received(), t.trace_b.n_received()));
    }
}
