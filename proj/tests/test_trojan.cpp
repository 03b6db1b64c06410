#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "swf/engine.hpp"
#include "swf/errors.hpp"
#include "swf/models.hpp"
#include "swf/trojan.hpp"

using namespace swf;

TEST_CASE("select_rov picks the sparsest exact-count window") {
    ValueInterval w = select_rov({1, 2, 2, 3, 9, 10}, 2);
    CHECK(w.lo == 3.0f);
    CHECK(w.hi == 9.0f);

    std::vector<float> ramp(200);
    for (int i = 0; i < 200; ++i) ramp[static_cast<size_t>(i)] = static_cast<float>(i);
    ValueInterval r = select_rov(ramp, 6);
    CHECK(r.hi - r.lo == 5.0f);
    CHECK(interval_count(ramp, r) == 6);
}

TEST_CASE("select_rov handles degenerate inputs") {
    // all samples inside a single window when M == P
    ValueInterval all = select_rov({4, 1, 3, 2}, 4);
    CHECK(all.lo == 1.0f);
    CHECK(all.hi == 4.0f);

    // plateau: duplicates spill over every window boundary
    CHECK_THROWS_AS(select_rov({5, 5, 5, 5}, 2), NoRovError);

    CHECK_THROWS_AS(select_rov({}, 1), EmptyProfileError);
    CHECK_THROWS_AS(select_rov({1, 2}, 3), DomainError);
    CHECK_THROWS_AS(select_rov({1, 2}, 0), DomainError);
    CHECK_THROWS_AS(select_rov({1, std::nanf("")}, 1), DomainError);
}

TEST_CASE("select_rov agrees with the exhaustive search") {
    std::mt19937 g(31);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 1 + static_cast<int>(g() % 128);
        std::vector<float> samples(static_cast<size_t>(n));
        bool gridded = (trial % 3 == 0); // duplicate-heavy cases exercise spills
        for (auto& s : samples) {
            double u = static_cast<double>(g()) / 4294967295.0;
            s = gridded ? static_cast<float>(static_cast<int>(u * 8))
                        : static_cast<float>(u * 10 - 5);
        }
        int m = 1 + static_cast<int>(g() % static_cast<unsigned>(n));
        auto want = oracles::sparsest_window(samples, m);
        if (!want) {
            CHECK_THROWS_AS(select_rov(samples, m), NoRovError);
        } else {
            ValueInterval got = select_rov(samples, m);
            CHECK(got.lo == want->lo);
            CHECK(got.hi == want->hi);
            CHECK(interval_count(samples, got) == m);
        }
    }
}

TEST_CASE("interval_count uses closed bounds") {
    std::vector<float> s{1, 2, 3, 4};
    CHECK(interval_count(s, {2, 3}) == 2);
    CHECK(interval_count(s, {2, 2}) == 1);
    CHECK(interval_count(s, {5, 9}) == 0);
    CHECK(interval_count(s, {3, 2}) == 0); // inverted == disarmed == empty
}

TEST_CASE("default order factor is half the bank size, clamped to stay valid") {
    CHECK(default_order_factor(2) == 1);
    CHECK(default_order_factor(6) == 4);
    CHECK(default_order_factor(16) == 9);
    CHECK(default_order_factor(100) == 51);
    CHECK_THROWS_AS(default_order_factor(1), UnsupportedPayloadError);
    CHECK_THROWS_AS(default_order_factor(0), UnsupportedPayloadError);

    // the produced rotation is never the identity, and has full cyclic order
    for (int l : {2, 3, 6, 16, 120}) {
        ChannelPermutation p = rotation(l, default_order_factor(l));
        CHECK_FALSE(p.is_identity());
        std::vector<int> acc(static_cast<size_t>(l));
        for (int i = 0; i < l; ++i) acc[static_cast<size_t>(i)] = i;
        for (int rep = 0; rep < l; ++rep) {
            std::vector<int> next(static_cast<size_t>(l));
            for (int i = 0; i < l; ++i)
                next[static_cast<size_t>(i)] = acc[static_cast<size_t>(p.order[static_cast<size_t>(i)])];
            acc = next;
        }
        for (int i = 0; i < l; ++i) CHECK(acc[static_cast<size_t>(i)] == i);
    }
}

TEST_CASE("criterion from a firing rate") {
    CHECK(RoVCriterion::from_rate(0.03, 200).target_count == 6);
    CHECK(RoVCriterion::from_rate(0.03, 1000).target_count == 30);
    CHECK(RoVCriterion::from_rate(0.03, 10).target_count == 1); // floor of one
    CHECK_THROWS_AS(RoVCriterion::from_rate(0.0, 100), DomainError);
    CHECK_THROWS_AS(RoVCriterion::from_rate(1.5, 100), DomainError);
    CHECK_THROWS_AS(RoVCriterion::from_rate(0.03, 0), DomainError);
}

TEST_CASE("profiling one element collects one value per image") {
    NetworkSpec net = lenet();
    WeightMap weights = fixture_weights(net, 7);
    std::vector<Tensor> images = fixture_images(net, 20, 41);

    ProfileAggregate agg = profile_index(net, weights, images, "conv1", {2, 3, 4});
    CHECK(agg.values.size() == 20);
    ProfileAggregate again = profile_index(net, weights, images, "conv1", {2, 3, 4});
    CHECK(agg.values == again.values);

    // zero weights: every profiled value is the channel bias
    WeightMap zero;
    for (auto& [k, v] : weights) zero.emplace(k, Tensor(v.dims()));
    ProfileAggregate flat = profile_index(net, zero, images, "conv1", {2, 3, 4});
    for (float v : flat.values) CHECK(v == 0.0f);

    CHECK_THROWS_AS(profile_index(net, weights, {}, "conv1", {0, 0, 0}),
                    EmptyProfileError);
    CHECK_THROWS_AS(profile_index(net, weights, images, "conv1", {9, 0, 0}),
                    ConfigError);
    CHECK_THROWS_AS(profile_index(net, weights, images, "nope", {0, 0, 0}),
                    ConfigError);
}

TEST_CASE("trigger design is reproducible and self-consistent") {
    NetworkSpec net = lenet();
    WeightMap weights = fixture_weights(net, 7);
    std::vector<Tensor> images = fixture_images(net, 200, 1);

    DesignOptions opt;
    opt.crit = RoVCriterion::from_rate(0.03, images.size());
    opt.seed = 3;
    TrojanConfig a = design_trigger(net, weights, images, "conv1", opt);
    TrojanConfig b = design_trigger(net, weights, images, "conv1", opt);

    CHECK(a.trigger.layer == "conv1");
    CHECK(a.trigger.element.channel == b.trigger.element.channel);
    CHECK(a.trigger.element.row == b.trigger.element.row);
    CHECK(a.trigger.element.col == b.trigger.element.col);
    CHECK(a.trigger.interval.lo == b.trigger.interval.lo);
    CHECK(a.trigger.interval.hi == b.trigger.interval.hi);
    CHECK(a.payload.kind == PayloadKind::WeightShuffle);
    CHECK(a.payload.order_factor == 4);
    CHECK(a.provenance.dataset_size == 200);
    CHECK(a.provenance.target_count == 6);

    // the designed window hits exactly the target count on its own profile
    ProfileAggregate agg =
        profile_index(net, weights, images, "conv1", a.trigger.element);
    CHECK(interval_count(agg.values, a.trigger.interval) == 6);

    // a different seed may pick a different element
    DesignOptions opt2 = opt;
    opt2.seed = 99;
    TrojanConfig c = design_trigger(net, weights, images, "conv1", opt2);
    CHECK(interval_count(
              profile_index(net, weights, images, "conv1", c.trigger.element).values,
              c.trigger.interval) == 6);
}

TEST_CASE("trigger design on a pool layer uses the pool payload") {
    NetworkSpec net = lenet();
    WeightMap weights = fixture_weights(net, 7);
    std::vector<Tensor> images = fixture_images(net, 60, 1);

    DesignOptions opt;
    opt.crit.target_count = 3;
    opt.seed = 5;
    opt.payload = PayloadKind::OutputChannelShuffle;
    TrojanConfig cfg = design_trigger(net, weights, images, "pool1", opt);
    CHECK(cfg.payload.kind == PayloadKind::OutputChannelShuffle);
    CHECK(cfg.payload.order_factor == 4);
    CHECK(interval_count(
              profile_index(net, weights, images, "pool1", cfg.trigger.element).values,
              cfg.trigger.interval) == 3);
}

TEST_CASE("trigger design failure modes") {
    NetworkSpec net = lenet();
    WeightMap weights = fixture_weights(net, 7);
    std::vector<Tensor> images = fixture_images(net, 50, 1);

    DesignOptions opt;
    opt.crit.target_count = 2;
    opt.seed = 1;

    CHECK_THROWS_AS(design_trigger(net, weights, images, "relu1", opt), ConfigError);
    CHECK_THROWS_AS(design_trigger(net, weights, images, "fc1", opt), ConfigError);
    CHECK_THROWS_AS(design_trigger(net, weights, {}, "conv1", opt),
                    EmptyProfileError);

    DesignOptions bad = opt;
    bad.crit.target_count = 51; // more than the profile holds
    CHECK_THROWS_AS(design_trigger(net, weights, images, "conv1", bad), DomainError);

    // constant feature maps leave no valid window anywhere
    WeightMap zero;
    for (auto& [k, v] : weights) zero.emplace(k, Tensor(v.dims()));
    CHECK_THROWS_AS(design_trigger(net, zero, images, "conv1", opt),
                    DesignFailedError);
}

TEST_CASE("expected firing rate") {
    TrojanConfig cfg;
    cfg.provenance = {200, 6};
    CHECK(expected_rate(cfg) == doctest::Approx(0.03));
    cfg.provenance = {50, 50};
    CHECK(expected_rate(cfg) == doctest::Approx(1.0));
}

TEST_CASE("config resolution validates against the host network") {
    NetworkSpec net = lenet();

    TrojanConfig cfg;
    cfg.trigger.layer = "conv2";
    cfg.trigger.element = {15, 9, 9};
    cfg.trigger.interval = {-1, 1};
    cfg.payload = {PayloadKind::WeightShuffle, 9};
    CHECK_NOTHROW(resolve_against(net, cfg));

    // disarmed configs resolve fine
    TrojanConfig off = cfg;
    off.trigger.interval = {2, -2};
    CHECK(off.trigger.disarmed());
    CHECK_NOTHROW(resolve_against(net, off));

    TrojanConfig bad = cfg;
    bad.trigger.layer = "convX";
    CHECK_THROWS_AS(resolve_against(net, bad), ConfigError);

    bad = cfg;
    bad.trigger.element = {16, 0, 0};
    CHECK_THROWS_AS(resolve_against(net, bad), ConfigError);

    bad = cfg;
    bad.payload.order_factor = 16;
    CHECK_THROWS_AS(resolve_against(net, bad), ConfigError);

    bad = cfg;
    bad.trigger.layer = "pool2";
    bad.trigger.element = {15, 4, 4}; // valid for pool2, so the payload check trips
    bad.payload.kind = PayloadKind::WeightShuffle;
    CHECK_THROWS_AS(resolve_against(net, bad), UnsupportedPayloadError);

    bad = cfg;
    bad.trigger.interval = {std::nanf(""), 1.0f};
    CHECK_THROWS_AS(resolve_against(net, bad), ConfigError);
}
