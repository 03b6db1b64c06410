#include <random>
#include <set>

#include "doctest.h"
#include "swf/engine.hpp"
#include "swf/errors.hpp"
#include "swf/models.hpp"
#include "swf/tensor.hpp"

using namespace swf;

TEST_CASE("lenet layer chain and shapes") {
    NetworkSpec net = lenet();
    CHECK(net.input_dims == std::vector<int>{1, 32, 32});
    CHECK(net.class_count == 10);

        CHECK(layer_output_dims(net, "conv1") == std::vector<int>{6, 28, 28});
    CHECK(layer_output_dims(net, "pool1") == std::vector<int>{6, 14, 14});
    CHECK(layer_output_dims(net, "conv2") == std::vector<int>{16, 10, 10});
    CHECK(layer_output_dims(net, "pool2") == std::vector<int>{16, 5, 5});
    CHECK(layer_output_dims(net, "conv3") == std::vector<int>{120, 1, 1});
    CHECK(layer_output_dims(net, "fc1") == std::vector<int>{84});
    CHECK(layer_output_dims(net, "fc2") == std::vector<int>{10});
}

TEST_CASE("lenet3d layer chain and shapes") {
    NetworkSpec net = lenet3d();
    CHECK(net.input_dims == std::vector<int>{3, 32, 32});

        CHECK(layer_output_dims(net, "conv1") == std::vector<int>{5, 28, 28});
    CHECK(layer_output_dims(net, "pool1") == std::vector<int>{5, 14, 14});
    CHECK(layer_output_dims(net, "conv2") == std::vector<int>{20, 10, 10});
    CHECK(layer_output_dims(net, "pool2") == std::vector<int>{20, 5, 5});
    CHECK(layer_output_dims(net, "conv3") == std::vector<int>{100, 1, 1});
    CHECK(layer_output_dims(net, "fc1") == std::vector<int>{84});
    CHECK(layer_output_dims(net, "fc2") == std::vector<int>{10});
}

TEST_CASE("exactly the feature extractor runs untrusted") {
    for (const NetworkSpec& net : {lenet(), lenet3d()}) {
        std::set<std::string> untrusted;
        for (const LayerSpec& l : net.layers)
            if (l.trust == Trust::Untrusted) untrusted.insert(l.name);
        CHECK(untrusted ==
              std::set<std::string>{"conv1", "pool1", "conv2", "pool2", "conv3"});
    }
}

TEST_CASE("scenario identifiers map onto the untrusted layers in order") {
    CHECK(all_scenarios().size() == 5);
    CHECK(scenario_layer(ScenarioId::Sn1) == "conv1");
    CHECK(scenario_layer(ScenarioId::Sn2) == "pool1");
    CHECK(scenario_layer(ScenarioId::Sn3) == "conv2");
    CHECK(scenario_layer(ScenarioId::Sn4) == "pool2");
    CHECK(scenario_layer(ScenarioId::Sn5) == "conv3");
    CHECK(scenario_from_string("Sn3") == ScenarioId::Sn3);
    CHECK(to_string(ScenarioId::Sn5) == "Sn5");
    CHECK_THROWS_AS(scenario_from_string("Sn6"), ConfigError);
}

TEST_CASE("network validation rejects broken chains") {
    NetworkSpec net = lenet();
    net.layers[2].window = 3; // only 2x2 stride-2 pooling is supported
    CHECK_THROWS_AS(validate(net), ConfigError);

    NetworkSpec dup = lenet();
    dup.layers[1].name = "conv1";
    CHECK_THROWS_AS(validate(dup), ConfigError);

    NetworkSpec bad_fc = lenet();
    bad_fc.layers[8].in_features = 100; // conv3 emits 120 values
    CHECK_THROWS_AS(validate(bad_fc), ConfigError);
}

TEST_CASE("fixture weights cover every parametric layer, deterministically") {
    NetworkSpec net = lenet();
    WeightMap a = fixture_weights(net, 7);
    WeightMap b = fixture_weights(net, 7);
    WeightMap c = fixture_weights(net, 8);

    std::set<std::string> keys;
    for (auto& [k, v] : a) keys.insert(k);
    CHECK(keys == std::set<std::string>{
                      "conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
                      "conv3.weight", "conv3.bias", "fc1.weight", "fc1.bias",
                      "fc2.weight", "fc2.bias"});
    CHECK(a.at("conv1.weight").dims() == std::vector<int>{6, 1, 5, 5});
    CHECK(a.at("fc1.weight").dims() == std::vector<int>{84, 120});

    for (auto& [k, v] : a) {
        CHECK(bit_equal(v, b.at(k)));
        for (size_t i = 0; i < v.size(); ++i) {
            CHECK(v.data()[i] >= -1.0f);
            CHECK(v.data()[i] <= 1.0f);
        }
    }
    CHECK_FALSE(bit_equal(a.at("conv1.weight"), c.at("conv1.weight")));
}

TEST_CASE("fixture images are deterministic and in range") {
    NetworkSpec net = lenet3d();
    std::vector<Tensor> a = fixture_images(net, 8, 5);
    std::vector<Tensor> b = fixture_images(net, 8, 5);
    CHECK(a.size() == 8);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].dims() == std::vector<int>{3, 32, 32});
        CHECK(bit_equal(a[i], b[i]));
        for (size_t j = 0; j < a[i].size(); ++j) {
            CHECK(a[i].data()[j] >= 0.0f);
            CHECK(a[i].data()[j] <= 1.0f);
        }
    }
    CHECK_FALSE(bit_equal(a[0], a[1]));
}

TEST_CASE("motivational pair contrasts a clean conv with a shuffled one") {
    auto [o1, o2] = motivational_pair(0);
    CHECK(o1.dims() == std::vector<int>{3, 8, 8});
    CHECK(o2.dims() == std::vector<int>{3, 8, 8});
    CHECK_FALSE(bit_equal(o1, o2));
    // the shuffle only reorders filter banks: channel j of o2 is channel
    // (j + 1) mod 3 of o1
    CHECK(bit_equal(o2, permute_outer(o1, rotation(3, 1))));
    CHECK(changed_fraction(o1, o1, 0.95) == 0.0);

    auto [p1, p2] = motivational_pair(0);
    CHECK(bit_equal(o1, p1));
    CHECK(bit_equal(o2, p2));
}

TEST_CASE("motivational change fractions land in the reported band") {
    double sum = 0.0;
    for (unsigned s = 0; s < 20; ++s) {
        auto [o1, o2] = motivational_pair(s);
        sum += changed_fraction(o1, o2, 0.95);
    }
    double mean = sum / 20.0;
    CHECK(mean >= 0.4);
    CHECK(mean <= 0.95);
}
