#include "swf/models.hpp"

#include <random>

#include "swf/engine.hpp"
#include "swf/errors.hpp"

namespace swf {

std::string scenario_layer(ScenarioId id) {
    switch (id) {
    case ScenarioId::Sn1: return "conv1";
    case ScenarioId::Sn2: return "pool1";
    case ScenarioId::Sn3: return "conv2";
    case ScenarioId::Sn4: return "pool2";
    case ScenarioId::Sn5: return "conv3";
    }
    throw DomainError("bad scenario id");
}

std::string to_string(ScenarioId id) {
    switch (id) {
    case ScenarioId::Sn1: return "Sn1";
    case ScenarioId::Sn2: return "Sn2";
    case ScenarioId::Sn3: return "Sn3";
    case ScenarioId::Sn4: return "Sn4";
    case ScenarioId::Sn5: return "Sn5";
    }
    throw DomainError("bad scenario id");
}

ScenarioId scenario_from_string(const std::string& s) {
    if (s == "Sn1") return ScenarioId::Sn1;
    if (s == "Sn2") return ScenarioId::Sn2;
    if (s == "Sn3") return ScenarioId::Sn3;
    if (s == "Sn4") return ScenarioId::Sn4;
    if (s == "Sn5") return ScenarioId::Sn5;
    throw ConfigError("unknown scenario '" + s + "'");
}

std::vector<ScenarioId> all_scenarios() {
    return {ScenarioId::Sn1, ScenarioId::Sn2, ScenarioId::Sn3, ScenarioId::Sn4,
            ScenarioId::Sn5};
}

NetworkSpec lenet() {
    NetworkSpec net;
    net.name = "lenet";
    net.input_dims = {1, 32, 32};
    net.class_count = 10;
    net.layers = {
        conv_spec("conv1", 6, 1, 5),
        relu_spec("relu1"),
        pool_spec("pool1"),
        conv_spec("conv2", 16, 6, 5),
        relu_spec("relu2"),
        pool_spec("pool2"),
        conv_spec("conv3", 120, 16, 5),
        relu_spec("relu3"),
        fc_spec("fc1", 120, 84),
        relu_spec("relu4"),
        fc_spec("fc2", 84, 10),
    };
    validate(net);
    return net;
}

NetworkSpec lenet3d() {
    NetworkSpec net;
    net.name = "lenet3d";
    net.input_dims = {3, 32, 32};
    net.class_count = 10;
    net.layers = {
        conv_spec("conv1", 5, 3, 5),
        relu_spec("relu1"),
        pool_spec("pool1"),
        conv_spec("conv2", 20, 5, 5),
        relu_spec("relu2"),
        pool_spec("pool2"),
        conv_spec("conv3", 100, 20, 5),
        relu_spec("relu3"),
        fc_spec("fc1", 100, 84),
        relu_spec("relu4"),
        fc_spec("fc2", 84, 10),
    };
    validate(net);
    return net;
}

namespace {

// Draws map the full 32-bit output onto [0,1]; the derivation never goes
// through distribution objects, whose sequences differ across standard
// libraries.
double unit_draw(std::mt19937& g) {
    return static_cast<double>(g()) / 4294967295.0;
}

float symmetric_draw(std::mt19937& g) {
    return static_cast<float>(2.0 * unit_draw(g) - 1.0);
}

} // namespace

Tensor random_tensor(const std::vector<int>& dims, std::mt19937& g, bool symmetric) {
    Tensor t(dims);
    for (int i = 0; i < t.size(); ++i)
        t.data()[static_cast<size_t>(i)] =
            symmetric ? symmetric_draw(g) : static_cast<float>(unit_draw(g));
    return t;
}

WeightMap fixture_weights(const NetworkSpec& net, std::uint32_t seed) {
    std::mt19937 g(seed);
    WeightMap weights;
    for (const LayerSpec& l : net.layers) {
        if (l.kind == LayerKind::Conv) {
            weights.emplace(l.name + ".weight",
                            random_tensor({l.out_channels, l.in_channels, l.kernel, l.kernel},
                                          g, true));
            weights.emplace(l.name + ".bias", random_tensor({l.out_channels}, g, true));
        } else if (l.kind == LayerKind::FullyConnected) {
            weights.emplace(l.name + ".weight",
                            random_tensor({l.out_features, l.in_features}, g, true));
            weights.emplace(l.name + ".bias", random_tensor({l.out_features}, g, true));
        }
    }
    return weights;
}

std::vector<Tensor> fixture_images(const NetworkSpec& net, int count, std::uint32_t seed) {
    if (count < 0) throw DomainError("image count must be non-negative");
    std::mt19937 g(seed);
    std::vector<Tensor> images;
    images.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) images.push_back(random_tensor(net.input_dims, g, false));
    return images;
}

std::pair<Tensor, Tensor> motivational_pair(std::uint32_t seed) {
    std::mt19937 g(seed);
    Tensor input = random_tensor({3, 12, 12}, g, true);
    Tensor weight = random_tensor({3, 3, 5, 5}, g, true);
    Tensor bias({3});

    OpCounts scratch;
    Tensor o1 = conv_layer(input, weight, bias, ChannelPermutation::identity(3), scratch);
    Tensor o2 = conv_layer(input, weight, bias, rotation(3, 1), scratch);
    return {std::move(o1), std::move(o2)};
}

} // namespace swf
