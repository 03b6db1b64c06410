#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "swf/network.hpp"

namespace swf {

/// The five attack placements: Sn1..Sn5 target conv1, pool1, conv2, pool2,
/// conv3 respectively (same layer names in both shipped models).
enum class ScenarioId { Sn1, Sn2, Sn3, Sn4, Sn5 };

std::string scenario_layer(ScenarioId id);
std::string to_string(ScenarioId id);
ScenarioId scenario_from_string(const std::string& s);
std::vector<ScenarioId> all_scenarios();

/// 1x32x32 input; conv1 6@5x5, pool1, conv2 16@5x5, pool2, conv3 120@5x5
/// (ReLU after each conv), then fc 120->84, ReLU, fc 84->10. Conv and pool
/// layers are untrusted; activations and the head are trusted.
NetworkSpec lenet();

/// 3x32x32 variant with channel counts 5/20/100 and a 100->84->10 head.
NetworkSpec lenet3d();

/// Uniform tensor draw: [-1,1] when symmetric, [0,1] otherwise. Consumes
/// one engine draw per element, so results are bit-reproducible per seed.
Tensor random_tensor(const std::vector<int>& dims, std::mt19937& g, bool symmetric);

/// Seeded uniform [-1,1] weights and biases for every parametric layer;
/// bit-reproducible per seed.
WeightMap fixture_weights(const NetworkSpec& net, std::uint32_t seed);

/// Seeded batch of uniform [0,1] images shaped to the network input.
std::vector<Tensor> fixture_images(const NetworkSpec& net, int count, std::uint32_t seed);

/// One seeded 3x12x12 input convolved with a 3x3x5x5 filter set (zero
/// bias) under identity order (first) and under rotation(3,1) (second);
/// both outputs are 3x8x8.
std::pair<Tensor, Tensor> motivational_pair(std::uint32_t seed);

} // namespace swf
