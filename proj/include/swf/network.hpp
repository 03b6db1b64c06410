#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swf/tensor.hpp"

namespace swf {

enum class LayerKind { Conv, MaxPool, FullyConnected, ReLU };
enum class Trust { Trusted, Untrusted };
enum class PoolKind { Max, Avg };

/// One layer of the streaming pipeline. Conv layers are stride 1 with no
/// padding; pool layers are 2x2 stride 2 (max by default).
struct LayerSpec {
    LayerKind kind{};
    std::string name;
    Trust trust = Trust::Trusted;

    // Conv
    int out_channels = 0;
    int in_channels = 0;
    int kernel = 0;

    // MaxPool
    int window = 2;
    int stride = 2;
    PoolKind pool_kind = PoolKind::Max;

    // FullyConnected
    int in_features = 0;
    int out_features = 0;
};

LayerSpec conv_spec(std::string name, int out_channels, int in_channels, int kernel,
                    Trust trust = Trust::Untrusted);
LayerSpec pool_spec(std::string name, Trust trust = Trust::Untrusted);
LayerSpec fc_spec(std::string name, int in_features, int out_features,
                  Trust trust = Trust::Trusted);
LayerSpec relu_spec(std::string name, Trust trust = Trust::Trusted);

struct NetworkSpec {
    std::string name;
    std::vector<int> input_dims;  // [C, H, W]
    int class_count = 0;
    std::vector<LayerSpec> layers;
};

/// 0-based position of one element of a layer output. Rank-1 outputs use
/// row == col == 0 and channel as the element index.
struct ElementIndex {
    int channel = 0;
    int row = 0;
    int col = 0;

    bool operator==(const ElementIndex&) const = default;
};

/// Lexicographic (channel, row, col) flat position; rank 3 or rank 1 dims.
ElementIndex element_from_flat(const std::vector<int>& dims, int flat);
int flat_from_element(const std::vector<int>& dims, const ElementIndex& e);

struct OpCounts {
    std::uint64_t macs = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t perm_applications = 0;

    bool operator==(const OpCounts&) const = default;
};

inline OpCounts& operator+=(OpCounts& a, const OpCounts& b) {
    a.macs += b.macs;
    a.comparisons += b.comparisons;
    a.perm_applications += b.perm_applications;
    return a;
}

/// Signed per-field difference, after - before.
struct OpDeltas {
    std::int64_t macs = 0;
    std::int64_t comparisons = 0;
    std::int64_t perm_applications = 0;
};

OpDeltas delta(const OpCounts& after, const OpCounts& before);

/// Totals plus a per-layer breakdown; fresh per inference call.
struct OpCounters {
    OpCounts total;
    std::map<std::string, OpCounts> per_layer;
};

/// Copies of requested layer outputs for the current image.
using TapSet = std::map<std::string, Tensor>;

/// Named parameter tensors: "<layer>.weight" / "<layer>.bias".
using WeightMap = std::map<std::string, Tensor>;

/// Checks the layer dimension chain from input_dims to the logits.
/// Throws ConfigError on any violation.
void validate(const NetworkSpec& net);

/// Index of the named layer; ConfigError when absent.
int find_layer(const NetworkSpec& net, const std::string& name);

/// Output dims of every layer in order, as produced by the chain.
std::vector<std::vector<int>> layer_shapes(const NetworkSpec& net);

std::vector<int> layer_output_dims(const NetworkSpec& net, const std::string& name);

bool payload_capable(LayerKind kind);

} // namespace swf
