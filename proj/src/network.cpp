#include "swf/network.hpp"

#include "swf/errors.hpp"

namespace swf {

LayerSpec conv_spec(std::string name, int out_channels, int in_channels, int kernel,
                    Trust trust) {
    LayerSpec s;
    s.kind = LayerKind::Conv;
    s.name = std::move(name);
    s.trust = trust;
    s.out_channels = out_channels;
    s.in_channels = in_channels;
    s.kernel = kernel;
    return s;
}

LayerSpec pool_spec(std::string name, Trust trust) {
    LayerSpec s;
    s.kind = LayerKind::MaxPool;
    s.name = std::move(name);
    s.trust = trust;
    return s;
}

LayerSpec fc_spec(std::string name, int in_features, int out_features, Trust trust) {
    LayerSpec s;
    s.kind = LayerKind::FullyConnected;
    s.name = std::move(name);
    s.trust = trust;
    s.in_features = in_features;
    s.out_features = out_features;
    return s;
}

LayerSpec relu_spec(std::string name, Trust trust) {
    LayerSpec s;
    s.kind = LayerKind::ReLU;
    s.name = std::move(name);
    s.trust = trust;
    return s;
}

ElementIndex element_from_flat(const std::vector<int>& dims, int flat) {
    int total = numel(dims);
    if (flat < 0 || flat >= total)
        throw DomainError("flat index " + std::to_string(flat) + " outside " +
                          std::to_string(total) + " elements");
    ElementIndex e;
    if (dims.size() == 3) {
        int plane = dims[1] * dims[2];
        e.channel = flat / plane;
        e.row = (flat % plane) / dims[2];
        e.col = flat % dims[2];
    } else if (dims.size() == 1) {
        e.channel = flat;
    } else {
        throw DomainError("unsupported rank " + std::to_string(dims.size()));
    }
    return e;
}

int flat_from_element(const std::vector<int>& dims, const ElementIndex& e) {
    if (dims.size() == 3) {
        if (e.channel < 0 || e.channel >= dims[0] || e.row < 0 || e.row >= dims[1] ||
            e.col < 0 || e.col >= dims[2])
            throw DomainError("element index outside layer output");
        return (e.channel * dims[1] + e.row) * dims[2] + e.col;
    }
    if (dims.size() == 1) {
        if (e.channel < 0 || e.channel >= dims[0] || e.row != 0 || e.col != 0)
            throw DomainError("element index outside layer output");
        return e.channel;
    }
    throw DomainError("unsupported rank " + std::to_string(dims.size()));
}

OpDeltas delta(const OpCounts& after, const OpCounts& before) {
    OpDeltas d;
    d.macs = static_cast<std::int64_t>(after.macs) - static_cast<std::int64_t>(before.macs);
    d.comparisons = static_cast<std::int64_t>(after.comparisons) -
                    static_cast<std::int64_t>(before.comparisons);
    d.perm_applications = static_cast<std::int64_t>(after.perm_applications) -
                          static_cast<std::int64_t>(before.perm_applications);
    return d;
}

namespace {

// Walks the chain, returning each layer's output dims. Rank collapses from
// [C,H,W] to [features] at the first fully connected layer.
std::vector<std::vector<int>> walk_shapes(const NetworkSpec& net) {
    if (net.input_dims.size() != 3)
        throw ConfigError("network '" + net.name + "': input_dims must be rank 3 [C,H,W]");
    for (int d : net.input_dims)
        if (d <= 0) throw ConfigError("network '" + net.name + "': non-positive input dim");
    if (net.layers.empty())
        throw ConfigError("network '" + net.name + "': no layers");

    std::vector<std::vector<int>> shapes;
    shapes.reserve(net.layers.size());
    std::vector<int> cur = net.input_dims;

    for (const LayerSpec& l : net.layers) {
        if (l.name.empty()) throw ConfigError("network '" + net.name + "': unnamed layer");
        switch (l.kind) {
        case LayerKind::Conv: {
            if (cur.size() != 3)
                throw ConfigError("layer '" + l.name + "': conv needs rank-3 input");
            if (l.out_channels <= 0 || l.in_channels <= 0 || l.kernel <= 0)
                throw ConfigError("layer '" + l.name + "': bad conv geometry");
            if (l.in_channels != cur[0])
                throw ConfigError("layer '" + l.name + "': expects " +
                                  std::to_string(l.in_channels) + " input channels, got " +
                                  std::to_string(cur[0]));
            int oh = cur[1] - l.kernel + 1;
            int ow = cur[2] - l.kernel + 1;
            if (oh <= 0 || ow <= 0)
                throw ConfigError("layer '" + l.name + "': kernel larger than input");
            cur = {l.out_channels, oh, ow};
            break;
        }
        case LayerKind::MaxPool: {
            if (cur.size() != 3)
                throw ConfigError("layer '" + l.name + "': pool needs rank-3 input");
            if (l.window != 2 || l.stride != 2)
                throw ConfigError("layer '" + l.name + "': only 2x2 stride-2 pooling supported");
            if (cur[1] % 2 != 0 || cur[2] % 2 != 0)
                throw ConfigError("layer '" + l.name + "': odd input extent for 2x2 pooling");
            cur = {cur[0], cur[1] / 2, cur[2] / 2};
            break;
        }
        case LayerKind::FullyConnected: {
            int feat = numel(cur);
            if (l.in_features != feat)
                throw ConfigError("layer '" + l.name + "': expects " +
                                  std::to_string(l.in_features) + " input features, got " +
                                  std::to_string(feat));
            if (l.out_features <= 0)
                throw ConfigError("layer '" + l.name + "': bad out_features");
            cur = {l.out_features};
            break;
        }
        case LayerKind::ReLU:
            break;  // shape preserved
        }
        shapes.push_back(cur);
    }

    if (cur.size() != 1 || cur[0] != net.class_count)
        throw ConfigError("network '" + net.name + "': final output is not [" +
                          std::to_string(net.class_count) + "] logits");
    return shapes;
}

} // namespace

void validate(const NetworkSpec& net) {
    walk_shapes(net);
    for (size_t i = 0; i < net.layers.size(); ++i)
        for (size_t j = i + 1; j < net.layers.size(); ++j)
            if (net.layers[i].name == net.layers[j].name)
                throw ConfigError("network '" + net.name + "': duplicate layer name '" +
                                  net.layers[i].name + "'");
}

int find_layer(const NetworkSpec& net, const std::string& name) {
    for (size_t i = 0; i < net.layers.size(); ++i)
        if (net.layers[i].name == name) return static_cast<int>(i);
    throw ConfigError("network '" + net.name + "': no layer named '" + name + "'");
}

std::vector<std::vector<int>> layer_shapes(const NetworkSpec& net) {
    return walk_shapes(net);
}

std::vector<int> layer_output_dims(const NetworkSpec& net, const std::string& name) {
    int idx = find_layer(net, name);
    return walk_shapes(net)[static_cast<size_t>(idx)];
}

bool payload_capable(LayerKind kind) {
    return kind == LayerKind::Conv || kind == LayerKind::MaxPool;
}

} // namespace swf
