#include "swf/engine.hpp"

#include <algorithm>

#include "swf/errors.hpp"

namespace swf {

namespace {

void check_range(int from, int to, int total) {
    if (from < 0 || to > total || from > to)
        throw DomainError("produce range [" + std::to_string(from) + ", " +
                          std::to_string(to) + ") outside 0.." + std::to_string(total));
}

const Tensor& param(const WeightMap& weights, const std::string& name) {
    auto it = weights.find(name);
    if (it == weights.end()) throw ConfigError("missing weight tensor '" + name + "'");
    return it->second;
}

} // namespace

void conv_layer_range(const Tensor& in, const Tensor& weight, const Tensor& bias,
                      const ChannelPermutation& order, Tensor& out, int from, int to,
                      OpCounts& ops) {
    if (in.rank() != 3) throw SizeMismatchError("conv input must be rank 3");
    if (weight.rank() != 4) throw SizeMismatchError("conv weight must be rank 4");
    if (bias.rank() != 1) throw SizeMismatchError("conv bias must be rank 1");
    const int C = in.dims()[0], H = in.dims()[1], W = in.dims()[2];
    const int O = weight.dims()[0], K = weight.dims()[2];
    if (weight.dims()[1] != C)
        throw SizeMismatchError("conv weight expects " + std::to_string(weight.dims()[1]) +
                                " input channels, got " + std::to_string(C));
    if (weight.dims()[3] != K) throw SizeMismatchError("conv kernel must be square");
    if (bias.dims()[0] != O) throw SizeMismatchError("conv bias length != filter count");
    if (K > H || K > W) throw SizeMismatchError("conv kernel larger than input");
    if (order.size() != O) throw SizeMismatchError("order length != filter count");
    order.validate();

    const int OH = H - K + 1, OW = W - K + 1, plane = OH * OW;
    const int total = O * plane;
    if (out.rank() != 3 || out.dims()[0] != O || out.dims()[1] != OH || out.dims()[2] != OW)
        throw SizeMismatchError("conv output tensor has wrong dims");
    check_range(from, to, total);

    const float* pin = in.data().data();
    const float* pw = weight.data().data();
    const float* pb = bias.data().data();
    float* pout = out.data().data();
    const int* ord = order.order.data();

    for (int e = from; e < to; ++e) {
        const int o = e / plane;
        const int rem = e % plane;
        const int y = rem / OW;
        const int x = rem % OW;
        const int bank = ord[o];
        float acc = pb[bank];
        const float* wb = pw + static_cast<size_t>(bank) * C * K * K;
        for (int c = 0; c < C; ++c)
            for (int u = 0; u < K; ++u) {
                const float* row = pin + (static_cast<size_t>(c) * H + y + u) * W + x;
                const float* wr = wb + (static_cast<size_t>(c) * K + u) * K;
                for (int v = 0; v < K; ++v) acc += row[v] * wr[v];
            }
        pout[e] = acc;
    }

    ops.macs += static_cast<std::uint64_t>(to - from) * C * K * K;
    if (!order.is_identity()) ops.perm_applications += static_cast<std::uint64_t>(to - from);
}

Tensor conv_layer(const Tensor& in, const Tensor& weight, const Tensor& bias,
                  const ChannelPermutation& order, OpCounts& ops) {
    if (in.rank() != 3 || weight.rank() != 4)
        throw SizeMismatchError("conv needs rank-3 input and rank-4 weight");
    const int O = weight.dims()[0], K = weight.dims()[2];
    const int OH = in.dims()[1] - K + 1, OW = in.dims()[2] - K + 1;
    if (OH <= 0 || OW <= 0) throw SizeMismatchError("conv kernel larger than input");
    Tensor out({O, OH, OW});
    conv_layer_range(in, weight, bias, order, out, 0, O * OH * OW, ops);
    return out;
}

Tensor conv_layer(const Tensor& in, const Tensor& weight, const Tensor& bias, OpCounts& ops) {
    if (weight.rank() != 4) throw SizeMismatchError("conv weight must be rank 4");
    return conv_layer(in, weight, bias, ChannelPermutation::identity(weight.dims()[0]), ops);
}

void maxpool_layer_range(const Tensor& in, const ChannelPermutation& order, Tensor& out,
                         int from, int to, OpCounts& ops) {
    if (in.rank() != 3) throw SizeMismatchError("pool input must be rank 3");
    const int C = in.dims()[0], H = in.dims()[1], W = in.dims()[2];
    if (H % 2 != 0 || W % 2 != 0)
        throw ConfigError("pool input extent " + std::to_string(H) + "x" + std::to_string(W) +
                          " is not even");
    if (order.size() != C) throw SizeMismatchError("order length != channel count");
    order.validate();

    const int OH = H / 2, OW = W / 2, plane = OH * OW;
    const int total = C * plane;
    if (out.rank() != 3 || out.dims()[0] != C || out.dims()[1] != OH || out.dims()[2] != OW)
        throw SizeMismatchError("pool output tensor has wrong dims");
    check_range(from, to, total);

    const float* pin = in.data().data();
    float* pout = out.data().data();
    const int* ord = order.order.data();

    for (int e = from; e < to; ++e) {
        const int c = e / plane;
        const int rem = e % plane;
        const int y = rem / OW;
        const int x = rem % OW;
        const float* base =
            pin + (static_cast<size_t>(ord[c]) * H + 2 * y) * W + 2 * x;
        float m = base[0];
        if (base[1] > m) m = base[1];
        if (base[W] > m) m = base[W];
        if (base[W + 1] > m) m = base[W + 1];
        pout[e] = m;
    }

    ops.comparisons += static_cast<std::uint64_t>(to - from) * 3;
    if (!order.is_identity()) ops.perm_applications += static_cast<std::uint64_t>(to - from);
}

Tensor maxpool_layer(const Tensor& in, const ChannelPermutation& order, OpCounts& ops) {
    if (in.rank() != 3) throw SizeMismatchError("pool input must be rank 3");
    const int C = in.dims()[0], OH = in.dims()[1] / 2, OW = in.dims()[2] / 2;
    Tensor out({C, OH, OW});
    maxpool_layer_range(in, order, out, 0, C * OH * OW, ops);
    return out;
}

Tensor maxpool_layer(const Tensor& in, OpCounts& ops) {
    if (in.rank() != 3) throw SizeMismatchError("pool input must be rank 3");
    return maxpool_layer(in, ChannelPermutation::identity(in.dims()[0]), ops);
}

Tensor fc_layer(const Tensor& in, const Tensor& weight, const Tensor& bias, OpCounts& ops) {
    if (in.rank() != 1) throw SizeMismatchError("fc input must be rank 1");
    if (weight.rank() != 2) throw SizeMismatchError("fc weight must be rank 2");
    if (bias.rank() != 1) throw SizeMismatchError("fc bias must be rank 1");
    const int out_n = weight.dims()[0], in_n = weight.dims()[1];
    if (in.dims()[0] != in_n)
        throw SizeMismatchError("fc expects " + std::to_string(in_n) + " inputs, got " +
                                std::to_string(in.dims()[0]));
    if (bias.dims()[0] != out_n) throw SizeMismatchError("fc bias length != output count");

    Tensor out({out_n});
    const float* pin = in.data().data();
    const float* pw = weight.data().data();
    const float* pb = bias.data().data();
    float* pout = out.data().data();
    for (int j = 0; j < out_n; ++j) {
        float acc = pb[j];
        const float* wr = pw + static_cast<size_t>(j) * in_n;
        for (int i = 0; i < in_n; ++i) acc += pin[i] * wr[i];
        pout[j] = acc;
    }
    ops.macs += static_cast<std::uint64_t>(out_n) * in_n;
    return out;
}

Tensor relu_layer(const Tensor& in, OpCounts& ops) {
    Tensor out(in.dims());
    const float* pin = in.data().data();
    float* pout = out.data().data();
    const int n = in.size();
    for (int i = 0; i < n; ++i) pout[i] = pin[i] > 0.0f ? pin[i] : 0.0f;
    ops.comparisons += static_cast<std::uint64_t>(n);
    return out;
}

int top1(const Tensor& logits) {
    if (logits.rank() != 1 || logits.size() == 0)
        throw DomainError("top1 needs a non-empty rank-1 tensor");
    const std::vector<float>& d = logits.data();
    int best = 0;
    for (int i = 1; i < logits.size(); ++i)
        if (d[static_cast<size_t>(i)] > d[static_cast<size_t>(best)]) best = i;
    return best;
}

namespace {

// Shared walk for the benign and trojaned passes. armed == nullptr runs
// every layer benignly; otherwise layer armed->index splits at the
// monitored element and may switch the tail to the payload rotation.
struct ArmedPlan {
    int index = 0;
    int flat = 0;
    const TrojanConfig* cfg = nullptr;
    bool fired = false;
    float monitored = 0.0f;
};

void run_layers(const NetworkSpec& net, const WeightMap& weights, const Tensor& image,
                const std::vector<std::string>& tap_layers, const std::string& stop_after,
                ArmedPlan* armed, Tensor& final_out, bool& stopped, OpCounters& ops,
                TapSet& taps) {
    if (image.dims() != net.input_dims)
        throw SizeMismatchError("image dims do not match network input");
    if (!stop_after.empty()) find_layer(net, stop_after);
    for (const std::string& t : tap_layers) find_layer(net, t);

    Tensor cur = image;
    stopped = false;

    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& l = net.layers[i];
        OpCounts c;
        Tensor out;
        const bool host = armed != nullptr && static_cast<int>(i) == armed->index;

        switch (l.kind) {
        case LayerKind::Conv: {
            const Tensor& w = param(weights, l.name + ".weight");
            const Tensor& b = param(weights, l.name + ".bias");
            if (!host) {
                out = conv_layer(cur, w, b, c);
            } else {
                const int O = w.dims()[0], K = w.dims()[2];
                const int OH = cur.dims()[1] - K + 1, OW = cur.dims()[2] - K + 1;
                const int total = O * OH * OW;
                out = Tensor({O, OH, OW});
                ChannelPermutation ident = ChannelPermutation::identity(O);
                conv_layer_range(cur, w, b, ident, out, 0, armed->flat + 1, c);
                armed->monitored = out.data()[static_cast<size_t>(armed->flat)];
                c.comparisons += 2;
                armed->fired = armed->cfg->trigger.interval.contains(armed->monitored);
                ChannelPermutation tail =
                    armed->fired ? rotation(O, armed->cfg->payload.order_factor) : ident;
                conv_layer_range(cur, w, b, tail, out, armed->flat + 1, total, c);
            }
            break;
        }
        case LayerKind::MaxPool: {
            if (!host) {
                out = maxpool_layer(cur, c);
            } else {
                const int C = cur.dims()[0], OH = cur.dims()[1] / 2, OW = cur.dims()[2] / 2;
                const int total = C * OH * OW;
                out = Tensor({C, OH, OW});
                ChannelPermutation ident = ChannelPermutation::identity(C);
                maxpool_layer_range(cur, ident, out, 0, armed->flat + 1, c);
                armed->monitored = out.data()[static_cast<size_t>(armed->flat)];
                c.comparisons += 2;
                armed->fired = armed->cfg->trigger.interval.contains(armed->monitored);
                ChannelPermutation tail =
                    armed->fired ? rotation(C, armed->cfg->payload.order_factor) : ident;
                maxpool_layer_range(cur, tail, out, armed->flat + 1, total, c);
            }
            break;
        }
        case LayerKind::FullyConnected: {
            const Tensor& w = param(weights, l.name + ".weight");
            const Tensor& b = param(weights, l.name + ".bias");
            out = fc_layer(cur.rank() == 1 ? cur : cur.flattened(), w, b, c);
            break;
        }
        case LayerKind::ReLU:
            out = relu_layer(cur, c);
            break;
        }

        ops.per_layer[l.name] = c;
        ops.total += c;
        cur = std::move(out);
        if (std::find(tap_layers.begin(), tap_layers.end(), l.name) != tap_layers.end())
            taps.emplace(l.name, cur);
        if (!stop_after.empty() && l.name == stop_after) {
            stopped = true;
            break;
        }
    }
    final_out = std::move(cur);
}

} // namespace

ForwardResult forward(const NetworkSpec& net, const WeightMap& weights, const Tensor& image,
                      const std::vector<std::string>& tap_layers,
                      const std::string& stop_after) {
    ForwardResult r;
    bool stopped = false;
    run_layers(net, weights, image, tap_layers, stop_after, nullptr, r.logits, stopped,
               r.ops, r.taps);
    if (!stopped) r.predicted = top1(r.logits);
    return r;
}

ArmedResult forward_armed(const NetworkSpec& net, const WeightMap& weights,
                          const Tensor& image, const TrojanConfig& cfg,
                          const std::vector<std::string>& tap_layers) {
    if (cfg.payload.kind == PayloadKind::None)
        throw UnsupportedPayloadError("monitor-only config has no payload to execute");
    ArmedPlan plan;
    plan.index = resolve_against(net, cfg);
    plan.cfg = &cfg;
    plan.flat = flat_from_element(layer_output_dims(net, cfg.trigger.layer),
                                  cfg.trigger.element);

    ArmedResult r;
    bool stopped = false;
    run_layers(net, weights, image, tap_layers, "", &plan, r.logits, stopped, r.ops, r.taps);
    r.predicted = top1(r.logits);
    r.fired = plan.fired;
    r.monitored_value = plan.monitored;
    return r;
}

} // namespace swf
