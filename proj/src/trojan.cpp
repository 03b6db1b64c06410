#include "swf/trojan.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swf/engine.hpp"
#include "swf/errors.hpp"

namespace swf {

std::string to_string(PayloadKind k) {
    switch (k) {
    case PayloadKind::WeightShuffle: return "weight_shuffle";
    case PayloadKind::OutputChannelShuffle: return "output_channel_shuffle";
    case PayloadKind::None: return "none";
    }
    throw DomainError("bad payload kind");
}

PayloadKind payload_kind_from_string(const std::string& s) {
    if (s == "weight_shuffle") return PayloadKind::WeightShuffle;
    if (s == "output_channel_shuffle") return PayloadKind::OutputChannelShuffle;
    if (s == "none") return PayloadKind::None;
    throw ConfigError("unknown payload kind '" + s + "'");
}

RoVCriterion RoVCriterion::from_rate(double rate, int dataset_size) {
    if (dataset_size <= 0) throw DomainError("dataset size must be positive");
    if (!(rate > 0.0) || rate > 1.0)
        throw DomainError("target rate must be in (0, 1], got " + std::to_string(rate));
    int m = static_cast<int>(std::lround(rate * dataset_size));
    return RoVCriterion{std::max(1, m)};
}

ValueInterval select_rov(const std::vector<float>& samples, int target_count) {
    if (samples.empty()) throw EmptyProfileError("no profiled values");
    int n = static_cast<int>(samples.size());
    if (target_count < 1)
        throw DomainError("target count must be positive, got " + std::to_string(target_count));
    if (target_count > n)
        throw DomainError("target count " + std::to_string(target_count) + " exceeds " +
                          std::to_string(n) + " samples");
    for (float v : samples)
        if (!std::isfinite(v)) throw DomainError("non-finite profiled value");

    std::vector<float> s(samples);
    std::sort(s.begin(), s.end());

    // A window of target_count consecutive sorted values is usable only when
    // its closed span admits nothing else, i.e. no equal value sits just
    // outside either end. Among usable windows the widest (least dense) wins.
    bool found = false;
    double best_score = 0.0;
    ValueInterval best;
    const int m = target_count;
    for (int i = 0; i + m <= n; ++i) {
        float lo = s[static_cast<size_t>(i)];
        float hi = s[static_cast<size_t>(i + m - 1)];
        if (i > 0 && s[static_cast<size_t>(i - 1)] == lo) continue;
        if (i + m < n && s[static_cast<size_t>(i + m)] == hi) continue;
        double width = static_cast<double>(hi) - static_cast<double>(lo);
        double score = static_cast<double>(m) / (width + 1e-9);
        bool better = !found || score < best_score ||
                      (score == best_score && lo < best.lo);
        if (better) {
            found = true;
            best_score = score;
            best = ValueInterval{lo, hi};
        }
    }
    if (!found)
        throw NoRovError("no window of " + std::to_string(m) +
                         " values is free of boundary duplicates");
    return best;
}

int interval_count(const std::vector<float>& samples, const ValueInterval& iv) {
    int c = 0;
    for (float v : samples)
        if (iv.contains(v)) ++c;
    return c;
}

int default_order_factor(int channels) {
    if (channels < 2)
        throw UnsupportedPayloadError("need at least 2 channels to shuffle, got " +
                                      std::to_string(channels));
    int f = channels / 2 + 1;
    if (f >= channels) f = channels - 1;
    return f;
}

int resolve_against(const NetworkSpec& net, const TrojanConfig& cfg) {
    int idx = find_layer(net, cfg.trigger.layer);
    const LayerSpec& layer = net.layers[static_cast<size_t>(idx)];
    if (layer.trust != Trust::Untrusted)
        throw ConfigError("layer '" + layer.name + "' is trusted; it cannot host a trojan");

    std::vector<int> dims = layer_output_dims(net, cfg.trigger.layer);
    try {
        flat_from_element(dims, cfg.trigger.element);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("trigger element: ") + e.what());
    }

    // lo > hi is the disarmed encoding, deliberately legal.
    if (std::isnan(cfg.trigger.interval.lo) || std::isnan(cfg.trigger.interval.hi))
        throw ConfigError("trigger interval is NaN");

    if (cfg.provenance.dataset_size < 0 || cfg.provenance.target_count < 0 ||
        cfg.provenance.target_count > cfg.provenance.dataset_size)
        throw ConfigError("bad provenance counts");

    if (cfg.payload.kind != PayloadKind::None) {
        if (cfg.payload.kind == PayloadKind::WeightShuffle && layer.kind != LayerKind::Conv)
            throw UnsupportedPayloadError("weight_shuffle requires a conv layer, '" +
                                          layer.name + "' is not one");
        if (cfg.payload.kind == PayloadKind::OutputChannelShuffle &&
            layer.kind != LayerKind::MaxPool)
            throw UnsupportedPayloadError("output_channel_shuffle requires a pool layer, '" +
                                          layer.name + "' is not one");
        int l = dims[0];
        if (l < 2)
            throw UnsupportedPayloadError("layer '" + layer.name +
                                          "' has a single channel; no shuffle exists");
        if (cfg.payload.order_factor <= 0 || cfg.payload.order_factor >= l)
            throw ConfigError("order factor " + std::to_string(cfg.payload.order_factor) +
                              " outside (0, " + std::to_string(l) + ")");
    }
    return idx;
}

ProfileAggregate profile_index(const NetworkSpec& net, const WeightMap& weights,
                               const std::vector<Tensor>& images, const std::string& layer,
                               const ElementIndex& element) {
    if (images.empty()) throw EmptyProfileError("no images to profile");
    std::vector<int> dims = layer_output_dims(net, layer);
    int flat;
    try {
        flat = flat_from_element(dims, element);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("profile element: ") + e.what());
    }

    ProfileAggregate agg;
    agg.layer = layer;
    agg.element = element;
    agg.values.reserve(images.size());
    for (const Tensor& img : images) {
        ForwardResult r = forward(net, weights, img, {layer}, layer);
        agg.values.push_back(r.taps.at(layer).data()[static_cast<size_t>(flat)]);
    }
    return agg;
}

LayerProfile profile_layer(const NetworkSpec& net, const WeightMap& weights,
                           const std::vector<Tensor>& images, const std::string& layer) {
    if (images.empty()) throw EmptyProfileError("no images to profile");
    LayerProfile prof;
    prof.layer = layer;
    prof.dims = layer_output_dims(net, layer);
    int elems = numel(prof.dims);
    prof.values.assign(static_cast<size_t>(elems), {});
    for (auto& v : prof.values) v.reserve(images.size());

    for (const Tensor& img : images) {
        ForwardResult r = forward(net, weights, img, {layer}, layer);
        const std::vector<float>& d = r.taps.at(layer).data();
        for (int e = 0; e < elems; ++e)
            prof.values[static_cast<size_t>(e)].push_back(d[static_cast<size_t>(e)]);
    }
    return prof;
}

namespace {

// Portable Fisher-Yates: only modulo draws from the generator, so the
// candidate order does not depend on a library's shuffle implementation.
void shuffle_indices(std::vector<int>& idx, std::mt19937& g) {
    for (size_t j = idx.size(); j > 1; --j) {
        size_t k = static_cast<size_t>(g() % j);
        std::swap(idx[j - 1], idx[k]);
    }
}

} // namespace

TrojanConfig design_trigger(const NetworkSpec& net, const WeightMap& weights,
                            const std::vector<Tensor>& images, const std::string& layer,
                            const DesignOptions& opts) {
    if (opts.payload == PayloadKind::None && !opts.allow_monitor_only)
        throw ConfigError("monitor-only design requested without allow_monitor_only");
    if (images.empty()) throw EmptyProfileError("no images to profile");
    if (opts.crit.target_count < 1)
        throw DomainError("target count must be positive");
    if (static_cast<size_t>(opts.crit.target_count) > images.size())
        throw DomainError("target count exceeds profiling set size");
    if (opts.max_tries < 1) throw DomainError("max_tries must be positive");

    int layer_idx = find_layer(net, layer);
    if (net.layers[static_cast<size_t>(layer_idx)].trust != Trust::Untrusted)
        throw ConfigError("layer '" + layer + "' is trusted; it cannot host a trojan");
    std::vector<int> dims = layer_output_dims(net, layer);
    if (opts.payload != PayloadKind::None && dims[0] < 2)
        throw UnsupportedPayloadError("layer '" + layer +
                                      "' has a single channel; no shuffle exists");

    LayerProfile prof = profile_layer(net, weights, images, layer);
    int elems = prof.element_count();

    std::vector<int> order(static_cast<size_t>(elems));
    for (int i = 0; i < elems; ++i) order[static_cast<size_t>(i)] = i;
    std::mt19937 g(opts.seed);
    shuffle_indices(order, g);

    int tries = std::min(opts.max_tries, elems);
    for (int t = 0; t < tries; ++t) {
        int e = order[static_cast<size_t>(t)];
        ValueInterval iv;
        try {
            iv = select_rov(prof.values[static_cast<size_t>(e)], opts.crit.target_count);
        } catch (const NoRovError&) {
            continue;
        }
        TrojanConfig cfg;
        cfg.trigger.layer = layer;
        cfg.trigger.element = element_from_flat(prof.dims, e);
        cfg.trigger.interval = iv;
        cfg.payload.kind = opts.payload;
        cfg.payload.order_factor =
            opts.payload == PayloadKind::None ? 0 : default_order_factor(prof.dims[0]);
        cfg.provenance.dataset_size = static_cast<int>(images.size());
        cfg.provenance.target_count = opts.crit.target_count;
        if (cfg.payload.kind != PayloadKind::None) resolve_against(net, cfg);
        return cfg;
    }
    throw DesignFailedError("no usable trigger window after " + std::to_string(tries) +
                            " candidate elements in layer '" + layer + "'");
}

double expected_rate(const TrojanConfig& cfg) {
    if (cfg.provenance.dataset_size <= 0)
        throw DomainError("provenance dataset size is not positive");
    return static_cast<double>(cfg.provenance.target_count) /
           static_cast<double>(cfg.provenance.dataset_size);
}

} // namespace swf
