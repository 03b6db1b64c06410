#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swf/network.hpp"

namespace swf {

enum class PayloadKind { WeightShuffle, OutputChannelShuffle, None };

std::string to_string(PayloadKind k);
PayloadKind payload_kind_from_string(const std::string& s);

/// Closed interval [lo, hi] of monitored values. lo > hi is a legal
/// "disarmed" encoding that can never fire.
struct ValueInterval {
    float lo = 0.0f;
    float hi = 0.0f;

    bool contains(float v) const { return v >= lo && v <= hi; }
};

/// Which element of which layer output is watched, and the window that fires.
struct TriggerSpec {
    std::string layer;
    ElementIndex element;
    ValueInterval interval;

    bool disarmed() const { return interval.lo > interval.hi; }
};

/// What the fired trojan does to the rest of its own layer: cyclic rotation
/// of the conv filter/bias banks or of the pool input-channel read order.
struct PayloadSpec {
    PayloadKind kind = PayloadKind::WeightShuffle;
    int order_factor = 1;  // rotation amount f, 0 < f < channel count
};

/// Where the trigger window came from: profiled over P values, tuned to
/// admit exactly M of them.
struct Provenance {
    int dataset_size = 0;   // P
    int target_count = 0;   // M
};

struct TrojanConfig {
    TriggerSpec trigger;
    PayloadSpec payload;
    Provenance provenance;
};

/// Sanity-checks a config against a model and returns the host layer index.
/// ConfigError for unknown layer / trusted layer / out-of-range element;
/// UnsupportedPayloadError when the payload kind cannot run on that layer.
int resolve_against(const NetworkSpec& net, const TrojanConfig& cfg);

/// The monitored values of one element across a profiling set, in dataset
/// order: values[i] comes from image i.
struct ProfileAggregate {
    std::string layer;
    ElementIndex element;
    std::vector<float> values;
};

/// Column store of a whole layer: values[e][i] is flat element e of the
/// layer output for image i. Feeds candidate scans without re-running
/// the network per candidate.
struct LayerProfile {
    std::string layer;
    std::vector<int> dims;
    std::vector<std::vector<float>> values;

    int element_count() const { return static_cast<int>(values.size()); }
    int sample_count() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
};

ProfileAggregate profile_index(const NetworkSpec& net, const WeightMap& weights,
                               const std::vector<Tensor>& images, const std::string& layer,
                               const ElementIndex& element);

LayerProfile profile_layer(const NetworkSpec& net, const WeightMap& weights,
                           const std::vector<Tensor>& images, const std::string& layer);

/// Exact-count window criterion: the chosen interval must contain M of the
/// P profiled values.
struct RoVCriterion {
    int target_count = 0;  // M

    /// max(1, round(rate * dataset_size)).
    static RoVCriterion from_rate(double rate, int dataset_size);
};

/// Picks the sparsest window containing exactly `target_count` samples:
/// among runs of target_count consecutive sorted values whose closed span
/// admits no boundary duplicate, minimize target_count / (width + 1e-9);
/// ties prefer smaller lo. Throws EmptyProfileError / DomainError /
/// NoRovError (no qualifying window, e.g. a duplicate plateau).
ValueInterval select_rov(const std::vector<float>& samples, int target_count);

/// Count of samples inside the closed interval.
int interval_count(const std::vector<float>& samples, const ValueInterval& iv);

/// Rotation amount for a bank of `channels` entries: floor(l/2)+1, pulled
/// back to l-1 when that lands on l (only for l = 2).
int default_order_factor(int channels);

struct DesignOptions {
    RoVCriterion crit;
    int max_tries = 64;              // distinct candidate elements examined
    std::uint32_t seed = 0;          // drives the candidate-element order
    bool allow_monitor_only = false; // permit PayloadKind::None configs
    PayloadKind payload = PayloadKind::WeightShuffle;
};

/// Offline trigger design: profiles the named layer over the given images,
/// then scans seeded-random candidate elements for one whose value
/// distribution admits a clean count-M window. Throws DesignFailedError
/// when max_tries candidates all fail, UnsupportedPayloadError when the
/// layer cannot host the requested payload.
TrojanConfig design_trigger(const NetworkSpec& net, const WeightMap& weights,
                            const std::vector<Tensor>& images, const std::string& layer,
                            const DesignOptions& opts);

/// M / P, the profiling-set trigger rate.
double expected_rate(const TrojanConfig& cfg);

} // namespace swf
