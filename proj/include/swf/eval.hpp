#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swf/engine.hpp"
#include "swf/models.hpp"

namespace swf {

struct ImageRecord {
    int index = 0;
    bool fired = false;
    int benign_top1 = -1;
    int armed_top1 = -1;
    float logits_linf = 0.0f;
    double layer_changed_fraction = 0.0;
    std::int64_t macs_delta = 0;         // armed minus benign, this image
    std::int64_t comparisons_delta = 0;
    std::int64_t perm_applications = 0;
};

struct EvalReport {
    std::string model;
    std::string layer;
    double change_threshold = 0.95;
    int batch_size = 200;
    int dataset_size = 0;
    std::vector<ImageRecord> images;
    std::vector<int> batch_trigger_counts;  // contiguous dataset-order batches
    int fired_total = 0;
    int flip_count_among_fired = 0;
    double flip_rate_among_fired = 0.0;
    std::int64_t macs_delta_total = 0;
    std::int64_t comparisons_delta_total = 0;
    std::int64_t perm_applications_total = 0;
    bool timed = false;                 // wall fields below are non-deterministic
    double median_overhead_pct = 0.0;   // armed-unfired vs benign, unfired images only
};

struct EvalOptions {
    int batch_size = 200;
    double change_threshold = 0.95;
    bool measure_time = false;
};

/// Runs every image through the benign and the armed pass, recording
/// divergence per image and aggregates per contiguous batch. Deterministic
/// except the optional wall-time field.
EvalReport run_eval(const NetworkSpec& net, const WeightMap& weights,
                    const std::vector<Tensor>& images, const TrojanConfig& cfg,
                    const EvalOptions& opts = {});

struct MotivReport {
    double threshold = 0.95;
    double reference_single_instance = 0.72;  // published single-run figure reproduced here
    std::vector<std::uint32_t> seeds;
    std::vector<double> fractions;
    double mean = 0.0;
};

/// The weight-shuffle divergence experiment over `seed_count` seeds
/// starting at seed_base.
MotivReport run_motiv(int seed_count = 20, std::uint32_t seed_base = 0,
                      double threshold = 0.95);

struct OverheadReport {
    int dataset_size = 0;
    int unfired_images = 0;
    int fired_images = 0;
    bool unfired_delta_uniform = true;  // same op delta on every unfired image
    OpDeltas unfired_delta;             // exact contract: {0, +2, 0}
    std::vector<std::int64_t> fired_perm_applications;
    int reps = 3;
    double median_overhead_pct = 0.0;   // non-deterministic wall-time figure
};

/// Times benign vs armed passes per image (min of `reps` runs each) and
/// reports the median percentage overhead over the unfired images plus the
/// exact op-count deltas.
OverheadReport run_overhead(const NetworkSpec& net, const WeightMap& weights,
                            const std::vector<Tensor>& images, const TrojanConfig& cfg,
                            int reps = 3);

struct ProfileSidecar {
    std::string layer;
    ElementIndex element;
    int dataset_size = 0;
    int target_count = 0;
    ValueInterval window;
    int window_count = 0;  // samples inside the window, must equal target_count
    float min = 0.0f;
    float max = 0.0f;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<int> histogram;  // 16 equal-width bins over [min, max]
};

/// Summary statistics of the monitored element's profiled values.
ProfileSidecar make_sidecar(const ProfileAggregate& agg, const TrojanConfig& cfg);

std::string eval_report_to_json(const EvalReport& r);
std::string motiv_report_to_json(const MotivReport& r);
std::string overhead_report_to_json(const OverheadReport& r);
std::string sidecar_to_json(const ProfileSidecar& s);

} // namespace swf
