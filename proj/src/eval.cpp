#include "swf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"
#include "swf/errors.hpp"
#include "swf/trojan.hpp"

namespace swf {

namespace {

using nlohmann::json;

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

float linf(const Tensor& a, const Tensor& b) {
    float m = 0.0f;
    for (int i = 0; i < a.size(); ++i) {
        float d = std::fabs(a.data()[static_cast<size_t>(i)] -
                            b.data()[static_cast<size_t>(i)]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace

EvalReport run_eval(const NetworkSpec& net, const WeightMap& weights,
                    const std::vector<Tensor>& images, const TrojanConfig& cfg,
                    const EvalOptions& opts) {
    if (opts.batch_size < 1) throw DomainError("batch size must be positive");
    resolve_against(net, cfg);

    EvalReport rep;
    rep.model = net.name;
    rep.layer = cfg.trigger.layer;
    rep.change_threshold = opts.change_threshold;
    rep.batch_size = opts.batch_size;
    rep.dataset_size = static_cast<int>(images.size());
    rep.timed = opts.measure_time;

    std::vector<std::string> taps = {cfg.trigger.layer};
    std::vector<double> overhead_samples;

    for (size_t i = 0; i < images.size(); ++i) {
        using clock = std::chrono::steady_clock;
        clock::time_point t0 = clock::now();
        ForwardResult benign = forward(net, weights, images[i], taps);
        clock::time_point t1 = clock::now();
        ArmedResult armed = forward_armed(net, weights, images[i], cfg, taps);
        clock::time_point t2 = clock::now();

        ImageRecord rec;
        rec.index = static_cast<int>(i);
        rec.fired = armed.fired;
        rec.benign_top1 = benign.predicted;
        rec.armed_top1 = armed.predicted;
        rec.logits_linf = linf(benign.logits, armed.logits);
        rec.layer_changed_fraction =
            changed_fraction(benign.taps.at(cfg.trigger.layer),
                             armed.taps.at(cfg.trigger.layer), opts.change_threshold);
        OpDeltas d = delta(armed.ops.total, benign.ops.total);
        rec.macs_delta = d.macs;
        rec.comparisons_delta = d.comparisons;
        rec.perm_applications = d.perm_applications;
        rep.images.push_back(rec);

        if (armed.fired) {
            ++rep.fired_total;
            if (armed.predicted != benign.predicted) ++rep.flip_count_among_fired;
        } else if (opts.measure_time) {
            double tb = std::chrono::duration<double>(t1 - t0).count();
            double ta = std::chrono::duration<double>(t2 - t1).count();
            if (tb > 0.0) overhead_samples.push_back((ta - tb) / tb * 100.0);
        }
        rep.macs_delta_total += d.macs;
        rep.comparisons_delta_total += d.comparisons;
        rep.perm_applications_total += d.perm_applications;
    }

    int batches = (rep.dataset_size + opts.batch_size - 1) / opts.batch_size;
    rep.batch_trigger_counts.assign(static_cast<size_t>(batches), 0);
    for (const ImageRecord& rec : rep.images)
        if (rec.fired) ++rep.batch_trigger_counts[static_cast<size_t>(rec.index / opts.batch_size)];

    rep.flip_rate_among_fired =
        rep.fired_total ? static_cast<double>(rep.flip_count_among_fired) / rep.fired_total
                        : 0.0;
    if (opts.measure_time) rep.median_overhead_pct = median(std::move(overhead_samples));
    return rep;
}

MotivReport run_motiv(int seed_count, std::uint32_t seed_base, double threshold) {
    if (seed_count < 1) throw DomainError("seed count must be positive");
    MotivReport rep;
    rep.threshold = threshold;
    double sum = 0.0;
    for (int i = 0; i < seed_count; ++i) {
        std::uint32_t seed = seed_base + static_cast<std::uint32_t>(i);
        auto [o1, o2] = motivational_pair(seed);
        double frac = changed_fraction(o1, o2, threshold);
        rep.seeds.push_back(seed);
        rep.fractions.push_back(frac);
        sum += frac;
    }
    rep.mean = sum / seed_count;
    return rep;
}

OverheadReport run_overhead(const NetworkSpec& net, const WeightMap& weights,
                            const std::vector<Tensor>& images, const TrojanConfig& cfg,
                            int reps) {
    if (reps < 1) throw DomainError("reps must be positive");
    resolve_against(net, cfg);

    OverheadReport rep;
    rep.dataset_size = static_cast<int>(images.size());
    rep.reps = reps;

    using clock = std::chrono::steady_clock;
    bool have_delta = false;
    std::vector<double> samples;

    for (const Tensor& img : images) {
        double tb = 0.0, ta = 0.0;
        ForwardResult benign;
        ArmedResult armed;
        for (int r = 0; r < reps; ++r) {
            clock::time_point t0 = clock::now();
            benign = forward(net, weights, img);
            clock::time_point t1 = clock::now();
            double s = std::chrono::duration<double>(t1 - t0).count();
            if (r == 0 || s < tb) tb = s;
        }
        for (int r = 0; r < reps; ++r) {
            clock::time_point t0 = clock::now();
            armed = forward_armed(net, weights, img, cfg);
            clock::time_point t1 = clock::now();
            double s = std::chrono::duration<double>(t1 - t0).count();
            if (r == 0 || s < ta) ta = s;
        }

        OpDeltas d = delta(armed.ops.total, benign.ops.total);
        if (armed.fired) {
            ++rep.fired_images;
            rep.fired_perm_applications.push_back(d.perm_applications);
        } else {
            ++rep.unfired_images;
            if (!have_delta) {
                rep.unfired_delta = d;
                have_delta = true;
            } else if (d.macs != rep.unfired_delta.macs ||
                       d.comparisons != rep.unfired_delta.comparisons ||
                       d.perm_applications != rep.unfired_delta.perm_applications) {
                rep.unfired_delta_uniform = false;
            }
            if (tb > 0.0) samples.push_back((ta - tb) / tb * 100.0);
        }
    }
    rep.median_overhead_pct = median(std::move(samples));
    return rep;
}

ProfileSidecar make_sidecar(const ProfileAggregate& agg, const TrojanConfig& cfg) {
    if (agg.values.empty()) throw EmptyProfileError("no profiled values for sidecar");
    ProfileSidecar s;
    s.layer = agg.layer;
    s.element = agg.element;
    s.dataset_size = static_cast<int>(agg.values.size());
    s.target_count = cfg.provenance.target_count;
    s.window = cfg.trigger.interval;
    s.window_count = interval_count(agg.values, cfg.trigger.interval);

    s.min = *std::min_element(agg.values.begin(), agg.values.end());
    s.max = *std::max_element(agg.values.begin(), agg.values.end());
    double sum = 0.0;
    for (float v : agg.values) sum += v;
    s.mean = sum / s.dataset_size;
    double sq = 0.0;
    for (float v : agg.values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / s.dataset_size);

    s.histogram.assign(16, 0);
    double span = static_cast<double>(s.max) - static_cast<double>(s.min);
    for (float v : agg.values) {
        int bin = span > 0.0
                      ? static_cast<int>((static_cast<double>(v) - s.min) / span * 16.0)
                      : 0;
        if (bin > 15) bin = 15;
        ++s.histogram[static_cast<size_t>(bin)];
    }
    return s;
}

namespace {

json record_to_jobj(const ImageRecord& r) {
    return json{{"index", r.index},
                {"fired", r.fired},
                {"benign_top1", r.benign_top1},
                {"armed_top1", r.armed_top1},
                {"logits_linf", static_cast<double>(r.logits_linf)},
                {"layer_changed_fraction", r.layer_changed_fraction},
                {"macs_delta", r.macs_delta},
                {"comparisons_delta", r.comparisons_delta},
                {"perm_applications", r.perm_applications}};
}

} // namespace

std::string eval_report_to_json(const EvalReport& r) {
    json j;
    j["model"] = r.model;
    j["layer"] = r.layer;
    j["change_threshold"] = r.change_threshold;
    j["batch_size"] = r.batch_size;
    j["dataset_size"] = r.dataset_size;
    j["batch_trigger_counts"] = r.batch_trigger_counts;
    j["fired_total"] = r.fired_total;
    j["flip_count_among_fired"] = r.flip_count_among_fired;
    j["flip_rate_among_fired"] = r.flip_rate_among_fired;
    j["macs_delta_total"] = r.macs_delta_total;
    j["comparisons_delta_total"] = r.comparisons_delta_total;
    j["perm_applications_total"] = r.perm_applications_total;
    json imgs = json::array();
    for (const ImageRecord& rec : r.images) imgs.push_back(record_to_jobj(rec));
    j["images"] = imgs;
    if (r.timed) {
        j["median_overhead_pct"] = r.median_overhead_pct;
        j["nondeterministic_fields"] = json::array({"median_overhead_pct"});
    }
    return j.dump(2) + "\n";
}

std::string motiv_report_to_json(const MotivReport& r) {
    json j;
    j["threshold"] = r.threshold;
    j["reference_single_instance"] = r.reference_single_instance;
    j["seeds"] = r.seeds;
    j["fractions"] = r.fractions;
    j["mean"] = r.mean;
    return j.dump(2) + "\n";
}

std::string overhead_report_to_json(const OverheadReport& r) {
    json j;
    j["dataset_size"] = r.dataset_size;
    j["unfired_images"] = r.unfired_images;
    j["fired_images"] = r.fired_images;
    j["unfired_delta_uniform"] = r.unfired_delta_uniform;
    j["unfired_delta"] = json{{"macs", r.unfired_delta.macs},
                              {"comparisons", r.unfired_delta.comparisons},
                              {"perm_applications", r.unfired_delta.perm_applications}};
    j["fired_perm_applications"] = r.fired_perm_applications;
    j["reps"] = r.reps;
    j["median_overhead_pct"] = r.median_overhead_pct;
    j["nondeterministic_fields"] = json::array({"median_overhead_pct"});
    return j.dump(2) + "\n";
}

std::string sidecar_to_json(const ProfileSidecar& s) {
    json j;
    j["layer"] = s.layer;
    j["channel"] = s.element.channel;
    j["n"] = s.element.row;
    j["m"] = s.element.col;
    j["dataset_size"] = s.dataset_size;
    j["target_count"] = s.target_count;
    j["window"] = json{{"a", static_cast<double>(s.window.lo)},
                       {"b", static_cast<double>(s.window.hi)}};
    j["window_count"] = s.window_count;
    j["min"] = static_cast<double>(s.min);
    j["max"] = static_cast<double>(s.max);
    j["mean"] = s.mean;
    j["stddev"] = s.stddev;
    j["histogram"] = s.histogram;
    return j.dump(2) + "\n";
}

} // namespace swf
