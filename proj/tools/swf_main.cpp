#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swf/dataio.hpp"
#include "swf/engine.hpp"
#include "swf/errors.hpp"
#include "swf/eval.hpp"
#include "swf/models.hpp"
#include "swf/trojan.hpp"

namespace {

// Bad flag combinations discovered after parsing; exit code 2 like CLI11's
// own parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

swf::NetworkSpec model_by_name(const std::string& name) {
    if (name == "lenet") return swf::lenet();
    if (name == "lenet3d") return swf::lenet3d();
    throw swf::ConfigError("unknown model '" + name + "'");
}

struct Args {
    std::string model = "lenet";
    std::string weights;
    unsigned gen_weights_seed = 0;
    std::string dataset;
    int fixture = 0;
    unsigned fixture_seed = 0;
    std::string layer;
    double rate = 0.03;
    int count = 0;
    unsigned seed = 0;
    int max_tries = 64;
    int batch = 200;
    double threshold = 0.95;
    int reps = 3;
    int seeds = 20;
    unsigned seed_base = 0;
    bool timing = false;
    std::string out;
    std::string sidecar;
    std::string config;
    std::string bundle;
};

void add_weight_flags(CLI::App* cmd, Args& a) {
    cmd->add_option("--weights", a.weights, "SWF1 weight container path");
    cmd->add_option("--gen-weights-seed", a.gen_weights_seed,
                    "generate uniform fixture weights from this seed");
}

void add_dataset_flags(CLI::App* cmd, Args& a) {
    cmd->add_option("--dataset", a.dataset,
                    "IDX pair 'images,labels' or a CIFAR-10 .bin path");
    cmd->add_option("--fixture", a.fixture, "use N generated fixture images instead");
    cmd->add_option("--fixture-seed", a.fixture_seed, "seed for --fixture images");
}

swf::WeightMap load_weights(const Args& a, const CLI::App* cmd, const swf::NetworkSpec& net) {
    bool have_file = cmd->count("--weights") > 0;
    bool have_gen = cmd->count("--gen-weights-seed") > 0;
    if (have_file == have_gen)
        throw UsageError("need exactly one of --weights or --gen-weights-seed");
    swf::WeightMap w =
        have_file ? swf::read_weights(a.weights) : swf::fixture_weights(net, a.gen_weights_seed);
    for (const swf::LayerSpec& l : net.layers) {
        if (l.kind != swf::LayerKind::Conv && l.kind != swf::LayerKind::FullyConnected)
            continue;
        if (!w.count(l.name + ".weight") || !w.count(l.name + ".bias"))
            throw swf::ConfigError("weights for layer '" + l.name + "' are missing");
    }
    return w;
}

std::vector<swf::Tensor> load_images(const Args& a, const swf::NetworkSpec& net) {
    if (!a.dataset.empty() && a.fixture > 0)
        throw UsageError("--dataset and --fixture are mutually exclusive");
    if (a.dataset.empty() && a.fixture <= 0)
        throw UsageError("need --dataset or --fixture N");

    std::vector<swf::Tensor> images;
    if (a.fixture > 0) {
        images = swf::fixture_images(net, a.fixture, a.fixture_seed);
    } else {
        size_t comma = a.dataset.find(',');
        swf::Dataset ds =
            comma == std::string::npos
                ? swf::read_cifar10_bin(a.dataset)
                : swf::read_mnist_idx(a.dataset.substr(0, comma), a.dataset.substr(comma + 1));
        images = std::move(ds.images);
    }
    for (const swf::Tensor& img : images)
        if (img.dims() != net.input_dims)
            throw swf::ConfigError("dataset images do not match the model input shape");
    return images;
}

swf::PayloadKind payload_for_layer(const swf::NetworkSpec& net, const std::string& layer) {
    const swf::LayerSpec& l = net.layers[static_cast<size_t>(swf::find_layer(net, layer))];
    if (l.kind == swf::LayerKind::Conv) return swf::PayloadKind::WeightShuffle;
    if (l.kind == swf::LayerKind::MaxPool) return swf::PayloadKind::OutputChannelShuffle;
    throw swf::UnsupportedPayloadError("layer '" + layer + "' cannot carry a shuffle payload");
}

int run_profile(const Args& a, const CLI::App* cmd) {
    swf::NetworkSpec net = model_by_name(a.model);
    swf::WeightMap weights = load_weights(a, cmd, net);
    std::vector<swf::Tensor> images = load_images(a, net);
    if (a.layer.empty()) throw UsageError("profile needs --layer");
    if (a.out.empty()) throw UsageError("profile needs --out");
    if (cmd->count("--rate") && cmd->count("--count"))
        throw UsageError("--rate and --count are mutually exclusive");

    int p = static_cast<int>(images.size());
    swf::RoVCriterion crit;
    if (cmd->count("--count")) {
        if (a.count < 1 || a.count > p)
            throw UsageError("--count must satisfy 1 <= M <= " + std::to_string(p));
        crit.target_count = a.count;
    } else {
        if (!(a.rate > 0.0) || a.rate > 1.0) throw UsageError("--rate must be in (0, 1]");
        crit = swf::RoVCriterion::from_rate(a.rate, p);
    }

    swf::DesignOptions opts;
    opts.crit = crit;
    opts.max_tries = a.max_tries;
    opts.seed = a.seed;
    opts.payload = payload_for_layer(net, a.layer);
    swf::TrojanConfig cfg = swf::design_trigger(net, weights, images, a.layer, opts);

    swf::write_trojan_config(a.out, cfg);
    if (!a.sidecar.empty()) {
        swf::ProfileAggregate agg =
            swf::profile_index(net, weights, images, a.layer, cfg.trigger.element);
        swf::write_text_file(a.sidecar, swf::sidecar_to_json(swf::make_sidecar(agg, cfg)));
    }

    std::cout << "profiled " << p << " images on " << a.model << "/" << a.layer << "\n"
              << "monitored element: channel " << cfg.trigger.element.channel << ", n "
              << cfg.trigger.element.row << ", m " << cfg.trigger.element.col << "\n"
              << "window: [" << cfg.trigger.interval.lo << ", " << cfg.trigger.interval.hi
              << "]  count " << cfg.provenance.target_count << "/" << p << " (rate "
              << swf::expected_rate(cfg) << ")\n"
              << "payload: " << swf::to_string(cfg.payload.kind) << " f="
              << cfg.payload.order_factor << "\n"
              << "wrote " << a.out << "\n";
    return 0;
}

int run_arm(const Args& a, const CLI::App* cmd) {
    if (a.config.empty()) throw UsageError("arm needs --config");
    if (a.out.empty()) throw UsageError("arm needs --out");
    swf::NetworkSpec net = model_by_name(a.model);
    swf::WeightMap weights = load_weights(a, cmd, net);
    swf::TrojanConfig cfg = swf::read_trojan_config(a.config);
    swf::resolve_against(net, cfg);

    swf::Bundle b{a.model, cfg, std::move(weights)};
    swf::write_bundle(a.out, b);
    std::cout << "armed " << a.model << "/" << cfg.trigger.layer << " ("
              << swf::to_string(cfg.payload.kind) << " f=" << cfg.payload.order_factor
              << (cfg.trigger.disarmed() ? ", disarmed window" : "") << ") -> " << a.out
              << "\n";
    return 0;
}

int run_infer(const Args& a) {
    if (a.bundle.empty()) throw UsageError("infer needs --bundle");
    swf::Bundle b = swf::read_bundle(a.bundle);
    swf::NetworkSpec net = model_by_name(b.model);
    std::vector<swf::Tensor> images = load_images(a, net);

    const bool monitor_only = b.trojan.payload.kind == swf::PayloadKind::None;
    int fired = 0;
    for (size_t i = 0; i < images.size(); ++i) {
        if (monitor_only) {
            swf::ForwardResult r = swf::forward(net, b.weights, images[i]);
            std::cout << i << " top1=" << r.predicted << " fired=0 (no payload)\n";
        } else {
            swf::ArmedResult r = swf::forward_armed(net, b.weights, images[i], b.trojan);
            if (r.fired) ++fired;
            std::cout << i << " top1=" << r.predicted << " fired=" << (r.fired ? 1 : 0)
                      << " monitored=" << r.monitored_value << "\n";
        }
    }
    std::cout << "fired " << fired << "/" << images.size() << "\n";
    return 0;
}

int run_eval_cmd(const Args& a) {
    if (a.bundle.empty()) throw UsageError("eval needs --bundle");
    if (a.out.empty()) throw UsageError("eval needs --out");
    if (a.batch < 1) throw UsageError("--batch must be positive");
    if (a.threshold < 0.0) throw UsageError("--threshold must be non-negative");
    swf::Bundle b = swf::read_bundle(a.bundle);
    swf::NetworkSpec net = model_by_name(b.model);
    std::vector<swf::Tensor> images = load_images(a, net);

    swf::EvalOptions opts;
    opts.batch_size = a.batch;
    opts.change_threshold = a.threshold;
    opts.measure_time = a.timing;
    swf::EvalReport rep = swf::run_eval(net, b.weights, images, b.trojan, opts);
    swf::write_text_file(a.out, swf::eval_report_to_json(rep));

    std::cout << "evaluated " << rep.dataset_size << " images on " << rep.model << "/"
              << rep.layer << "\n"
              << "fired " << rep.fired_total << " (batch counts:";
    for (int c : rep.batch_trigger_counts) std::cout << " " << c;
    std::cout << ")\nflip rate among fired: " << rep.flip_rate_among_fired << "\n"
              << "op deltas: macs " << rep.macs_delta_total << ", comparisons "
              << rep.comparisons_delta_total << ", perm " << rep.perm_applications_total
              << "\n";
    if (rep.timed)
        std::cout << "median unfired overhead: " << rep.median_overhead_pct
                  << "% (wall time, non-deterministic)\n";
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

int run_motiv_cmd(const Args& a) {
    if (a.seeds < 1) throw UsageError("--seeds must be positive");
    if (a.threshold < 0.0) throw UsageError("--threshold must be non-negative");
    swf::MotivReport rep = swf::run_motiv(a.seeds, a.seed_base, a.threshold);
    for (size_t i = 0; i < rep.seeds.size(); ++i)
        std::cout << "seed " << rep.seeds[i] << ": changed fraction " << rep.fractions[i]
                  << "\n";
    std::cout << "mean over " << a.seeds << " seeds at threshold " << rep.threshold << ": "
              << rep.mean << "\n"
              << "reference single-instance fraction: " << rep.reference_single_instance
              << "\n";
    if (!a.out.empty()) {
        swf::write_text_file(a.out, swf::motiv_report_to_json(rep));
        std::cout << "wrote " << a.out << "\n";
    }
    return 0;
}

int run_overhead_cmd(const Args& a) {
    if (a.bundle.empty()) throw UsageError("overhead needs --bundle");
    if (a.reps < 1) throw UsageError("--reps must be positive");
    swf::Bundle b = swf::read_bundle(a.bundle);
    swf::NetworkSpec net = model_by_name(b.model);
    std::vector<swf::Tensor> images = load_images(a, net);

    swf::OverheadReport rep = swf::run_overhead(net, b.weights, images, b.trojan, a.reps);
    if (!a.out.empty()) swf::write_text_file(a.out, swf::overhead_report_to_json(rep));

    std::cout << "timed " << rep.dataset_size << " images (" << rep.unfired_images
              << " unfired, " << rep.fired_images << " fired, min of " << rep.reps
              << " reps)\n"
              << "unfired op delta: macs " << rep.unfired_delta.macs << ", comparisons "
              << rep.unfired_delta.comparisons << ", perm "
              << rep.unfired_delta.perm_applications
              << (rep.unfired_delta_uniform ? " (uniform across images)" : " (NOT uniform)")
              << "\n"
              << "median unfired overhead: " << rep.median_overhead_pct
              << "% (wall time, non-deterministic)\n";
    if (!a.out.empty()) std::cout << "wrote " << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trojanable CNN inference engine and attack-design toolkit"};
    app.require_subcommand(1);
    Args a;

    CLI::App* profile = app.add_subcommand(
        "profile", "design a trigger from a layer's value statistics");
    profile->add_option("--model", a.model, "lenet or lenet3d")
        ->check(CLI::IsMember({"lenet", "lenet3d"}));
    add_weight_flags(profile, a);
    add_dataset_flags(profile, a);
    profile->add_option("--layer", a.layer, "layer to monitor");
    profile->add_option("--rate", a.rate, "target trigger rate (default 0.03)");
    profile->add_option("--count", a.count, "exact target count M");
    profile->add_option("--seed", a.seed, "candidate-element search seed");
    profile->add_option("--max-tries", a.max_tries, "candidate elements to try");
    profile->add_option("--out", a.out, "trojan config output path");
    profile->add_option("--sidecar", a.sidecar, "value-statistics sidecar output path");

    CLI::App* arm = app.add_subcommand("arm", "bundle model, weights and trojan config");
    arm->add_option("--model", a.model, "lenet or lenet3d")
        ->check(CLI::IsMember({"lenet", "lenet3d"}));
    add_weight_flags(arm, a);
    arm->add_option("--config", a.config, "trojan config path");
    arm->add_option("--out", a.out, "bundle output path");

    CLI::App* infer = app.add_subcommand("infer", "run armed inference over a dataset");
    infer->add_option("--bundle", a.bundle, "armed bundle path");
    add_dataset_flags(infer, a);

    CLI::App* eval = app.add_subcommand("eval", "benign-vs-armed divergence report");
    eval->add_option("--bundle", a.bundle, "armed bundle path");
    add_dataset_flags(eval, a);
    eval->add_option("--batch", a.batch, "trigger-count batch size (default 200)");
    eval->add_option("--threshold", a.threshold, "relative-change threshold (default 0.95)");
    eval->add_flag("--timing", a.timing, "add wall-time overhead (non-deterministic)");
    eval->add_option("--out", a.out, "report output path");

    CLI::App* motiv = app.add_subcommand(
        "motiv", "weight-shuffle divergence experiment over seeds");
    motiv->add_option("--seeds", a.seeds, "number of seeds (default 20)");
    motiv->add_option("--seed-base", a.seed_base, "first seed (default 0)");
    motiv->add_option("--threshold", a.threshold, "relative-change threshold (default 0.95)");
    motiv->add_option("--out", a.out, "report output path");

    CLI::App* overhead = app.add_subcommand(
        "overhead", "armed-vs-benign op-count and wall-time overhead");
    overhead->add_option("--bundle", a.bundle, "armed bundle path");
    add_dataset_flags(overhead, a);
    overhead->add_option("--reps", a.reps, "timing repetitions per pass (default 3)");
    overhead->add_option("--out", a.out, "report output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(profile)) return run_profile(a, profile);
        if (app.got_subcommand(arm)) return run_arm(a, arm);
        if (app.got_subcommand(infer)) return run_infer(a);
        if (app.got_subcommand(eval)) return run_eval_cmd(a);
        if (app.got_subcommand(motiv)) return run_motiv_cmd(a);
        if (app.got_subcommand(overhead)) return run_overhead_cmd(a);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const swf::DesignFailedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const swf::NoRovError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const swf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
