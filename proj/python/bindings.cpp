// Python bindings for the core operations: benign/armed inference, trigger
// design, window search and the evaluation experiments. Tensors cross the
// boundary as numpy float32 arrays; trojan configs cross as JSON strings so
// both sides share one schema.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "swf/dataio.hpp"
#include "swf/engine.hpp"
#include "swf/errors.hpp"
#include "swf/eval.hpp"
#include "swf/models.hpp"
#include "swf/network.hpp"
#include "swf/trojan.hpp"

namespace py = pybind11;
using namespace swf;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

NetworkSpec model_by_name(const std::string& name) {
    if (name == "lenet") return lenet();
    if (name == "lenet3d") return lenet3d();
    throw ConfigError("unknown model '" + name + "' (expected lenet or lenet3d)");
}

Tensor to_tensor(const FloatArray& a) {
    std::vector<int> dims;
    dims.reserve(static_cast<size_t>(a.ndim()));
    for (py::ssize_t i = 0; i < a.ndim(); ++i)
        dims.push_back(static_cast<int>(a.shape(i)));
    std::vector<float> values(a.data(), a.data() + a.size());
    return Tensor(std::move(dims), std::move(values));
}

py::array_t<float> to_array(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
    py::array_t<float> a(shape);
    std::copy(t.data().begin(), t.data().end(), a.mutable_data());
    return a;
}

WeightMap to_weights(const py::dict& d) {
    WeightMap w;
    for (auto item : d)
        w.emplace(py::cast<std::string>(item.first),
                  to_tensor(py::cast<FloatArray>(item.second)));
    return w;
}

py::dict from_weights(const WeightMap& w) {
    py::dict d;
    for (const auto& [k, v] : w) d[py::str(k)] = to_array(v);
    return d;
}

std::vector<Tensor> to_images(const py::list& images) {
    std::vector<Tensor> out;
    out.reserve(images.size());
    for (auto item : images) out.push_back(to_tensor(py::cast<FloatArray>(item)));
    return out;
}

py::dict counts_dict(const OpCounts& c) {
    py::dict d;
    d["macs"] = c.macs;
    d["comparisons"] = c.comparisons;
    d["perm_applications"] = c.perm_applications;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "trojanable CNN inference engine and attack-design toolkit";

    py::register_exception<Error>(m, "SwfError");

    m.def("models", [] { return std::vector<std::string>{"lenet", "lenet3d"}; },
          "names of the built-in networks");

    m.def(
        "layer_output_dims",
        [](const std::string& model, const std::string& layer) {
            return layer_output_dims(model_by_name(model), layer);
        },
        py::arg("model"), py::arg("layer"));

    m.def(
        "untrusted_layers",
        [](const std::string& model) {
            std::vector<std::string> out;
            for (const LayerSpec& l : model_by_name(model).layers)
                if (l.trust == Trust::Untrusted) out.push_back(l.name);
            return out;
        },
        py::arg("model"));

    m.def(
        "scenario_layer",
        [](const std::string& sn) { return scenario_layer(scenario_from_string(sn)); },
        py::arg("scenario"), "host layer of Sn1..Sn5");

    m.def(
        "fixture_weights",
        [](const std::string& model, std::uint32_t seed) {
            return from_weights(fixture_weights(model_by_name(model), seed));
        },
        py::arg("model"), py::arg("seed"));

    m.def(
        "fixture_images",
        [](const std::string& model, int count, std::uint32_t seed) {
            py::list out;
            for (const Tensor& t : fixture_images(model_by_name(model), count, seed))
                out.append(to_array(t));
            return out;
        },
        py::arg("model"), py::arg("count"), py::arg("seed"));

    m.def(
        "forward",
        [](const std::string& model, const py::dict& weights, const FloatArray& image,
           const std::vector<std::string>& tap_layers) {
            ForwardResult r = forward(model_by_name(model), to_weights(weights),
                                      to_tensor(image), tap_layers);
            py::dict out;
            out["logits"] = to_array(r.logits);
            out["predicted"] = r.predicted;
            out["ops"] = counts_dict(r.ops.total);
            py::dict taps;
            for (const auto& [k, v] : r.taps) taps[py::str(k)] = to_array(v);
            out["taps"] = taps;
            return out;
        },
        py::arg("model"), py::arg("weights"), py::arg("image"),
        py::arg("tap_layers") = std::vector<std::string>{},
        "benign inference; returns logits, predicted class, op counts and taps");

    m.def(
        "forward_armed",
        [](const std::string& model, const py::dict& weights, const FloatArray& image,
           const std::string& config_json, const std::vector<std::string>& tap_layers) {
            ArmedResult r =
                forward_armed(model_by_name(model), to_weights(weights),
                              to_tensor(image), trojan_config_from_json(config_json),
                              tap_layers);
            py::dict out;
            out["logits"] = to_array(r.logits);
            out["predicted"] = r.predicted;
            out["fired"] = r.fired;
            out["monitored_value"] = r.monitored_value;
            out["ops"] = counts_dict(r.ops.total);
            py::dict taps;
            for (const auto& [k, v] : r.taps) taps[py::str(k)] = to_array(v);
            out["taps"] = taps;
            return out;
        },
        py::arg("model"), py::arg("weights"), py::arg("image"), py::arg("config"),
        py::arg("tap_layers") = std::vector<std::string>{},
        "inference with the trojan armed; the payload only runs when the "
        "monitored element lands inside the configured window");

    m.def(
        "design_trigger",
        [](const std::string& model, const py::dict& weights, const py::list& images,
           const std::string& layer, int target_count, std::uint32_t seed,
           const std::string& payload, int max_tries) {
            DesignOptions opt;
            opt.crit.target_count = target_count;
            opt.seed = seed;
            opt.payload = payload_kind_from_string(payload);
            opt.max_tries = max_tries;
            TrojanConfig cfg = design_trigger(model_by_name(model), to_weights(weights),
                                              to_images(images), layer, opt);
            return trojan_config_to_json(cfg);
        },
        py::arg("model"), py::arg("weights"), py::arg("images"), py::arg("layer"),
        py::arg("target_count"), py::arg("seed") = 0,
        py::arg("payload") = "weight_shuffle", py::arg("max_tries") = 64,
        "offline trigger design; returns the trojan config as JSON");

    m.def(
        "select_rov",
        [](const std::vector<float>& samples, int target_count) {
            ValueInterval w = select_rov(samples, target_count);
            return py::make_tuple(w.lo, w.hi);
        },
        py::arg("samples"), py::arg("target_count"),
        "sparsest window holding exactly target_count of the samples");

    m.def("default_order_factor", &default_order_factor, py::arg("channels"));

    m.def(
        "changed_fraction",
        [](const FloatArray& a, const FloatArray& b, double threshold) {
            return changed_fraction(to_tensor(a), to_tensor(b), threshold);
        },
        py::arg("a"), py::arg("b"), py::arg("threshold") = 0.95);

    m.def(
        "motivational_pair",
        [](std::uint32_t seed) {
            auto [o1, o2] = motivational_pair(seed);
            return py::make_tuple(to_array(o1), to_array(o2));
        },
        py::arg("seed"));

    m.def(
        "run_motiv",
        [](int seed_count, std::uint32_t seed_base, double threshold) {
            MotivReport r = run_motiv(seed_count, seed_base, threshold);
            py::dict out;
            out["mean"] = r.mean;
            out["fractions"] = r.fractions;
            out["reference_single_instance"] = r.reference_single_instance;
            return out;
        },
        py::arg("seed_count") = 20, py::arg("seed_base") = 0,
        py::arg("threshold") = 0.95);

    m.def(
        "run_eval",
        [](const std::string& model, const py::dict& weights, const py::list& images,
           const std::string& config_json, int batch_size, double threshold) {
            EvalOptions opts;
            opts.batch_size = batch_size;
            opts.change_threshold = threshold;
            EvalReport r = run_eval(model_by_name(model), to_weights(weights),
                                    to_images(images),
                                    trojan_config_from_json(config_json), opts);
            return eval_report_to_json(r);
        },
        py::arg("model"), py::arg("weights"), py::arg("images"), py::arg("config"),
        py::arg("batch_size") = 200, py::arg("threshold") = 0.95,
        "benign-vs-armed comparison over a dataset; returns the report as JSON");
}
