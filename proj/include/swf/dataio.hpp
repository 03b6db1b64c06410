#pragma once

#include <string>
#include <vector>

#include "swf/network.hpp"
#include "swf/trojan.hpp"

namespace swf {

struct Dataset {
    std::vector<Tensor> images;
    std::vector<int> labels;

    int size() const { return static_cast<int>(images.size()); }
};

/// IDX pair (big-endian, magics 0x00000803 / 0x00000801). 28x28 pixel
/// bytes are scaled by 1/255 and zero-padded to 1x32x32.
Dataset read_mnist_idx(const std::string& images_path, const std::string& labels_path);

/// CIFAR-10 binary: 3073-byte records, 1 label byte + R/G/B planes,
/// scaled by 1/255 into 3x32x32. An empty file yields an empty dataset.
Dataset read_cifar10_bin(const std::string& path);

/// "SWF1" container: per record a u16-LE name length, UTF-8 name, u8 rank,
/// u32-LE extents, then float32-LE values. Round-trips bit-exactly.
void write_weights(const std::string& path, const WeightMap& weights);
WeightMap read_weights(const std::string& path);
std::vector<unsigned char> encode_weights(const WeightMap& weights);

/// JSON text with exactly the keys layer, channel, n, m, a, b,
/// payload_kind, f, provenance{P,M}; unknown or missing keys are rejected.
void write_trojan_config(const std::string& path, const TrojanConfig& cfg);
TrojanConfig read_trojan_config(const std::string& path);
std::string trojan_config_to_json(const TrojanConfig& cfg);
TrojanConfig trojan_config_from_json(const std::string& text);

/// Single-file hand-off produced by `swf arm`: "SWB1", u32-LE header
/// length, JSON header {model, trojan}, then the full SWF1 stream.
struct Bundle {
    std::string model;
    TrojanConfig trojan;
    WeightMap weights;
};

void write_bundle(const std::string& path, const Bundle& b);
Bundle read_bundle(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace swf
