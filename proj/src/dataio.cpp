#include "swf/dataio.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <set>

#include "json.hpp"
#include "swf/errors.hpp"

namespace swf {

namespace {

using nlohmann::json;

std::vector<unsigned char> read_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    f.seekg(0, std::ios::end);
    std::streamoff len = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<size_t>(len));
    if (len > 0) f.read(reinterpret_cast<char*>(buf.data()), len);
    if (!f) throw IoError("cannot read '" + path + "'");
    return buf;
}

void write_binary_file(const std::string& path, const std::vector<unsigned char>& buf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("cannot write '" + path + "'");
}

struct Cursor {
    const std::vector<unsigned char>& buf;
    size_t pos = 0;
    std::string name;

    void need(size_t n) const {
        if (n > buf.size() - pos)
            throw IoError(name + ": truncated at offset " + std::to_string(pos) + " (need " +
                          std::to_string(n) + " bytes, " + std::to_string(buf.size() - pos) +
                          " left)");
    }
    bool done() const { return pos >= buf.size(); }
    std::uint8_t u8() {
        need(1);
        return buf[pos++];
    }
    std::uint16_t u16le() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint32_t u32le() {
        need(4);
        std::uint32_t v = static_cast<std::uint32_t>(buf[pos]) |
                          (static_cast<std::uint32_t>(buf[pos + 1]) << 8) |
                          (static_cast<std::uint32_t>(buf[pos + 2]) << 16) |
                          (static_cast<std::uint32_t>(buf[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    std::uint32_t u32be() {
        need(4);
        std::uint32_t v = (static_cast<std::uint32_t>(buf[pos]) << 24) |
                          (static_cast<std::uint32_t>(buf[pos + 1]) << 16) |
                          (static_cast<std::uint32_t>(buf[pos + 2]) << 8) |
                          static_cast<std::uint32_t>(buf[pos + 3]);
        pos += 4;
        return v;
    }
    float f32le() { return std::bit_cast<float>(u32le()); }
    std::string str(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
        pos += n;
        return s;
    }
};

void put_u8(std::vector<unsigned char>& b, std::uint8_t v) { b.push_back(v); }
void put_u16le(std::vector<unsigned char>& b, std::uint16_t v) {
    b.push_back(static_cast<unsigned char>(v & 0xff));
    b.push_back(static_cast<unsigned char>(v >> 8));
}
void put_u32le(std::vector<unsigned char>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}
void put_f32le(std::vector<unsigned char>& b, float v) {
    put_u32le(b, std::bit_cast<std::uint32_t>(v));
}
void put_str(std::vector<unsigned char>& b, const std::string& s) {
    b.insert(b.end(), s.begin(), s.end());
}

WeightMap decode_weights(Cursor& c) {
    if (c.str(4) != "SWF1") throw FormatError(c.name + ": bad weight container magic");
    WeightMap weights;
    while (!c.done()) {
        size_t name_len = c.u16le();
        std::string name = c.str(name_len);
        if (name.empty()) throw FormatError(c.name + ": empty tensor name");
        int rank = c.u8();
        if (rank < 1) throw FormatError(c.name + ": zero-rank tensor '" + name + "'");
        std::vector<int> dims(static_cast<size_t>(rank));
        std::uint64_t count = 1;
        for (int i = 0; i < rank; ++i) {
            std::uint32_t d = c.u32le();
            if (d == 0) throw FormatError(c.name + ": zero extent in tensor '" + name + "'");
            count *= d;
            if (count > 100000000u)
                throw FormatError(c.name + ": tensor '" + name + "' is implausibly large");
            dims[static_cast<size_t>(i)] = static_cast<int>(d);
        }
        c.need(count * 4);
        std::vector<float> values(static_cast<size_t>(count));
        for (std::uint64_t i = 0; i < count; ++i) values[static_cast<size_t>(i)] = c.f32le();
        if (weights.count(name))
            throw ConfigError(c.name + ": duplicate tensor name '" + name + "'");
        weights.emplace(std::move(name), Tensor(dims, std::move(values)));
    }
    return weights;
}

TrojanConfig trojan_config_from_jobj(const json& j, const std::string& where) {
    if (!j.is_object()) throw FormatError(where + ": not a JSON object");
    static const std::set<std::string> allowed = {"layer", "channel", "n", "m", "a",
                                                  "b", "payload_kind", "f", "provenance"};
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw FormatError(where + ": unknown key '" + item.key() + "'");
    for (const std::string& k : allowed)
        if (!j.contains(k)) throw FormatError(where + ": missing key '" + k + "'");

    auto get_int = [&](const json& obj, const char* key) {
        const json& v = obj.at(key);
        if (!v.is_number_integer())
            throw FormatError(where + ": key '" + key + "' must be an integer");
        return v.get<int>();
    };
    auto get_real = [&](const char* key) {
        const json& v = j.at(key);
        if (!v.is_number()) throw FormatError(where + ": key '" + key + "' must be a number");
        return static_cast<float>(v.get<double>());
    };

    TrojanConfig cfg;
    if (!j.at("layer").is_string()) throw FormatError(where + ": key 'layer' must be a string");
    cfg.trigger.layer = j.at("layer").get<std::string>();
    cfg.trigger.element.channel = get_int(j, "channel");
    cfg.trigger.element.row = get_int(j, "n");
    cfg.trigger.element.col = get_int(j, "m");
    cfg.trigger.interval.lo = get_real("a");
    cfg.trigger.interval.hi = get_real("b");
    if (!j.at("payload_kind").is_string())
        throw FormatError(where + ": key 'payload_kind' must be a string");
    cfg.payload.kind = payload_kind_from_string(j.at("payload_kind").get<std::string>());
    cfg.payload.order_factor = get_int(j, "f");

    const json& p = j.at("provenance");
    if (!p.is_object()) throw FormatError(where + ": provenance must be an object");
    for (const auto& item : p.items())
        if (item.key() != "P" && item.key() != "M")
            throw FormatError(where + ": unknown provenance key '" + item.key() + "'");
    if (!p.contains("P") || !p.contains("M"))
        throw FormatError(where + ": provenance needs keys P and M");
    cfg.provenance.dataset_size = get_int(p, "P");
    cfg.provenance.target_count = get_int(p, "M");
    return cfg;
}

json trojan_config_to_jobj(const TrojanConfig& cfg) {
    json j;
    j["layer"] = cfg.trigger.layer;
    j["channel"] = cfg.trigger.element.channel;
    j["n"] = cfg.trigger.element.row;
    j["m"] = cfg.trigger.element.col;
    j["a"] = static_cast<double>(cfg.trigger.interval.lo);
    j["b"] = static_cast<double>(cfg.trigger.interval.hi);
    j["payload_kind"] = to_string(cfg.payload.kind);
    j["f"] = cfg.payload.order_factor;
    j["provenance"] = json{{"P", cfg.provenance.dataset_size},
                           {"M", cfg.provenance.target_count}};
    return j;
}

} // namespace

Dataset read_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::vector<unsigned char> ibuf = read_binary_file(images_path);
    Cursor ic{ibuf, 0, images_path};
    if (ic.u32be() != 0x00000803u) throw FormatError(images_path + ": bad image magic");
    std::uint32_t count = ic.u32be();
    std::uint32_t rows = ic.u32be();
    std::uint32_t cols = ic.u32be();
    if (rows != 28 || cols != 28)
        throw FormatError(images_path + ": expected 28x28 images, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));

    std::vector<unsigned char> lbuf = read_binary_file(labels_path);
    Cursor lc{lbuf, 0, labels_path};
    if (lc.u32be() != 0x00000801u) throw FormatError(labels_path + ": bad label magic");
    std::uint32_t lcount = lc.u32be();
    if (lcount != count)
        throw FormatError(labels_path + ": " + std::to_string(lcount) + " labels for " +
                          std::to_string(count) + " images");

    Dataset ds;
    ds.images.reserve(count);
    ds.labels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ic.need(784);
        Tensor img({1, 32, 32});
        float* d = img.data().data();
        for (int r = 0; r < 28; ++r)
            for (int col = 0; col < 28; ++col)
                d[(r + 2) * 32 + (col + 2)] =
                    static_cast<float>(ibuf[ic.pos + static_cast<size_t>(r) * 28 + col]) /
                    255.0f;
        ic.pos += 784;
        int label = lc.u8();
        if (label > 9)
            throw FormatError(labels_path + ": label " + std::to_string(label) +
                              " out of range at image " + std::to_string(i));
        ds.images.push_back(std::move(img));
        ds.labels.push_back(label);
    }
    return ds;
}

Dataset read_cifar10_bin(const std::string& path) {
    std::vector<unsigned char> buf = read_binary_file(path);
    if (buf.size() % 3073 != 0)
        throw FormatError(path + ": size " + std::to_string(buf.size()) +
                          " is not a multiple of 3073");
    size_t count = buf.size() / 3073;
    Dataset ds;
    ds.images.reserve(count);
    ds.labels.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        size_t base = i * 3073;
        int label = buf[base];
        if (label > 9)
            throw FormatError(path + ": label " + std::to_string(label) +
                              " out of range in record " + std::to_string(i));
        Tensor img({3, 32, 32});
        float* d = img.data().data();
        for (int p = 0; p < 3072; ++p)
            d[p] = static_cast<float>(buf[base + 1 + static_cast<size_t>(p)]) / 255.0f;
        ds.images.push_back(std::move(img));
        ds.labels.push_back(label);
    }
    return ds;
}

std::vector<unsigned char> encode_weights(const WeightMap& weights) {
    std::vector<unsigned char> out;
    put_str(out, "SWF1");
    for (const auto& [name, tensor] : weights) {
        if (name.empty()) throw ConfigError("weight tensor with empty name");
        if (name.size() > 65535) throw ConfigError("tensor name too long: '" + name + "'");
        if (tensor.rank() > 255) throw ConfigError("tensor rank too large");
        put_u16le(out, static_cast<std::uint16_t>(name.size()));
        put_str(out, name);
        put_u8(out, static_cast<std::uint8_t>(tensor.rank()));
        for (int d : tensor.dims()) put_u32le(out, static_cast<std::uint32_t>(d));
        for (float v : tensor.data()) put_f32le(out, v);
    }
    return out;
}

void write_weights(const std::string& path, const WeightMap& weights) {
    write_binary_file(path, encode_weights(weights));
}

WeightMap read_weights(const std::string& path) {
    std::vector<unsigned char> buf = read_binary_file(path);
    Cursor c{buf, 0, path};
    return decode_weights(c);
}

std::string trojan_config_to_json(const TrojanConfig& cfg) {
    return trojan_config_to_jobj(cfg).dump(2) + "\n";
}

TrojanConfig trojan_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("trojan config: ") + e.what());
    }
    return trojan_config_from_jobj(j, "trojan config");
}

void write_trojan_config(const std::string& path, const TrojanConfig& cfg) {
    write_text_file(path, trojan_config_to_json(cfg));
}

TrojanConfig read_trojan_config(const std::string& path) {
    return trojan_config_from_json(read_text_file(path));
}

void write_bundle(const std::string& path, const Bundle& b) {
    if (b.model.empty()) throw ConfigError("bundle has no model name");
    json header;
    header["model"] = b.model;
    header["trojan"] = trojan_config_to_jobj(b.trojan);
    std::string htext = header.dump();

    std::vector<unsigned char> out;
    put_str(out, "SWB1");
    put_u32le(out, static_cast<std::uint32_t>(htext.size()));
    put_str(out, htext);
    std::vector<unsigned char> wbuf = encode_weights(b.weights);
    out.insert(out.end(), wbuf.begin(), wbuf.end());
    write_binary_file(path, out);
}

Bundle read_bundle(const std::string& path) {
    std::vector<unsigned char> buf = read_binary_file(path);
    Cursor c{buf, 0, path};
    if (c.str(4) != "SWB1") throw FormatError(path + ": bad bundle magic");
    std::uint32_t hlen = c.u32le();
    std::string htext = c.str(hlen);

    json header;
    try {
        header = json::parse(htext);
    } catch (const json::exception& e) {
        throw FormatError(path + ": bundle header: " + e.what());
    }
    if (!header.is_object()) throw FormatError(path + ": bundle header is not an object");
    for (const auto& item : header.items())
        if (item.key() != "model" && item.key() != "trojan")
            throw FormatError(path + ": unknown bundle header key '" + item.key() + "'");
    if (!header.contains("model") || !header.at("model").is_string())
        throw FormatError(path + ": bundle header needs a model string");
    if (!header.contains("trojan"))
        throw FormatError(path + ": bundle header needs a trojan object");

    Bundle b;
    b.model = header.at("model").get<std::string>();
    if (b.model.empty()) throw FormatError(path + ": empty model name");
    b.trojan = trojan_config_from_jobj(header.at("trojan"), path + ": trojan");
    b.weights = decode_weights(c);
    return b;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("cannot read '" + path + "'");
    return text;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("cannot write '" + path + "'");
}

} // namespace swf
