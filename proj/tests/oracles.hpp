#pragma once

// Reference implementations written as the plainest possible loops,
// independent of the engine's range/permutation machinery. Unit and
// acceptance tests treat these as ground truth.

#include <algorithm>
#include <optional>
#include <vector>

#include "swf/tensor.hpp"
#include "swf/trojan.hpp"

namespace oracles {

// Quadruple-loop valid convolution, stride 1: for each output element,
// bias first, then accumulate ascending (channel, kernel-row, kernel-col)
// in 32-bit floats. Must match the engine bit-exactly.
inline swf::Tensor conv(const swf::Tensor& in, const swf::Tensor& w, const swf::Tensor& b) {
    const int C = in.dims()[0], H = in.dims()[1], W = in.dims()[2];
    const int O = w.dims()[0], K = w.dims()[2];
    const int OH = H - K + 1, OW = W - K + 1;
    swf::Tensor out({O, OH, OW});
    for (int o = 0; o < O; ++o)
        for (int y = 0; y < OH; ++y)
            for (int x = 0; x < OW; ++x) {
                float acc = b.data()[static_cast<size_t>(o)];
                for (int c = 0; c < C; ++c)
                    for (int u = 0; u < K; ++u)
                        for (int v = 0; v < K; ++v)
                            acc += in.at3(c, y + u, x + v) * w.data()[static_cast<size_t>(
                                       ((o * C + c) * K + u) * K + v)];
                out.data()[static_cast<size_t>((o * OH + y) * OW + x)] = acc;
            }
    return out;
}

inline swf::Tensor maxpool(const swf::Tensor& in) {
    const int C = in.dims()[0], H = in.dims()[1], W = in.dims()[2];
    swf::Tensor out({C, H / 2, W / 2});
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < H / 2; ++y)
            for (int x = 0; x < W / 2; ++x) {
                float m = in.at3(c, 2 * y, 2 * x);
                m = std::max(m, in.at3(c, 2 * y, 2 * x + 1));
                m = std::max(m, in.at3(c, 2 * y + 1, 2 * x));
                m = std::max(m, in.at3(c, 2 * y + 1, 2 * x + 1));
                out.data()[static_cast<size_t>((c * (H / 2) + y) * (W / 2) + x)] = m;
            }
    return out;
}

// Exhaustive sparsest-window search: every pair of sorted sample values is
// a candidate interval; keep those containing exactly m samples; minimize
// m / (width + 1e-9); ties prefer the smaller lower bound.
inline std::optional<swf::ValueInterval> sparsest_window(std::vector<float> samples, int m) {
    std::sort(samples.begin(), samples.end());
    const int n = static_cast<int>(samples.size());
    bool found = false;
    double best_score = 0.0;
    swf::ValueInterval best{};
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            float lo = samples[static_cast<size_t>(i)];
            float hi = samples[static_cast<size_t>(j)];
            auto first = std::lower_bound(samples.begin(), samples.end(), lo);
            auto last = std::upper_bound(samples.begin(), samples.end(), hi);
            if (static_cast<int>(last - first) != m) continue;
            double score =
                static_cast<double>(m) /
                (static_cast<double>(hi) - static_cast<double>(lo) + 1e-9);
            if (!found || score < best_score || (score == best_score && lo < best.lo)) {
                found = true;
                best_score = score;
                best = swf::ValueInterval{lo, hi};
            }
        }
    if (!found) return std::nullopt;
    return best;
}

} // namespace oracles
