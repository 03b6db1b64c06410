#include "swf/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "swf/errors.hpp"

namespace swf {

std::size_t numel(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) {
        if (d <= 0) throw DomainError("tensor extents must be positive");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor::Tensor(std::vector<int> dims)
    : dims_(std::move(dims)), data_(numel(dims_), 0.0f) {}

Tensor::Tensor(std::vector<int> dims, std::vector<float> values)
    : dims_(std::move(dims)), data_(std::move(values)) {
    if (numel(dims_) != data_.size())
        throw SizeMismatchError("tensor value count " + std::to_string(data_.size()) +
                                " does not match extents (expects " +
                                std::to_string(numel(dims_)) + ")");
}

std::size_t Tensor::index3(int c, int h, int w) const {
    const int C = dims_[0], H = dims_[1], W = dims_[2];
    if (rank() != 3 || c < 0 || c >= C || h < 0 || h >= H || w < 0 || w >= W)
        throw SizeMismatchError("rank-3 index out of range");
    return (static_cast<std::size_t>(c) * H + h) * W + w;
}

Tensor Tensor::flattened() const {
    Tensor out;
    out.dims_ = {static_cast<int>(data_.size())};
    out.data_ = data_;
    return out;
}

Tensor make_tensor(const std::vector<int>& dims, const std::vector<float>& values) {
    for (float v : values)
        if (!std::isfinite(v)) throw DomainError("tensor values must be finite");
    return Tensor(dims, values);
}

double changed_fraction(const Tensor& a, const Tensor& b, double rel_threshold) {
    if (!a.same_shape(b))
        throw SizeMismatchError("changed_fraction requires identically shaped tensors");
    if (rel_threshold < 0.0)
        throw DomainError("relative-change threshold must be non-negative");
    constexpr double eps = 1e-9;
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double base = std::abs(static_cast<double>(a[i])) + eps;
        const double diff = std::abs(static_cast<double>(b[i]) - static_cast<double>(a[i]));
        if (diff / base > rel_threshold) ++changed;
    }
    return a.size() == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(a.size());
}

bool ChannelPermutation::is_identity() const {
    for (int j = 0; j < size(); ++j)
        if (order[j] != j) return false;
    return true;
}

void ChannelPermutation::validate() const {
    const int n = size();
    if (n <= 0) throw DomainError("permutation must be non-empty");
    std::vector<char> seen(n, 0);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v])
            throw DomainError("permutation is not a bijection on 0.." + std::to_string(n - 1));
        seen[v] = 1;
    }
}

ChannelPermutation ChannelPermutation::identity(int n) {
    if (n <= 0) throw DomainError("permutation size must be positive");
    ChannelPermutation p;
    p.order.resize(n);
    for (int j = 0; j < n; ++j) p.order[j] = j;
    return p;
}

ChannelPermutation rotation(int size, int shift) {
    if (size <= 0) throw DomainError("rotation size must be positive");
    if (shift <= 0 || shift >= size)
        throw DomainError("rotation shift must satisfy 0 < shift < size (got shift=" +
                          std::to_string(shift) + ", size=" + std::to_string(size) + ")");
    ChannelPermutation p;
    p.order.resize(size);
    for (int j = 0; j < size; ++j) p.order[j] = (j + shift) % size;
    return p;
}

Tensor permute_outer(const Tensor& t, const ChannelPermutation& p) {
    if (t.rank() < 1) throw SizeMismatchError("permute_outer requires rank >= 1");
    p.validate();
    if (t.dims()[0] != p.size())
        throw SizeMismatchError("permutation length " + std::to_string(p.size()) +
                                " does not match outer extent " + std::to_string(t.dims()[0]));
    const std::size_t slice = t.size() / static_cast<std::size_t>(t.dims()[0]);
    Tensor out(t.dims());
    for (int j = 0; j < p.size(); ++j) {
        const float* src = t.data().data() + static_cast<std::size_t>(p.order[j]) * slice;
        std::copy(src, src + slice, out.data().data() + static_cast<std::size_t>(j) * slice);
    }
    return out;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i]))
            return false;
    return true;
}

} // namespace swf
