#pragma once

#include <cstddef>
#include <vector>

namespace swf {

/// Dense tensor of 32-bit floats in row-major order (last dimension fastest).
/// Rank 1 carries vectors, [channels, height, width] carries feature maps and
/// [out_channels, in_channels, kh, kw] carries convolution weights.
///
/// Tensors are plain values: copy freely, share const references across
/// threads. Every element is finite; constructors enforce it for external
/// data and all library operations preserve it.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> dims);  // zero-filled
    Tensor(std::vector<int> dims, std::vector<float> values);

    const std::vector<int>& dims() const { return dims_; }
    int rank() const { return static_cast<int>(dims_.size()); }
    std::size_t size() const { return data_.size(); }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }

    // rank-3 access, [channel, row, col]
    std::size_t index3(int c, int h, int w) const;
    float at3(int c, int h, int w) const { return data_[index3(c, h, w)]; }
    float& at3(int c, int h, int w) { return data_[index3(c, h, w)]; }

    bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }

    /// Row-major reshape to rank 1; element count and bytes unchanged.
    Tensor flattened() const;

private:
    std::vector<int> dims_;
    std::vector<float> data_;
};

std::size_t numel(const std::vector<int>& dims);

/// Builds a tensor from explicit extents and values. Throws SizeMismatchError
/// when product(dims) != values.size(), DomainError on non-finite input.
Tensor make_tensor(const std::vector<int>& dims, const std::vector<float>& values);

/// Fraction of elements whose relative change from a to b exceeds
/// rel_threshold: |b[i]-a[i]| / (|a[i]| + 1e-9) > rel_threshold.
/// The 1e-9 in the denominator keeps a[i] == 0 well-defined.
double changed_fraction(const Tensor& a, const Tensor& b, double rel_threshold);

/// Bijection on outer-slice indices: result slice j reads source slice
/// order[j]. Payloads only ever use single cyclic rotations.
struct ChannelPermutation {
    std::vector<int> order;

    int size() const { return static_cast<int>(order.size()); }
    bool is_identity() const;
    void validate() const;  // DomainError unless a bijection on 0..n-1

    static ChannelPermutation identity(int n);
};

/// Cyclic rotation: order[j] = (j + shift) mod size, with 0 < shift < size.
ChannelPermutation rotation(int size, int shift);

/// Reorders the outer (dim 0) slices of t by p; the multiset of slices is
/// preserved. Throws SizeMismatchError when t.dims[0] != p.size().
Tensor permute_outer(const Tensor& t, const ChannelPermutation& p);

/// Bit-level equality of shape and every element (distinguishes -0.0 from 0.0).
bool bit_equal(const Tensor& a, const Tensor& b);

} // namespace swf
