#pragma once

#include <string>
#include <vector>

#include "swf/network.hpp"
#include "swf/trojan.hpp"

namespace swf {

struct ForwardResult {
    Tensor logits;
    int predicted = -1;  // -1 when the run stopped before the last layer
    OpCounters ops;
    TapSet taps;
};

struct ArmedResult {
    Tensor logits;
    int predicted = -1;
    bool fired = false;
    float monitored_value = 0.0f;
    OpCounters ops;
    TapSet taps;
};

/// Valid-padding stride-1 convolution. Produces output elements in flat
/// lexicographic (channel,row,col) range [from, to); elements outside the
/// range are left untouched in `out`. Output channel j is computed from
/// filter bank (and bias) order[j]. Accumulates in 32-bit floats, bias
/// first, then ascending (in-channel, kernel-row, kernel-col).
void conv_layer_range(const Tensor& in, const Tensor& weight, const Tensor& bias,
                      const ChannelPermutation& order, Tensor& out, int from, int to,
                      OpCounts& ops);
Tensor conv_layer(const Tensor& in, const Tensor& weight, const Tensor& bias,
                  const ChannelPermutation& order, OpCounts& ops);
Tensor conv_layer(const Tensor& in, const Tensor& weight, const Tensor& bias, OpCounts& ops);

/// 2x2 stride-2 max pooling; output channel j reads input channel order[j].
void maxpool_layer_range(const Tensor& in, const ChannelPermutation& order, Tensor& out,
                         int from, int to, OpCounts& ops);
Tensor maxpool_layer(const Tensor& in, const ChannelPermutation& order, OpCounts& ops);
Tensor maxpool_layer(const Tensor& in, OpCounts& ops);

/// Affine map on a rank-1 input; accumulation bias first then ascending
/// input index.
Tensor fc_layer(const Tensor& in, const Tensor& weight, const Tensor& bias, OpCounts& ops);

Tensor relu_layer(const Tensor& in, OpCounts& ops);

/// Argmax over a rank-1 tensor; ties resolve to the smaller index.
int top1(const Tensor& logits);

/// Benign forward pass. Populates taps for the named layers; when
/// stop_after names a layer, execution ends right after it (logits then
/// hold that layer's output and predicted stays -1).
ForwardResult forward(const NetworkSpec& net, const WeightMap& weights, const Tensor& image,
                      const std::vector<std::string>& tap_layers = {},
                      const std::string& stop_after = "");

/// Trojaned forward pass. The host layer's output is produced in
/// lexicographic order; when the monitored element appears, its benign
/// value is tested against the trigger interval (2 counted comparisons).
/// On a hit, every element strictly after it is produced under the
/// payload's channel rotation; everything else, and every other layer,
/// runs benignly. The permutation is a read-order indirection, so stored
/// weights are never modified and the next image starts clean.
ArmedResult forward_armed(const NetworkSpec& net, const WeightMap& weights,
                          const Tensor& image, const TrojanConfig& cfg,
                          const std::vector<std::string>& tap_layers = {});

} // namespace swf
