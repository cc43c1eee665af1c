#ifndef DCACRN_NN_OPS_HPP
#define DCACRN_NN_OPS_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace dcacrn {

/// Valid (no padding) cross-correlation of a [Cin x H x W] input with
/// [Cout x Cin x kh x kw] kernels plus a per-filter bias.
/// Output extents: H' = (H - kh) / sh + 1, W' = (W - kw) / sw + 1.
Tensor conv_valid(const Tensor& input, const Tensor& kernels, std::size_t stride_h,
                  std::size_t stride_w, const Tensor& bias);

/// Row-wise softmax of a [p x q] tensor, computed with per-row max
/// subtraction. Rejects non-finite inputs.
Tensor softmax_rows(const Tensor& x);

/// Normalizes all elements of x to zero mean / unit variance (population
/// statistics, eps added inside the square root), then applies the affine
/// gamma * xhat + beta. gamma and beta are either scalars or shaped like x.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

/// Running statistics owned by one batch-norm layer.
struct BatchNormState {
    Tensor running_mean; // [C], starts at 0
    Tensor running_var;  // [C], starts at 1
    double momentum = 0.1;
    double eps = 1e-5;

    static BatchNormState init(std::size_t channels);
};

/// Per-channel normalization of a [B x C x ...] tensor over the batch and
/// all trailing extents. Training mode normalizes with batch statistics and
/// folds them into the running buffers; eval mode uses the running buffers
/// verbatim (fresh layers carry mean 0 / var 1).
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                  bool training);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh_op(const Tensor& x);

/// Inverted dropout: in training mode zeroes each element with probability p
/// and scales survivors by 1/(1-p); in eval mode it is the identity.
Tensor dropout(const Tensor& x, double p, bool training, std::mt19937_64& rng);

struct LstmWeights {
    Tensor w_input;  // [4H x D], gate rows ordered input, forget, cell, output
    Tensor w_hidden; // [4H x H]
    Tensor bias;     // [4H x 1]
};

/// One LSTM cell step over column vectors: x_t [D x 1], h/c [H x 1].
std::pair<Tensor, Tensor> lstm_step(const Tensor& x_t, const Tensor& h_prev, const Tensor& c_prev,
                                    const LstmWeights& weights);

/// Mean over the batch of -log softmax(logits)[label]. logits is [B x C].
Tensor cross_entropy_mean(const Tensor& logits, const std::vector<std::size_t>& labels);

/// cross_entropy_mean plus l2_lambda * sum of squares of the given weight
/// tensor (the final classifier layer; biases excluded by the caller).
Tensor cross_entropy_with_l2(const Tensor& logits, const std::vector<std::size_t>& labels,
                             double l2_lambda, const Tensor& last_fc_weights);

/// Row-major softmax of one logits row, for metric/score computation.
std::vector<double> softmax_vector(std::span<const double> logits);

} // namespace dcacrn

#endif // DCACRN_NN_OPS_HPP
