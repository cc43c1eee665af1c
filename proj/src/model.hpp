#ifndef DCACRN_MODEL_HPP
#define DCACRN_MODEL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adam.hpp"
#include "dfcn.hpp"
#include "nn_ops.hpp"
#include "tensor.hpp"

namespace dcacrn {

/// Divisor mode for the attention score scaling 1/sqrt(d_k).
enum class DkMode {
    kKeyLength, // d_k = U1 = t - s1 + 1
    kRegions    // d_k = n
};

/// Network hyperparameters. Wire keys (config file / CLI flags) are the
/// short names noted per field; C++ code uses the role names.
struct ModelConfig {
    std::size_t regions = 116;      // n
    std::size_t windows = 34;       // t
    std::size_t con1_span = 2;      // s1, temporal extent of Con1
    std::size_t con2_span = 1;      // s2
    std::size_t con3_span = 8;      // s3
    std::size_t con1_filters = 32;  // c1, channel count feeding the DCA layer
    std::size_t con2_filters = 5;   // k1
    std::size_t con3_filters = 16;  // k2
    std::size_t lstm_hidden = 48;   // lstm_hidden
    std::size_t fc1_width = 32;     // fc1
    std::size_t fc2_width = 16;     // fc2
    std::size_t num_classes = 2;    // num_classes
    double dropout_conv = 0.25;     // dropout_conv
    double dropout_lstm = 0.5;      // dropout_lstm
    double l2_lambda = 1e-4;        // l2_lambda
    DkMode dk_mode = DkMode::kKeyLength; // dk_mode: "keylen" | "regions"
    bool dca_enabled = true;        // dca_enabled
    bool dca_bias = false;          // dca_bias

    std::size_t u1() const { return windows - con1_span + 1; }
    std::size_t u2() const { return (u1() - con3_span) / 2 + 1; }
    double dk() const;

    /// Throws ConfigError naming the offending wire key.
    void validate() const;

    static ModelConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ConvLayer {
    Tensor weight;
    Tensor bias;
};

struct FcLayer {
    Tensor weight;
    Tensor bias;
};

struct BnLayer {
    Tensor gamma;
    Tensor beta;
    BatchNormState state;
};

/// Per-channel scalar query/key/value transforms of the DCA layer.
struct DcaParams {
    Tensor w_q, w_k, w_v; // [C1]
    Tensor b_q, b_k, b_v; // [C1], present only when bias enabled
    bool has_bias = false;
};

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

struct ModelParams {
    ModelConfig config;
    ConvLayer con1, con2, con3;
    BnLayer bn1, bn2, bn3;
    DcaParams dca; // tensors undefined when !config.dca_enabled
    LstmWeights lstm;
    FcLayer fc1, fc2, fc_out;

    /// Fresh parameters: uniform fan-in init for conv/fc/lstm weights, zero
    /// biases (lstm forget gate bias 1), BN affine 1/0, DCA scalars 1.
    static ModelParams init(const ModelConfig& config, std::uint64_t seed);

    std::vector<NamedTensor> trainable();
    /// BN running statistics (saved with checkpoints, never optimized).
    std::vector<NamedTensor> state_buffers();

    ModelParams clone() const;
};

/// Row-stochastic attention score matrices captured from one forward pass.
struct AttentionScores {
    std::size_t regions = 0;
    std::vector<std::vector<double>> channels; // per channel, N*N row-major
};

struct ForwardOptions {
    bool training = false;
    std::mt19937_64* rng = nullptr; // needed when training with dropout > 0
    AttentionScores* attention_sink = nullptr;               // single-sample only
    std::vector<std::vector<double>>* feature_sink = nullptr; // per-sample LSTM features
};

/// Rearranges a dFCN stack into the Con1 input layout [N x N x T] where
/// out[j, i, t] = F[t, i, j]; row i of every window becomes one image row
/// and the connection partner j becomes the input channel.
Tensor dfcn_input(const DfcnTensor& f);

// Per-sample stage contracts (batch size 1 internally; batch training uses
// model_forward_batch so batch norm sees the whole mini-batch).
Tensor con1_forward(const DfcnTensor& f, ModelParams& params, const ForwardOptions& opts);
Tensor con2_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts);
Tensor con3_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts);

/// Attention reconstruction without the closing layer norm:
/// per channel O = softmax(Q K^T / sqrt(d_k)) V + I.
Tensor dca_reconstruct(const Tensor& input, ModelParams& params, AttentionScores* sink = nullptr);
/// Full DCA layer: reconstruction followed by layer normalization over all
/// (channel, region, time) features of the sample.
Tensor dca_forward(const Tensor& input, ModelParams& params, AttentionScores* sink = nullptr);

/// LSTM over U2 steps of K2 features, then ReLU, dropout, and the
/// three-layer classifier head. Returns raw logits [num_classes x 1].
Tensor temporal_head_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts);

/// Whole network over a mini-batch; returns logits [B x num_classes].
Tensor model_forward_batch(std::span<const DfcnTensor* const> batch, ModelParams& params,
                           const ForwardOptions& opts);

/// Single-sample convenience wrapper returning the logits row.
std::vector<double> model_forward(const DfcnTensor& f, ModelParams& params, const ForwardOptions& opts);

struct ParamCountReport {
    std::vector<std::pair<std::string, std::size_t>> per_layer;
    std::size_t total = 0;
};

ParamCountReport count_parameters(const std::vector<NamedTensor>& tensors);

} // namespace dcacrn

#endif // DCACRN_MODEL_HPP
