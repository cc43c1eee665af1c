#include "model.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace dcacrn {

double ModelConfig::dk() const {
    return dk_mode == DkMode::kKeyLength ? static_cast<double>(u1()) : static_cast<double>(regions);
}

void ModelConfig::validate() const {
    if (regions < 2) throw ConfigError("n: region count must be >= 2");
    if (windows < 1) throw ConfigError("t: window count must be >= 1");
    if (con1_span < 1 || con1_span > windows) throw ConfigError("s1: must be in [1, t]");
    if (con2_span < 1 || con2_span > u1()) throw ConfigError("s2: must be <= t - s1 + 1");
    if (con3_span < 1) throw ConfigError("s3: must be >= 1");
    if (u1() < con3_span) throw ConfigError("s3: Con3 must fit (s3 <= t - s1 + 1)");
    if (con1_filters < 1) throw ConfigError("c1: must be >= 1");
    if (con2_filters < 1) throw ConfigError("k1: must be >= 1");
    if (con3_filters < 1) throw ConfigError("k2: must be >= 1");
    if (lstm_hidden < 1) throw ConfigError("lstm_hidden: must be >= 1");
    if (fc1_width < 1) throw ConfigError("fc1: must be >= 1");
    if (fc2_width < 1) throw ConfigError("fc2: must be >= 1");
    if (num_classes != 2 && num_classes != 4) throw ConfigError("num_classes: must be 2 or 4");
    if (dropout_conv < 0.0 || dropout_conv >= 1.0) throw ConfigError("dropout_conv: must be in [0, 1)");
    if (dropout_lstm < 0.0 || dropout_lstm >= 1.0) throw ConfigError("dropout_lstm: must be in [0, 1)");
    if (l2_lambda < 0.0) throw ConfigError("l2_lambda: must be >= 0");
}

namespace {

std::size_t json_size(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("model config key '" + key + "' must be an integer");
    }
    const auto n = v.get<long long>();
    if (n < 0) throw ConfigError("model config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(n);
}

double json_double(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("model config key '" + key + "' must be a number");
    return v.get<double>();
}

bool json_bool(const nlohmann::json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError("model config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

} // namespace

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("model config must be an object");
    ModelConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const nlohmann::json& v = it.value();
        if (key == "n") c.regions = json_size(v, key);
        else if (key == "t") c.windows = json_size(v, key);
        else if (key == "s1") c.con1_span = json_size(v, key);
        else if (key == "s2") c.con2_span = json_size(v, key);
        else if (key == "s3") c.con3_span = json_size(v, key);
        else if (key == "c1") c.con1_filters = json_size(v, key);
        else if (key == "k1") c.con2_filters = json_size(v, key);
        else if (key == "k2") c.con3_filters = json_size(v, key);
        else if (key == "lstm_hidden") c.lstm_hidden = json_size(v, key);
        else if (key == "fc1") c.fc1_width = json_size(v, key);
        else if (key == "fc2") c.fc2_width = json_size(v, key);
        else if (key == "num_classes") c.num_classes = json_size(v, key);
        else if (key == "dropout_conv") c.dropout_conv = json_double(v, key);
        else if (key == "dropout_lstm") c.dropout_lstm = json_double(v, key);
        else if (key == "l2_lambda") c.l2_lambda = json_double(v, key);
        else if (key == "dk_mode") {
            if (!v.is_string()) throw ConfigError("model config key 'dk_mode' must be a string");
            const std::string s = v.get<std::string>();
            if (s == "keylen") c.dk_mode = DkMode::kKeyLength;
            else if (s == "regions") c.dk_mode = DkMode::kRegions;
            else throw ConfigError("dk_mode: expected 'keylen' or 'regions', got '" + s + "'");
        } else if (key == "dca_enabled") c.dca_enabled = json_bool(v, key);
        else if (key == "dca_bias") c.dca_bias = json_bool(v, key);
        else throw ConfigError("model config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

nlohmann::json ModelConfig::to_json() const {
    nlohmann::json j;
    j["n"] = regions;
    j["t"] = windows;
    j["s1"] = con1_span;
    j["s2"] = con2_span;
    j["s3"] = con3_span;
    j["c1"] = con1_filters;
    j["k1"] = con2_filters;
    j["k2"] = con3_filters;
    j["lstm_hidden"] = lstm_hidden;
    j["fc1"] = fc1_width;
    j["fc2"] = fc2_width;
    j["num_classes"] = num_classes;
    j["dropout_conv"] = dropout_conv;
    j["dropout_lstm"] = dropout_lstm;
    j["l2_lambda"] = l2_lambda;
    j["dk_mode"] = dk_mode == DkMode::kKeyLength ? "keylen" : "regions";
    j["dca_enabled"] = dca_enabled;
    j["dca_bias"] = dca_bias;
    return j;
}

namespace {

double uniform_pm(std::mt19937_64& rng, double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
    return (2.0 * u - 1.0) * bound;
}

Tensor uniform_tensor(std::mt19937_64& rng, std::vector<std::size_t> shape, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> v(shape_product(shape));
    for (double& x : v) x = uniform_pm(rng, bound);
    return Tensor::from_data(std::move(shape), std::move(v), true);
}

Tensor copy_tensor(const Tensor& t) {
    Tensor out = Tensor::from_data(t.shape(), {t.data(), t.data() + t.size()}, t.requires_grad());
    return out;
}

BnLayer init_bn(std::size_t channels) {
    BnLayer bn;
    bn.gamma = Tensor::full({channels}, 1.0, true);
    bn.beta = Tensor::zeros({channels}, true);
    bn.state = BatchNormState::init(channels);
    return bn;
}

} // namespace

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    ModelParams p;
    p.config = config;
    std::mt19937_64 rng(seed);

    const std::size_t n = config.regions;
    const std::size_t c1 = config.con1_filters, k1 = config.con2_filters, k2 = config.con3_filters;
    const std::size_t hidden = config.lstm_hidden;

    p.con1.weight = uniform_tensor(rng, {c1, n, 1, config.con1_span}, n * config.con1_span);
    p.con1.bias = Tensor::zeros({c1}, true);
    p.bn1 = init_bn(c1);

    if (config.dca_enabled) {
        p.dca.w_q = Tensor::full({c1}, 1.0, true);
        p.dca.w_k = Tensor::full({c1}, 1.0, true);
        p.dca.w_v = Tensor::full({c1}, 1.0, true);
        p.dca.has_bias = config.dca_bias;
        if (config.dca_bias) {
            p.dca.b_q = Tensor::zeros({c1}, true);
            p.dca.b_k = Tensor::zeros({c1}, true);
            p.dca.b_v = Tensor::zeros({c1}, true);
        }
    }

    p.con2.weight = uniform_tensor(rng, {k1, c1, n, config.con2_span}, c1 * n * config.con2_span);
    p.con2.bias = Tensor::zeros({k1}, true);
    p.bn2 = init_bn(k1);

    p.con3.weight = uniform_tensor(rng, {k2, k1, 1, config.con3_span}, k1 * config.con3_span);
    p.con3.bias = Tensor::zeros({k2}, true);
    p.bn3 = init_bn(k2);

    p.lstm.w_input = uniform_tensor(rng, {4 * hidden, k2}, k2);
    p.lstm.w_hidden = uniform_tensor(rng, {4 * hidden, hidden}, hidden);
    p.lstm.bias = Tensor::zeros({4 * hidden, 1}, true);
    for (std::size_t i = hidden; i < 2 * hidden; ++i) p.lstm.bias.at(i) = 1.0; // forget gate

    p.fc1.weight = uniform_tensor(rng, {config.fc1_width, hidden}, hidden);
    p.fc1.bias = Tensor::zeros({config.fc1_width, 1}, true);
    p.fc2.weight = uniform_tensor(rng, {config.fc2_width, config.fc1_width}, config.fc1_width);
    p.fc2.bias = Tensor::zeros({config.fc2_width, 1}, true);
    p.fc_out.weight = uniform_tensor(rng, {config.num_classes, config.fc2_width}, config.fc2_width);
    p.fc_out.bias = Tensor::zeros({config.num_classes, 1}, true);
    return p;
}

std::vector<NamedTensor> ModelParams::trainable() {
    std::vector<NamedTensor> v;
    v.push_back({"con1.weight", con1.weight});
    v.push_back({"con1.bias", con1.bias});
    v.push_back({"bn1.gamma", bn1.gamma});
    v.push_back({"bn1.beta", bn1.beta});
    if (config.dca_enabled) {
        v.push_back({"dca.w_q", dca.w_q});
        v.push_back({"dca.w_k", dca.w_k});
        v.push_back({"dca.w_v", dca.w_v});
        if (dca.has_bias) {
            v.push_back({"dca.b_q", dca.b_q});
            v.push_back({"dca.b_k", dca.b_k});
            v.push_back({"dca.b_v", dca.b_v});
        }
    }
    v.push_back({"con2.weight", con2.weight});
    v.push_back({"con2.bias", con2.bias});
    v.push_back({"bn2.gamma", bn2.gamma});
    v.push_back({"bn2.beta", bn2.beta});
    v.push_back({"con3.weight", con3.weight});
    v.push_back({"con3.bias", con3.bias});
    v.push_back({"bn3.gamma", bn3.gamma});
    v.push_back({"bn3.beta", bn3.beta});
    v.push_back({"lstm.w_input", lstm.w_input});
    v.push_back({"lstm.w_hidden", lstm.w_hidden});
    v.push_back({"lstm.bias", lstm.bias});
    v.push_back({"fc1.weight", fc1.weight});
    v.push_back({"fc1.bias", fc1.bias});
    v.push_back({"fc2.weight", fc2.weight});
    v.push_back({"fc2.bias", fc2.bias});
    v.push_back({"fc_out.weight", fc_out.weight});
    v.push_back({"fc_out.bias", fc_out.bias});
    return v;
}

std::vector<NamedTensor> ModelParams::state_buffers() {
    return {
        {"bn1.running_mean", bn1.state.running_mean},
        {"bn1.running_var", bn1.state.running_var},
        {"bn2.running_mean", bn2.state.running_mean},
        {"bn2.running_var", bn2.state.running_var},
        {"bn3.running_mean", bn3.state.running_mean},
        {"bn3.running_var", bn3.state.running_var},
    };
}

ModelParams ModelParams::clone() const {
    ModelParams p;
    p.config = config;
    p.con1 = {copy_tensor(con1.weight), copy_tensor(con1.bias)};
    p.con2 = {copy_tensor(con2.weight), copy_tensor(con2.bias)};
    p.con3 = {copy_tensor(con3.weight), copy_tensor(con3.bias)};
    auto copy_bn = [](const BnLayer& b) {
        BnLayer out;
        out.gamma = copy_tensor(b.gamma);
        out.beta = copy_tensor(b.beta);
        out.state.running_mean = copy_tensor(b.state.running_mean);
        out.state.running_var = copy_tensor(b.state.running_var);
        out.state.momentum = b.state.momentum;
        out.state.eps = b.state.eps;
        return out;
    };
    p.bn1 = copy_bn(bn1);
    p.bn2 = copy_bn(bn2);
    p.bn3 = copy_bn(bn3);
    if (config.dca_enabled) {
        p.dca.w_q = copy_tensor(dca.w_q);
        p.dca.w_k = copy_tensor(dca.w_k);
        p.dca.w_v = copy_tensor(dca.w_v);
        p.dca.has_bias = dca.has_bias;
        if (dca.has_bias) {
            p.dca.b_q = copy_tensor(dca.b_q);
            p.dca.b_k = copy_tensor(dca.b_k);
            p.dca.b_v = copy_tensor(dca.b_v);
        }
    }
    p.lstm = {copy_tensor(lstm.w_input), copy_tensor(lstm.w_hidden), copy_tensor(lstm.bias)};
    p.fc1 = {copy_tensor(fc1.weight), copy_tensor(fc1.bias)};
    p.fc2 = {copy_tensor(fc2.weight), copy_tensor(fc2.bias)};
    p.fc_out = {copy_tensor(fc_out.weight), copy_tensor(fc_out.bias)};
    return p;
}

Tensor dfcn_input(const DfcnTensor& f) {
    const std::size_t n = f.regions, t = f.windows;
    std::vector<double> v(n * n * t);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t w = 0; w < t; ++w)
                v[(j * n + i) * t + w] = f.at(w, i, j);
    return Tensor::from_data({n, n, t}, std::move(v), false);
}

namespace {

/// Shared BN -> ReLU -> dropout tail for the three convolution stages;
/// operates on a batched [B x C x ...] tensor.
Tensor post_conv(const Tensor& batched, BnLayer& bn, double p_drop, const ForwardOptions& opts) {
    Tensor y = batch_norm(batched, bn.gamma, bn.beta, bn.state, opts.training);
    y = relu(y);
    if (opts.training && p_drop > 0.0) {
        if (!opts.rng) throw ConfigError("training forward pass requires an RNG for dropout");
        y = dropout(y, p_drop, true, *opts.rng);
    }
    return y;
}

void check_dfcn_shape(const DfcnTensor& f, const ModelConfig& cfg) {
    if (f.windows != cfg.windows || f.regions != cfg.regions) {
        throw ConfigError("dFCN tensor " + std::to_string(f.windows) + "x" + std::to_string(f.regions) +
                          "x" + std::to_string(f.regions) + " does not match model config t=" +
                          std::to_string(cfg.windows) + ", n=" + std::to_string(cfg.regions));
    }
}

} // namespace

Tensor con1_forward(const DfcnTensor& f, ModelParams& params, const ForwardOptions& opts) {
    check_dfcn_shape(f, params.config);
    Tensor c = conv_valid(dfcn_input(f), params.con1.weight, 1, 1, params.con1.bias);
    Tensor y = post_conv(concat0({c}), params.bn1, params.config.dropout_conv, opts);
    return slice0(y, 0);
}

Tensor con2_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts) {
    Tensor c = conv_valid(x, params.con2.weight, 1, 1, params.con2.bias);
    Tensor y = post_conv(concat0({c}), params.bn2, params.config.dropout_conv, opts);
    return slice0(y, 0);
}

Tensor con3_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts) {
    Tensor c = conv_valid(x, params.con3.weight, 1, 2, params.con3.bias);
    Tensor y = post_conv(concat0({c}), params.bn3, params.config.dropout_conv, opts);
    return slice0(y, 0);
}

Tensor dca_reconstruct(const Tensor& input, ModelParams& params, AttentionScores* sink) {
    const ModelConfig& cfg = params.config;
    if (!cfg.dca_enabled) throw ConfigError("DCA layer invoked but dca_enabled is false");
    if (input.rank() != 3 || input.extent(0) != cfg.con1_filters || input.extent(1) != cfg.regions ||
        input.extent(2) != cfg.u1()) {
        throw ConfigError("DCA input must be [c1 x n x u1], got " + shape_string(input.shape()));
    }
    Tensor q = channel_scale(input, params.dca.w_q);
    Tensor k = channel_scale(input, params.dca.w_k);
    Tensor v = channel_scale(input, params.dca.w_v);
    if (params.dca.has_bias) {
        q = channel_bias(q, params.dca.b_q);
        k = channel_bias(k, params.dca.b_k);
        v = channel_bias(v, params.dca.b_v);
    }
    const double inv_sqrt_dk = 1.0 / std::sqrt(cfg.dk());
    if (sink) {
        sink->regions = cfg.regions;
        sink->channels.clear();
    }
    std::vector<Tensor> channels;
    channels.reserve(cfg.con1_filters);
    for (std::size_t lam = 0; lam < cfg.con1_filters; ++lam) {
        Tensor i_l = slice0(input, lam);
        Tensor q_l = slice0(q, lam);
        Tensor k_l = slice0(k, lam);
        Tensor v_l = slice0(v, lam);
        Tensor scores = softmax_rows(scale(matmul(q_l, transpose(k_l)), inv_sqrt_dk));
        if (sink) sink->channels.emplace_back(scores.data(), scores.data() + scores.size());
        channels.push_back(add(matmul(scores, v_l), i_l));
    }
    return concat0(channels);
}

Tensor dca_forward(const Tensor& input, ModelParams& params, AttentionScores* sink) {
    Tensor o = dca_reconstruct(input, params, sink);
    // Unit affine: the normalization carries no trainable parameters, so
    // toggling the DCA layer changes the count by exactly the Q/K/V scalars.
    return layer_norm(o, Tensor::scalar(1.0), Tensor::scalar(0.0));
}

Tensor temporal_head_forward(const Tensor& x, ModelParams& params, const ForwardOptions& opts) {
    const ModelConfig& cfg = params.config;
    if (x.rank() != 3 || x.extent(0) != cfg.con3_filters || x.extent(1) != 1 || x.extent(2) != cfg.u2()) {
        throw ConfigError("temporal head input must be [k2 x 1 x u2], got " + shape_string(x.shape()));
    }
    Tensor seq = reshape(x, {cfg.con3_filters, cfg.u2()});
    Tensor h = Tensor::zeros({cfg.lstm_hidden, 1});
    Tensor c = Tensor::zeros({cfg.lstm_hidden, 1});
    for (std::size_t t = 0; t < cfg.u2(); ++t) {
        auto [h_next, c_next] = lstm_step(slice_col(seq, t), h, c, params.lstm);
        h = h_next;
        c = c_next;
    }
    Tensor feat = relu(h);
    if (opts.feature_sink) opts.feature_sink->push_back({feat.data(), feat.data() + feat.size()});
    if (opts.training && cfg.dropout_lstm > 0.0) {
        if (!opts.rng) throw ConfigError("training forward pass requires an RNG for dropout");
        feat = dropout(feat, cfg.dropout_lstm, true, *opts.rng);
    }
    Tensor z1 = add(matmul(params.fc1.weight, feat), params.fc1.bias);
    Tensor z2 = add(matmul(params.fc2.weight, z1), params.fc2.bias);
    return add(matmul(params.fc_out.weight, z2), params.fc_out.bias);
}

Tensor model_forward_batch(std::span<const DfcnTensor* const> batch, ModelParams& params,
                           const ForwardOptions& opts) {
    if (batch.empty()) throw ConfigError("model_forward_batch: empty batch");
    if (opts.attention_sink && batch.size() != 1) {
        throw ConfigError("attention capture requires a single-sample batch");
    }
    const ModelConfig& cfg = params.config;

    std::vector<Tensor> parts;
    parts.reserve(batch.size());
    for (const DfcnTensor* f : batch) {
        check_dfcn_shape(*f, cfg);
        parts.push_back(conv_valid(dfcn_input(*f), params.con1.weight, 1, 1, params.con1.bias));
    }
    Tensor y = post_conv(concat0(parts), params.bn1, cfg.dropout_conv, opts); // [B x c1 x n x u1]

    if (cfg.dca_enabled) {
        std::vector<Tensor> recon;
        recon.reserve(batch.size());
        for (std::size_t b = 0; b < batch.size(); ++b) {
            recon.push_back(dca_forward(slice0(y, b), params, opts.attention_sink));
        }
        y = concat0(recon);
    }

    std::vector<Tensor> c2;
    c2.reserve(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        c2.push_back(conv_valid(slice0(y, b), params.con2.weight, 1, 1, params.con2.bias));
    }
    y = post_conv(concat0(c2), params.bn2, cfg.dropout_conv, opts); // [B x k1 x 1 x u1]

    std::vector<Tensor> c3;
    c3.reserve(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        c3.push_back(conv_valid(slice0(y, b), params.con3.weight, 1, 2, params.con3.bias));
    }
    y = post_conv(concat0(c3), params.bn3, cfg.dropout_conv, opts); // [B x k2 x 1 x u2]

    std::vector<Tensor> rows;
    rows.reserve(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        Tensor logits = temporal_head_forward(slice0(y, b), params, opts);
        rows.push_back(reshape(logits, {cfg.num_classes}));
    }
    return concat0(rows); // [B x num_classes]
}

std::vector<double> model_forward(const DfcnTensor& f, ModelParams& params, const ForwardOptions& opts) {
    const DfcnTensor* p = &f;
    Tensor logits = model_forward_batch(std::span<const DfcnTensor* const>(&p, 1), params, opts);
    return {logits.data(), logits.data() + logits.size()};
}

ParamCountReport count_parameters(const std::vector<NamedTensor>& tensors) {
    ParamCountReport report;
    for (const auto& nt : tensors) {
        const std::string layer = nt.name.substr(0, nt.name.find('.'));
        auto it = std::find_if(report.per_layer.begin(), report.per_layer.end(),
                               [&](const auto& p) { return p.first == layer; });
        if (it == report.per_layer.end()) {
            report.per_layer.emplace_back(layer, nt.tensor.size());
        } else {
            it->second += nt.tensor.size();
        }
        report.total += nt.tensor.size();
    }
    return report;
}

} // namespace dcacrn
