#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace dcacrn {

namespace {

std::size_t argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

struct EvalPoint {
    double loss = 0.0;
    std::size_t predicted = 0;
    std::vector<double> probabilities;
};

EvalPoint eval_one(ModelParams& params, const DfcnTensor& scan) {
    ForwardOptions opts; // eval mode
    const std::vector<double> logits = model_forward(scan, params, opts);
    EvalPoint pt;
    pt.probabilities = softmax_vector(logits);
    pt.predicted = argmax(logits);
    const auto label = static_cast<std::size_t>(scan.label);
    if (label >= pt.probabilities.size()) {
        throw DataError("scan " + scan.scan_id + " has label " + std::to_string(scan.label) +
                        " outside the model's " + std::to_string(pt.probabilities.size()) + " classes");
    }
    pt.loss = -std::log(std::max(pt.probabilities[label], 1e-300));
    return pt;
}

std::pair<double, double> eval_set(ModelParams& params, const std::vector<DfcnTensor>& scans,
                                   const std::vector<std::size_t>& indices) {
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t idx : indices) {
        const EvalPoint pt = eval_one(params, scans[idx]);
        loss += pt.loss;
        if (pt.predicted == static_cast<std::size_t>(scans[idx].label)) ++correct;
    }
    const double n = static_cast<double>(indices.size());
    return {loss / n, static_cast<double>(correct) / n};
}

} // namespace

FoldResult train_fold(const std::vector<DfcnTensor>& scans, const FoldPlan& plan,
                      const ModelConfig& config, const TrainHyper& hyper, std::uint64_t fold_seed) {
    if (plan.train.empty()) throw ConfigError("train_fold: no training scans");
    if (hyper.batch < 1) throw ConfigError("batch size must be >= 1");

    ModelParams params = ModelParams::init(config, derive_seed(fold_seed, 1));
    AdamConfig adam_cfg;
    adam_cfg.lr = hyper.lr;
    AdamOptimizer optimizer([&] {
        std::vector<Tensor> tensors;
        for (auto& nt : params.trainable()) tensors.push_back(nt.tensor);
        return tensors;
    }(), adam_cfg);

    std::mt19937_64 rng(derive_seed(fold_seed, 2));

    FoldResult result;
    result.params = params.clone();
    result.best_val_loss = std::numeric_limits<double>::infinity();
    result.best_val_accuracy = -1.0;

    std::vector<std::size_t> order = plan.train;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);

        double train_loss = 0.0;
        std::size_t train_correct = 0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
            const std::size_t end = std::min(order.size(), start + hyper.batch);
            std::vector<const DfcnTensor*> batch;
            std::vector<std::size_t> labels;
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(&scans[order[i]]);
                labels.push_back(static_cast<std::size_t>(scans[order[i]].label));
            }

            try {
                Tape tape;
                ForwardOptions opts;
                opts.training = true;
                opts.rng = &rng;
                Tensor logits = model_forward_batch(batch, params, opts);
                Tensor loss =
                    cross_entropy_with_l2(logits, labels, config.l2_lambda, params.fc_out.weight);
                if (!std::isfinite(loss.item())) {
                    throw NumericError("training diverged (non-finite loss)");
                }
                train_loss += loss.item() * static_cast<double>(batch.size());
                for (std::size_t b = 0; b < batch.size(); ++b) {
                    const std::span<const double> row(logits.data() + b * config.num_classes,
                                                      config.num_classes);
                    if (argmax(row) == labels[b]) ++train_correct;
                }
                optimizer.zero_grad();
                tape.backward(loss);
                optimizer.step();
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
            }
        }

        EpochStats stats;
        stats.train_loss = train_loss / static_cast<double>(order.size());
        stats.train_accuracy = static_cast<double>(train_correct) / static_cast<double>(order.size());
        if (!plan.val.empty()) {
            try {
                std::tie(stats.val_loss, stats.val_accuracy) = eval_set(params, scans, plan.val);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
            }
        }
        result.history.push_back(stats);

        const bool better = stats.val_accuracy > result.best_val_accuracy ||
                            (stats.val_accuracy == result.best_val_accuracy &&
                             stats.val_loss < result.best_val_loss);
        if (better) {
            result.best_val_accuracy = stats.val_accuracy;
            result.best_val_loss = stats.val_loss;
            result.best_epoch = epoch;
            result.params = params.clone();
        }
    }
    return result;
}

EvalOutcome evaluate_scans(ModelParams& params, const std::vector<DfcnTensor>& scans,
                           const std::vector<std::size_t>& indices, int positive_class) {
    if (indices.empty()) throw ConfigError("evaluate_scans: empty scan set");
    EvalOutcome out;
    for (std::size_t idx : indices) {
        const EvalPoint pt = eval_one(params, scans[idx]);
        out.truth.push_back(scans[idx].label);
        out.predicted.push_back(static_cast<int>(pt.predicted));
        if (params.config.num_classes == 2) {
            out.positive_scores.push_back(pt.probabilities[static_cast<std::size_t>(positive_class)]);
        }
    }
    out.metrics = compute_metrics(out.truth, out.predicted, out.positive_scores,
                                  params.config.num_classes, positive_class);
    return out;
}

std::vector<std::vector<double>> extract_features(ModelParams& params,
                                                  const std::vector<DfcnTensor>& scans,
                                                  const std::vector<std::size_t>& indices) {
    std::vector<std::vector<double>> features;
    ForwardOptions opts;
    opts.feature_sink = &features;
    for (std::size_t idx : indices) model_forward(scans[idx], params, opts);
    return features;
}

AttentionScores extract_attention(ModelParams& params, const DfcnTensor& scan) {
    if (!params.config.dca_enabled) {
        throw ConfigError("attention extraction requires a model with dca_enabled=true");
    }
    AttentionScores scores;
    ForwardOptions opts;
    opts.attention_sink = &scores;
    model_forward(scan, params, opts);
    return scores;
}

} // namespace dcacrn
