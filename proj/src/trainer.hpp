#ifndef DCACRN_TRAINER_HPP
#define DCACRN_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "folds.hpp"
#include "metrics.hpp"
#include "model.hpp"

namespace dcacrn {

struct TrainHyper {
    std::size_t epochs = 200;
    std::size_t batch = 16;
    double lr = 1e-3;
};

struct EpochStats {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct FoldResult {
    ModelParams params; // best-validation snapshot
    std::vector<EpochStats> history;
    std::optional<std::size_t> best_epoch;
    double best_val_accuracy = 0.0;
    double best_val_loss = 0.0;
};

/// Mini-batch Adam over the fold's training scans. The returned parameters
/// are the checkpoint with the highest validation accuracy (ties broken by
/// lower validation loss, then by the earlier epoch). Aborts with a
/// NumericError naming the epoch if the loss leaves the finite range.
FoldResult train_fold(const std::vector<DfcnTensor>& scans, const FoldPlan& plan,
                      const ModelConfig& config, const TrainHyper& hyper, std::uint64_t fold_seed);

struct EvalOutcome {
    MetricsReport metrics;
    std::vector<int> truth;
    std::vector<int> predicted;
    std::vector<double> positive_scores; // softmax probability of the positive class (binary)
};

/// Eval-mode scoring over the given scan indices.
EvalOutcome evaluate_scans(ModelParams& params, const std::vector<DfcnTensor>& scans,
                           const std::vector<std::size_t>& indices, int positive_class);

/// Eval-mode per-scan feature vectors (the LSTM output the classifier sees).
std::vector<std::vector<double>> extract_features(ModelParams& params,
                                                  const std::vector<DfcnTensor>& scans,
                                                  const std::vector<std::size_t>& indices);

/// Attention scores from a single eval-mode forward pass.
AttentionScores extract_attention(ModelParams& params, const DfcnTensor& scan);

} // namespace dcacrn

#endif // DCACRN_TRAINER_HPP
