#ifndef DCACRN_METRICS_HPP
#define DCACRN_METRICS_HPP

#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace dcacrn {

/// Classification report. Binary fields (sensitivity, specificity, auc)
/// are NaN for multi-class runs.
struct MetricsReport {
    std::size_t num_classes = 0;
    std::vector<std::size_t> confusion; // C x C row-major, rows are true labels
    double accuracy = 0.0;
    double sensitivity = std::numeric_limits<double>::quiet_NaN(); // recall of the positive class
    double specificity = std::numeric_limits<double>::quiet_NaN(); // recall of the other class
    double auc = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_class_recall;

    std::size_t confusion_at(std::size_t truth, std::size_t pred) const {
        return confusion[truth * num_classes + pred];
    }
};

/// AUC as the Mann-Whitney pair-ordering fraction: over all
/// (positive, negative) pairs, the share where the positive scores higher,
/// ties counted one half. Requires both classes present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// ROC polyline from (0,0) to (1,1), one point per distinct threshold:
/// pairs of (false positive rate, true positive rate).
std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels);

/// Builds the confusion matrix and derived rates; positive_class selects
/// which label counts as the patient group for SEN/SPE. Scores (positive
/// class probability per sample) feed the AUC and may be empty for
/// multi-class input.
MetricsReport compute_metrics(std::span<const int> truth, std::span<const int> predicted,
                              std::span<const double> positive_scores, std::size_t num_classes,
                              int positive_class);

} // namespace dcacrn

#endif // DCACRN_METRICS_HPP
