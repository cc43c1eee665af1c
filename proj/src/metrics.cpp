#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace dcacrn {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ConfigError("roc_auc: scores and labels differ in length");
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw ConfigError("roc_auc is undefined with a single class present");
    }

    // Tie-averaged ranks, then the Mann-Whitney U statistic.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t s = 0; s < scores.size(); ++s)
        if (labels[s] != 0) rank_sum_pos += rank[s];
    const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels) {
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw ConfigError("roc_points is undefined with a single class present");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) (labels[order[k]] != 0 ? tp : fp)++;
        points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j + 1;
    }
    return points;
}

MetricsReport compute_metrics(std::span<const int> truth, std::span<const int> predicted,
                              std::span<const double> positive_scores, std::size_t num_classes,
                              int positive_class) {
    if (truth.empty()) throw ConfigError("compute_metrics: empty sample set");
    if (truth.size() != predicted.size()) throw ConfigError("compute_metrics: size mismatch");

    MetricsReport report;
    report.num_classes = num_classes;
    report.confusion.assign(num_classes * num_classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= num_classes || p >= num_classes) throw DataError("compute_metrics: label out of range");
        report.confusion[t * num_classes + p]++;
        if (t == p) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    report.per_class_recall.assign(num_classes, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t row_total = 0;
        for (std::size_t p = 0; p < num_classes; ++p) row_total += report.confusion[c * num_classes + p];
        if (row_total > 0) {
            report.per_class_recall[c] =
                static_cast<double>(report.confusion[c * num_classes + c]) / static_cast<double>(row_total);
        }
    }

    if (num_classes == 2) {
        const auto pos = static_cast<std::size_t>(positive_class);
        const std::size_t neg = 1 - pos;
        report.sensitivity = report.per_class_recall[pos];
        report.specificity = report.per_class_recall[neg];
        if (!positive_scores.empty()) {
            std::vector<int> binary(truth.size());
            for (std::size_t i = 0; i < truth.size(); ++i)
                binary[i] = truth[i] == positive_class ? 1 : 0;
            bool both = false;
            for (std::size_t i = 1; i < binary.size(); ++i)
                if (binary[i] != binary[0]) both = true;
            if (both) report.auc = roc_auc(positive_scores, binary);
        }
    }
    return report;
}

} // namespace dcacrn
