#ifndef DCACRN_STATS_HPP
#define DCACRN_STATS_HPP

#include <span>
#include <vector>

namespace dcacrn {

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false; // zero pooled variance with distinct means
};

/// Student's two-sample pooled-variance t-test, df = nA + nB - 2, two-sided
/// p-value through the regularized incomplete beta function. Zero pooled
/// variance yields p = 1 for equal means and a degenerate p = 0 otherwise.
TTestResult two_sample_ttest(std::span<const double> a, std::span<const double> b);

/// I_x(a, b) via the standard continued fraction (Lentz evaluation).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p for a t statistic at the given degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct FeatureTTest {
    std::size_t feature = 0;
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;
    std::size_t rank = 0; // 1-based, ascending p
};

struct TTestReport {
    std::size_t group_a_size = 0;
    std::size_t group_b_size = 0;
    std::vector<FeatureTTest> features; // sorted by ascending p
};

/// Per-feature discriminability between two groups of feature vectors
/// (samples x features, all rows the same width, >= 2 samples per group).
TTestReport feature_ttest(const std::vector<std::vector<double>>& group_a,
                          const std::vector<std::vector<double>>& group_b);

} // namespace dcacrn

#endif // DCACRN_STATS_HPP
