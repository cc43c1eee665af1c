#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace dcacrn {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw ConfigError("incomplete beta requires a, b > 0");
    if (x < 0.0 || x > 1.0) throw ConfigError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw ConfigError("t-test degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult two_sample_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw ConfigError("t-test needs at least 2 samples per group");
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (double v : a) mean_a += v;
    for (double v : b) mean_b += v;
    mean_a /= na;
    mean_b /= nb;
    double ss_a = 0.0, ss_b = 0.0;
    for (double v : a) ss_a += (v - mean_a) * (v - mean_a);
    for (double v : b) ss_b += (v - mean_b) * (v - mean_b);
    const double df = na + nb - 2.0;
    const double pooled_var = (ss_a + ss_b) / df;

    TTestResult r;
    if (pooled_var == 0.0) {
        if (mean_a == mean_b) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    r.t = (mean_a - mean_b) / std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
    r.p = student_t_two_sided_p(r.t, df);
    return r;
}

TTestReport feature_ttest(const std::vector<std::vector<double>>& group_a,
                          const std::vector<std::vector<double>>& group_b) {
    if (group_a.size() < 2 || group_b.size() < 2) {
        throw ConfigError("feature_ttest needs at least 2 samples per group");
    }
    const std::size_t width = group_a.front().size();
    for (const auto& row : group_a)
        if (row.size() != width) throw ConfigError("feature_ttest: ragged feature rows in group A");
    for (const auto& row : group_b)
        if (row.size() != width) throw ConfigError("feature_ttest: ragged feature rows in group B");

    TTestReport report;
    report.group_a_size = group_a.size();
    report.group_b_size = group_b.size();
    report.features.reserve(width);
    std::vector<double> col_a(group_a.size()), col_b(group_b.size());
    for (std::size_t f = 0; f < width; ++f) {
        for (std::size_t i = 0; i < group_a.size(); ++i) col_a[i] = group_a[i][f];
        for (std::size_t i = 0; i < group_b.size(); ++i) col_b[i] = group_b[i][f];
        const TTestResult r = two_sample_ttest(col_a, col_b);
        report.features.push_back({f, r.t, r.p, r.degenerate, 0});
    }
    std::vector<std::size_t> order(width);
    for (std::size_t i = 0; i < width; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.features[a].p < report.features[b].p;
    });
    std::vector<FeatureTTest> sorted;
    sorted.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
        FeatureTTest ft = report.features[order[i]];
        ft.rank = i + 1;
        sorted.push_back(ft);
    }
    report.features = std::move(sorted);
    return report;
}

} // namespace dcacrn
