#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "attention_export.hpp"
#include "dfcn.hpp"
#include "error.hpp"
#include "folds.hpp"
#include "metrics.hpp"
#include "stats.hpp"
#include "synth.hpp"
#include "testutil.hpp"
#include "trainer.hpp"

using namespace dcacrn;

namespace {

// --- quadrature oracle for the t distribution ---------------------------

double t_pdf(double x, double df) {
    const double ln_coeff = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                            0.5 * std::log(df * 3.14159265358979323846);
    return std::exp(ln_coeff - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double df, double tol, int depth) {
    const double m = (a + b) / 2.0;
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = t_pdf(lm, df), frm = t_pdf(rm, df);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(a, m, fa, flm, fm, left, df, tol / 2.0, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, df, tol / 2.0, depth - 1);
}

/// Two-sided p by numerically integrating the density on [0, |t|].
double oracle_two_sided_p(double t, double df) {
    const double a = 0.0, b = std::abs(t);
    if (b == 0.0) return 1.0;
    const double fa = t_pdf(a, df), fb = t_pdf(b, df), fm = t_pdf((a + b) / 2.0, df);
    const double whole = simpson(a, b, fa, fm, fb);
    const double integral = adaptive_simpson(a, b, fa, fm, fb, whole, df, 1e-12, 40);
    return 1.0 - 2.0 * integral;
}

// --- brute-force AUC oracle ----------------------------------------------

double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double won = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) won += 1.0;
            else if (scores[i] == scores[j]) won += 0.5;
        }
    }
    return won / static_cast<double>(pairs);
}

ModelConfig bench_config(std::size_t regions, std::size_t windows) {
    ModelConfig c;
    c.regions = regions;
    c.windows = windows;
    c.con1_span = 2;
    c.con2_span = 1;
    c.con3_span = 2;
    c.con1_filters = 4;
    c.con2_filters = 4;
    c.con3_filters = 4;
    c.lstm_hidden = 8;
    c.fc1_width = 8;
    c.fc2_width = 4;
    c.num_classes = 2;
    c.l2_lambda = 1e-4;
    return c;
}

} // namespace

TEST_CASE("174 subjects split into folds of 35,35,35,35,34") {
    std::vector<std::string> scan_subjects;
    for (int s = 0; s < 174; ++s) {
        scan_subjects.push_back("s" + std::to_string(s));
        scan_subjects.push_back("s" + std::to_string(s)); // two scans each
    }
    SplitPlan plan = make_subject_folds(scan_subjects, 5, 42);
    std::map<std::size_t, std::size_t> sizes;
    for (const auto& [subject, fold] : plan.fold_of_subject) sizes[fold]++;
    std::multiset<std::size_t> observed;
    for (const auto& [fold, count] : sizes) observed.insert(count);
    CHECK(observed == std::multiset<std::size_t>{34, 35, 35, 35, 35});
}

TEST_CASE("five subjects give one subject per fold") {
    std::vector<std::string> subjects = {"a", "b", "c", "d", "e"};
    SplitPlan plan = make_subject_folds(subjects, 5, 7);
    std::set<std::size_t> folds;
    for (const auto& [subject, fold] : plan.fold_of_subject) folds.insert(fold);
    CHECK(folds.size() == 5);
}

TEST_CASE("a subject with nine scans lands entirely in one fold") {
    std::vector<std::string> scan_subjects;
    for (int i = 0; i < 9; ++i) scan_subjects.push_back("busy");
    for (int s = 0; s < 10; ++s) scan_subjects.push_back("s" + std::to_string(s));
    SplitPlan plan = make_subject_folds(scan_subjects, 5, 11);
    const std::size_t busy_fold = plan.fold_of_subject.at("busy");
    for (std::size_t f = 0; f < 5; ++f) {
        for (std::size_t idx : plan.folds[f].test) {
            if (scan_subjects[idx] == "busy") CHECK(f == busy_fold);
        }
    }
    // All nine scans appear in exactly the test set of busy_fold.
    std::size_t busy_in_test = 0;
    for (std::size_t idx : plan.folds[busy_fold].test)
        if (scan_subjects[idx] == "busy") ++busy_in_test;
    CHECK(busy_in_test == 9);
}

TEST_CASE("fewer subjects than folds is a config error") {
    std::vector<std::string> subjects = {"a", "b", "c"};
    CHECK_THROWS_AS(make_subject_folds(subjects, 5, 1), ConfigError);
}

TEST_CASE("no subject leaks between train+val and test over 100 seeds") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_subjects = 7 + rng() % 34;
        std::vector<std::string> scan_subjects;
        for (std::size_t s = 0; s < n_subjects; ++s) {
            const std::size_t scans = 1 + rng() % 4;
            for (std::size_t k = 0; k < scans; ++k)
                scan_subjects.push_back("s" + std::to_string(s));
        }
        SplitPlan plan = make_subject_folds(scan_subjects, 5, rng());
        for (const auto& fold : plan.folds) {
            std::set<std::string> train_val, test;
            for (std::size_t i : fold.train) train_val.insert(scan_subjects[i]);
            for (std::size_t i : fold.val) train_val.insert(scan_subjects[i]);
            for (std::size_t i : fold.test) test.insert(scan_subjects[i]);
            for (const auto& s : test) CHECK(train_val.count(s) == 0);
            CHECK(!fold.val.empty());
            CHECK(fold.train.size() + fold.val.size() + fold.test.size() == scan_subjects.size());
        }
    }
}

TEST_CASE("confusion [[3,1],[2,4]] gives ACC 0.7, SEN 4/6, SPE 3/4") {
    std::vector<int> truth, predicted;
    auto push = [&](int t, int p, int count) {
        for (int i = 0; i < count; ++i) {
            truth.push_back(t);
            predicted.push_back(p);
        }
    };
    push(0, 0, 3);
    push(0, 1, 1);
    push(1, 0, 2);
    push(1, 1, 4);
    MetricsReport m = compute_metrics(truth, predicted, {}, 2, 1);
    CHECK(m.accuracy == doctest::Approx(0.7));
    CHECK(m.sensitivity == doctest::Approx(4.0 / 6.0));
    CHECK(m.specificity == doctest::Approx(3.0 / 4.0));
    CHECK(m.confusion_at(0, 0) == 3);
    CHECK(m.confusion_at(1, 0) == 2);
}

TEST_CASE("positive_class selects which recall counts as sensitivity") {
    std::vector<int> truth = {0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    std::vector<int> predicted = {0, 0, 0, 1, 0, 0, 1, 1, 1, 1};
    MetricsReport pos1 = compute_metrics(truth, predicted, {}, 2, 1);
    MetricsReport pos0 = compute_metrics(truth, predicted, {}, 2, 0);
    CHECK(pos1.sensitivity == doctest::Approx(4.0 / 6.0));
    CHECK(pos1.specificity == doctest::Approx(3.0 / 4.0));
    CHECK(pos0.sensitivity == doctest::Approx(3.0 / 4.0));
    CHECK(pos0.specificity == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("a perfect predictor scores one everywhere") {
    std::vector<int> truth = {0, 1, 0, 1, 1};
    MetricsReport m = compute_metrics(truth, truth, {}, 2, 1);
    CHECK(m.accuracy == 1.0);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 1.0);
}

TEST_CASE("an all-one-class predictor has recall one for that class and zero for the other") {
    std::vector<int> truth = {0, 1, 0, 1};
    std::vector<int> predicted = {1, 1, 1, 1};
    MetricsReport m = compute_metrics(truth, predicted, {}, 2, 1);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 0.0);
}

TEST_CASE("binary accuracy decomposes as (SEN*P + SPE*N) / (P+N)") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> truth, predicted;
        const std::size_t n = 4 + rng() % 20;
        bool has_both = false;
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(static_cast<int>(rng() % 2));
            predicted.push_back(static_cast<int>(rng() % 2));
        }
        truth[0] = 0;
        truth[1] = 1; // both classes present
        MetricsReport m = compute_metrics(truth, predicted, {}, 2, 1);
        std::size_t pos = 0, neg = 0;
        for (int t : truth) (t == 1 ? pos : neg)++;
        const double expected =
            (m.sensitivity * static_cast<double>(pos) + m.specificity * static_cast<double>(neg)) /
            static_cast<double>(pos + neg);
        CHECK(m.accuracy == doctest::Approx(expected).epsilon(1e-12));
        (void)has_both;
    }
}

TEST_CASE("multi-class per-class accuracy is that class's recall") {
    std::vector<int> truth = {0, 0, 1, 1, 2, 3};
    std::vector<int> predicted = {0, 1, 1, 1, 0, 3};
    MetricsReport m = compute_metrics(truth, predicted, {}, 4, 1);
    CHECK(m.per_class_recall[0] == doctest::Approx(0.5));
    CHECK(m.per_class_recall[1] == doctest::Approx(1.0));
    CHECK(m.per_class_recall[2] == doctest::Approx(0.0));
    CHECK(m.per_class_recall[3] == doctest::Approx(1.0));
    CHECK(m.accuracy == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("compute_metrics rejects an empty sample set") {
    CHECK_THROWS_AS(compute_metrics({}, {}, {}, 2, 1), ConfigError);
}

TEST_CASE("roc_auc reproduces the 0.75 textbook example") {
    std::vector<double> scores = {0.1, 0.4, 0.35, 0.8};
    std::vector<int> labels = {0, 0, 1, 1};
    CHECK(roc_auc(scores, labels) == doctest::Approx(0.75));
}

TEST_CASE("roc_auc is one for separated scores and a half for all ties") {
    std::vector<double> separated = {0.1, 0.2, 0.8, 0.9};
    std::vector<int> labels = {0, 0, 1, 1};
    CHECK(roc_auc(separated, labels) == 1.0);
    std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
    CHECK(roc_auc(flat, labels) == 0.5);
}

TEST_CASE("roc_auc rejects single-class input") {
    std::vector<double> scores = {0.1, 0.2};
    std::vector<int> labels = {1, 1};
    CHECK_THROWS_AS(roc_auc(scores, labels), ConfigError);
}

TEST_CASE("roc_auc equals exhaustive pair counting on all small inputs") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 2 + rng() % 11; // up to 12 samples
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng() % 6) / 5.0; // coarse grid forces ties
            labels[i] = static_cast<int>(rng() % 2);
        }
        labels[0] = 0;
        labels[n - 1] = 1;
        CHECK(roc_auc(scores, labels) == doctest::Approx(brute_auc(scores, labels)).epsilon(1e-15));
    }
}

TEST_CASE("roc_points spans (0,0) to (1,1) and is monotone") {
    std::vector<double> scores = {0.1, 0.4, 0.35, 0.8, 0.8};
    std::vector<int> labels = {0, 0, 1, 1, 0};
    auto points = roc_points(scores, labels);
    CHECK(points.front() == std::pair<double, double>{0.0, 0.0});
    CHECK(points.back() == std::pair<double, double>{1.0, 1.0});
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].first >= points[i - 1].first);
        CHECK(points[i].second >= points[i - 1].second);
    }
}

TEST_CASE("identical groups produce t = 0 and p = 1") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    TTestResult r = two_sample_ttest(a, a);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("zero variance with distinct means is degenerate with p = 0") {
    std::vector<double> a = {0.0, 0.0, 0.0, 0.0};
    std::vector<double> b = {1.0, 1.0, 1.0, 1.0};
    TTestResult r = two_sample_ttest(a, b);
    CHECK(r.degenerate);
    CHECK(r.p == 0.0);
    CHECK(std::isinf(r.t));
}

TEST_CASE("the hand case {1..5} vs {3..7} matches the quadrature oracle") {
    std::vector<double> a = {1, 2, 3, 4, 5};
    std::vector<double> b = {3, 4, 5, 6, 7};
    TTestResult r = two_sample_ttest(a, b);
    CHECK(r.t == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(oracle_two_sided_p(-2.0, 8.0)).epsilon(1e-6));
}

TEST_CASE("t-test p-values match the quadrature oracle over |t| <= 10, df <= 100") {
    for (double t : {0.0, 0.3, 0.5, 1.0, 1.7, 2.0, 3.3, 5.0, 7.5, 10.0}) {
        for (double df : {1.0, 2.0, 3.0, 5.0, 8.0, 10.0, 30.0, 64.0, 100.0}) {
            const double ours = student_t_two_sided_p(t, df);
            const double oracle = oracle_two_sided_p(t, df);
            CHECK(std::abs(ours - oracle) < 1e-6);
        }
    }
}

TEST_CASE("feature_ttest ranks features by ascending p") {
    // Feature 1 separates the groups, feature 0 does not.
    std::vector<std::vector<double>> a = {{0.1, 10.0}, {-0.1, 11.0}, {0.0, 10.5}};
    std::vector<std::vector<double>> b = {{0.05, 1.0}, {-0.05, 0.5}, {0.0, 1.5}};
    TTestReport r = feature_ttest(a, b);
    REQUIRE(r.features.size() == 2);
    CHECK(r.features[0].feature == 1);
    CHECK(r.features[0].rank == 1);
    CHECK(r.features[1].feature == 0);
    CHECK(r.features[0].p < r.features[1].p);
    CHECK(r.group_a_size == 3);
}

TEST_CASE("synth with zero noise and one all-region block correlates at one") {
    SynthSpec spec;
    spec.regions = 4;
    spec.time_points = 24;
    spec.subjects_per_class = 1;
    spec.scans_per_subject = 1;
    spec.noise = 0.0;
    spec.seed = 5;
    spec.classes = {
        {"a", {{{0, 1, 2, 3}, 0.9}}},
        {"b", {{{0, 1, 2, 3}, 0.9}}},
    };
    Dataset ds = synth_generate(spec);
    DfcnTensor f = build_dfcn(ds.scans[0], {12, 6});
    for (std::size_t t = 0; t < f.windows; ++t)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(f.at(t, i, j) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("disjoint planted blocks separate classes with a mean-correlation probe") {
    SynthSpec spec = default_benchmark_spec();
    spec.subjects_per_class = 6;
    spec.scans_per_subject = 2;
    spec.time_points = 60;
    spec.regions = 16;
    spec.noise = 0.3;
    spec.seed = 77;
    Dataset ds = synth_generate(spec);
    // Probe: mean correlation inside the class-0 block across all windows.
    std::vector<double> probe_class0, probe_class1;
    const auto& block = spec.classes[0].blocks[0].regions;
    for (const auto& ts : ds.scans) {
        DfcnTensor f = build_dfcn(ts, {20, 10});
        double mean = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < f.windows; ++t)
            for (std::size_t a = 0; a < block.size(); ++a)
                for (std::size_t b = a + 1; b < block.size(); ++b) {
                    mean += f.at(t, block[a], block[b]);
                    ++count;
                }
        mean /= static_cast<double>(count);
        (ts.label == 0 ? probe_class0 : probe_class1).push_back(mean);
    }
    const double min0 = *std::min_element(probe_class0.begin(), probe_class0.end());
    const double max1 = *std::max_element(probe_class1.begin(), probe_class1.end());
    CHECK(min0 > max1); // perfectly separable
}

TEST_CASE("synth generation is bit-identical under the same seed") {
    SynthSpec spec = default_benchmark_spec();
    spec.subjects_per_class = 2;
    spec.scans_per_subject = 2;
    spec.time_points = 30;
    spec.seed = 99;
    Dataset a = synth_generate(spec);
    Dataset b = synth_generate(spec);
    REQUIRE(a.scans.size() == b.scans.size());
    for (std::size_t i = 0; i < a.scans.size(); ++i) CHECK(a.scans[i].values == b.scans[i].values);
}

TEST_CASE("synth rejects out-of-range block regions") {
    SynthSpec spec = default_benchmark_spec();
    spec.regions = 8; // default blocks reference region 13
    CHECK_THROWS_AS(synth_generate(spec), ConfigError);
}

TEST_CASE("train_fold with zero epochs returns initial params and empty history") {
    SynthSpec spec = default_benchmark_spec();
    spec.subjects_per_class = 3;
    spec.scans_per_subject = 1;
    spec.time_points = 30;
    spec.seed = 3;
    Dataset ds = synth_generate(spec);
    std::vector<DfcnTensor> scans;
    for (const auto& ts : ds.scans) scans.push_back(build_dfcn(ts, {10, 10}));

    FoldPlan plan;
    for (std::size_t i = 0; i + 1 < scans.size(); ++i) plan.train.push_back(i);
    plan.val.push_back(scans.size() - 1);
    TrainHyper hyper;
    hyper.epochs = 0;
    FoldResult result = train_fold(scans, plan, bench_config(16, 3), hyper, 1);
    CHECK(result.history.empty());
    CHECK_FALSE(result.best_epoch.has_value());
}

TEST_CASE("an over-parameterized model memorizes eight planted scans") {
    SynthSpec spec = default_benchmark_spec();
    spec.subjects_per_class = 2;
    spec.scans_per_subject = 2;
    spec.time_points = 45;
    spec.regions = 16;
    spec.noise = 0.5;
    spec.seed = 13;
    Dataset ds = synth_generate(spec);
    std::vector<DfcnTensor> scans;
    for (const auto& ts : ds.scans) scans.push_back(build_dfcn(ts, {15, 10})); // T = 4

    FoldPlan plan;
    for (std::size_t i = 0; i < scans.size(); ++i) plan.train.push_back(i);
    plan.val.push_back(0);

    ModelConfig cfg = bench_config(16, 4);
    cfg.dropout_conv = 0.0; // memorization oracle wants a deterministic fit
    cfg.dropout_lstm = 0.0;
    TrainHyper hyper;
    hyper.epochs = 200;
    hyper.batch = 4;
    FoldResult result = train_fold(scans, plan, cfg, hyper, 21);
    double best_loss = result.history.front().train_loss;
    for (const auto& e : result.history) best_loss = std::min(best_loss, e.train_loss);
    CHECK(best_loss < 0.1);
}

TEST_CASE("training twice with one seed yields identical loss curves") {
    SynthSpec spec = default_benchmark_spec();
    spec.subjects_per_class = 3;
    spec.scans_per_subject = 1;
    spec.time_points = 30;
    spec.seed = 31;
    Dataset ds = synth_generate(spec);
    std::vector<DfcnTensor> scans;
    for (const auto& ts : ds.scans) scans.push_back(build_dfcn(ts, {10, 10})); // T = 3

    FoldPlan plan;
    for (std::size_t i = 0; i + 2 < scans.size(); ++i) plan.train.push_back(i);
    plan.val.push_back(scans.size() - 2);
    plan.test.push_back(scans.size() - 1);

    ModelConfig cfg = bench_config(16, 3);
    TrainHyper hyper;
    hyper.epochs = 4;
    hyper.batch = 2;
    FoldResult a = train_fold(scans, plan, cfg, hyper, 55);
    FoldResult b = train_fold(scans, plan, cfg, hyper, 55);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].train_loss == b.history[e].train_loss);
        CHECK(a.history[e].val_loss == b.history[e].val_loss);
    }
}

TEST_CASE("training aborts with the epoch index when the loss leaves the finite range") {
    ModelConfig cfg = bench_config(4, 3);
    DfcnTensor poison;
    poison.subject_id = "p";
    poison.scan_id = "p_r0";
    poison.label = 0;
    poison.windows = 3;
    poison.regions = 4;
    poison.values.assign(3 * 4 * 4, 1e300);
    DfcnTensor ok = poison;
    ok.label = 1;
    std::vector<DfcnTensor> scans = {poison, ok};
    FoldPlan plan;
    plan.train = {0, 1};
    plan.val = {1};
    TrainHyper hyper;
    hyper.epochs = 2;
    CHECK_THROWS_WITH_AS(train_fold(scans, plan, cfg, hyper, 5), doctest::Contains("epoch 0"),
                         NumericError);
}

TEST_CASE("extract_attention of a zeroed query/key checkpoint is uniform and exported files reload") {
    ModelConfig cfg = bench_config(8, 4);
    ModelParams params = ModelParams::init(cfg, 7);
    for (std::size_t c = 0; c < cfg.con1_filters; ++c) {
        params.dca.w_q.at(c) = 0.0;
        params.dca.w_k.at(c) = 0.0;
    }
    std::mt19937_64 rng(9);
    DfcnTensor f;
    f.subject_id = "s";
    f.scan_id = "s_r0";
    f.label = 0;
    f.windows = 4;
    f.regions = 8;
    f.values.resize(4 * 8 * 8);
    for (auto& v : f.values) v = 2.0 * testutil::uniform01(rng) - 1.0;

    AttentionScores scores = extract_attention(params, f);
    REQUIRE(scores.channels.size() == cfg.con1_filters);
    for (const auto& channel : scores.channels)
        for (double v : channel) CHECK(v == doctest::Approx(1.0 / 8.0).epsilon(1e-9));

    auto dir = testutil::make_temp_dir("attn");
    for (std::size_t ch = 0; ch < scores.channels.size(); ++ch) {
        write_attention_csv(dir / ("attn_ch" + std::to_string(ch) + ".csv"), 8, scores.channels[ch]);
        write_attention_svg(dir / ("attn_ch" + std::to_string(ch) + ".svg"), 8, scores.channels[ch]);
    }
    std::size_t csv_count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") ++csv_count;
    }
    CHECK(csv_count == cfg.con1_filters);

    auto reloaded = read_attention_csv(dir / "attn_ch0.csv", 8);
    for (std::size_t i = 0; i < 8; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 8; ++j) row += reloaded[i * 8 + j];
        CHECK(std::abs(row - 1.0) < 1e-6);
    }
}

TEST_CASE("extract_attention refuses a model without the DCA layer") {
    ModelConfig cfg = bench_config(8, 4);
    cfg.dca_enabled = false;
    ModelParams params = ModelParams::init(cfg, 7);
    DfcnTensor f;
    f.windows = 4;
    f.regions = 8;
    f.label = 0;
    f.values.assign(4 * 8 * 8, 0.1);
    CHECK_THROWS_AS(extract_attention(params, f), ConfigError);
}
