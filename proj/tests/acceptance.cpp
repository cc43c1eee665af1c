// Acceptance suite: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "checkpoint.hpp"
#include "dfcn.hpp"
#include "error.hpp"
#include "folds.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "runner.hpp"
#include "stats.hpp"
#include "synth.hpp"
#include "trainer.hpp"

using namespace dcacrn;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    explicit Failure(const std::string& msg) : std::runtime_error(msg) {}
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

fs::path scratch_dir(const std::string& hint) {
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = fs::temp_directory_path() / ("dcacrn_accept_" + hint + "_" + std::to_string(rng()));
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------- 1: shapes

std::string criterion_shapes() {
    ModelConfig cfg; // reference geometry: n=116 t=34 s1=2 s2=1 s3=8 k1=5 k2=16 c1=32
    expect(cfg.u1() == 33, "u1 should be 33");
    expect(cfg.u2() == 13, "u2 should be 13");
    ModelParams params = ModelParams::init(cfg, 1);

    std::mt19937_64 rng(2);
    DfcnTensor f;
    f.windows = cfg.windows;
    f.regions = cfg.regions;
    f.label = 0;
    f.values.resize(cfg.windows * cfg.regions * cfg.regions);
    for (auto& v : f.values) v = 2.0 * uniform01(rng) - 1.0;

    ForwardOptions opts;
    Tensor y1 = con1_forward(f, params, opts);
    expect(y1.shape() == std::vector<std::size_t>{32, 116, 33}, "con1 output must be 32x116x33");
    Tensor yd = dca_forward(y1, params, nullptr);
    expect(yd.shape() == std::vector<std::size_t>{32, 116, 33}, "dca output must be 32x116x33");
    Tensor y2 = con2_forward(yd, params, opts);
    expect(y2.shape() == std::vector<std::size_t>{5, 1, 33}, "con2 output must be 5x1x33");
    Tensor y3 = con3_forward(y2, params, opts);
    expect(y3.shape() == std::vector<std::size_t>{16, 1, 13}, "con3 output must be 16x1x13");
    // The recurrent head consumes u2=13 steps of k2=16 features each.
    expect(params.lstm.w_input.shape() == std::vector<std::size_t>{4 * 48, 16},
           "lstm must consume 16 features per step");
    Tensor logits = temporal_head_forward(y3, params, opts);
    expect(logits.shape() == std::vector<std::size_t>{2, 1}, "logits must be num_classes x 1");
    return "34x116x116 -> 32x116x33 -> 5x1x33 -> 16x1x13 -> 13 steps x 16 -> 2";
}

// --------------------------------------------------------------- 2: oracles

double brute_pearson(const RoiTimeSeries& ts, std::size_t row0, std::size_t len, std::size_t j,
                     std::size_t k) {
    double mj = 0.0, mk = 0.0;
    for (std::size_t r = 0; r < len; ++r) {
        mj += ts.at(row0 + r, j);
        mk += ts.at(row0 + r, k);
    }
    mj /= static_cast<double>(len);
    mk /= static_cast<double>(len);
    double cov = 0.0, vj = 0.0, vk = 0.0;
    for (std::size_t r = 0; r < len; ++r) {
        const double dj = ts.at(row0 + r, j) - mj;
        const double dk2 = ts.at(row0 + r, k) - mk;
        cov += dj * dk2;
        vj += dj * dj;
        vk += dk2 * dk2;
    }
    return (cov / static_cast<double>(len)) /
           (std::sqrt(vj / static_cast<double>(len)) * std::sqrt(vk / static_cast<double>(len)));
}

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

double quadrature_two_sided_p(double t, double df) {
    const double b = std::abs(t);
    if (b == 0.0) return 1.0;
    const double fa = t_pdf(0.0, df), fb = t_pdf(b, df), fm = t_pdf(b / 2.0, df);
    const double whole = simpson(0.0, b, fa, fm, fb);
    return 1.0 - 2.0 * adaptive_simpson(0.0, b, fa, fm, fb, whole, df, 1e-12, 40);
}

std::string criterion_oracles() {
    // Pearson vs the direct covariance/sigma evaluation, 1000 random windows.
    std::mt19937_64 rng(11);
    std::size_t windows_checked = 0;
    while (windows_checked < 1000) {
        const std::size_t n = 4 + rng() % 7;
        const std::size_t m = 24 + rng() % 40;
        RoiTimeSeries ts;
        ts.time_points = m;
        ts.regions = n;
        ts.values.resize(m * n);
        for (auto& v : ts.values) v = 2.0 * uniform01(rng) - 1.0;
        const std::size_t len = 8 + rng() % (m - 8);
        for (std::size_t w = 0; w < 10 && windows_checked < 1000; ++w) {
            const std::size_t row0 = rng() % (m - len + 1);
            const auto matrix = pearson_matrix(ts, row0, len);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) {
                    const double direct = brute_pearson(ts, row0, len, j, k);
                    expect(std::abs(matrix[j * n + k] - direct) <= 1e-12,
                           "pearson deviates from the direct evaluation beyond 1e-12");
                }
            ++windows_checked;
        }
    }

    // AUC vs exhaustive pair counting on every size up to 12.
    for (std::size_t n = 2; n <= 12; ++n) {
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> scores(n);
            std::vector<int> labels(n);
            for (std::size_t i = 0; i < n; ++i) {
                scores[i] = static_cast<double>(rng() % 7) / 6.0;
                labels[i] = static_cast<int>(rng() % 2);
            }
            labels[0] = 0;
            labels[n - 1] = 1;
            const double fast = roc_auc(scores, labels);
            const double brute = brute_auc(scores, labels);
            expect(fast == brute, "roc_auc differs from exhaustive pair counting");
        }
    }

    // t-test p-values vs adaptive quadrature of the density.
    for (double t : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 8.0, 10.0}) {
        for (double df : {1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 12.0, 20.0, 40.0, 64.0, 100.0}) {
            const double ours = student_t_two_sided_p(t, df);
            const double oracle = quadrature_two_sided_p(t, df);
            expect(std::abs(ours - oracle) <= 1e-6, "t-test p deviates from quadrature beyond 1e-6");
        }
    }
    return "1000 pearson windows, 3300 auc sets, 121 p-values";
}

// ------------------------------------------------------------- 3: gradients

ModelConfig tiny_config() {
    ModelConfig c;
    c.regions = 6;
    c.windows = 5;
    c.con1_span = 2;
    c.con2_span = 1;
    c.con3_span = 2;
    c.con1_filters = 2;
    c.con2_filters = 2;
    c.con3_filters = 2;
    c.lstm_hidden = 4;
    c.fc1_width = 4;
    c.fc2_width = 3;
    c.num_classes = 2;
    c.dropout_conv = 0.0; // zero rates keep the loss a deterministic function
    c.dropout_lstm = 0.0;
    c.l2_lambda = 1e-4;
    return c;
}

DfcnTensor random_dfcn(std::mt19937_64& rng, std::size_t windows, std::size_t regions) {
    DfcnTensor f;
    f.windows = windows;
    f.regions = regions;
    f.label = 0;
    f.values.assign(windows * regions * regions, 0.0);
    for (std::size_t t = 0; t < windows; ++t)
        for (std::size_t i = 0; i < regions; ++i) {
            f.at(t, i, i) = 1.0;
            for (std::size_t j = i + 1; j < regions; ++j) {
                const double v = 2.0 * uniform01(rng) - 1.0;
                f.at(t, i, j) = v;
                f.at(t, j, i) = v;
            }
        }
    return f;
}

std::string criterion_gradients() {
    ModelConfig cfg = tiny_config();
    ModelParams params = ModelParams::init(cfg, 3);
    std::mt19937_64 rng(5);
    DfcnTensor f0 = random_dfcn(rng, cfg.windows, cfg.regions);
    DfcnTensor f1 = random_dfcn(rng, cfg.windows, cfg.regions);
    const std::vector<const DfcnTensor*> batch = {&f0, &f1};
    const std::vector<std::size_t> labels = {0, 1};

    auto forward_loss = [&]() -> Tensor {
        ForwardOptions opts;
        opts.training = true;
        Tensor logits = model_forward_batch(batch, params, opts);
        return cross_entropy_with_l2(logits, labels, cfg.l2_lambda, params.fc_out.weight);
    };

    auto named = params.trainable();
    for (auto& nt : named) nt.tensor.zero_grad();
    {
        Tape tape;
        Tensor loss = forward_loss();
        tape.backward(loss);
    }

    const double h = 1e-5;
    std::size_t checked = 0;
    for (auto& nt : named) {
        for (std::size_t i = 0; i < nt.tensor.size(); ++i) {
            const double saved = nt.tensor.at(i);
            nt.tensor.at(i) = saved + h;
            const double up = forward_loss().item();
            nt.tensor.at(i) = saved - h;
            const double down = forward_loss().item();
            nt.tensor.at(i) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double ad = nt.tensor.grad()[i];
            const double err = std::abs(ad - fd);
            const double allowed = 1e-4 * std::max(std::abs(ad), std::abs(fd)) + 1e-7;
            if (err > allowed) {
                std::ostringstream os;
                os << nt.name << "[" << i << "]: autodiff " << ad << " vs finite difference " << fd;
                throw Failure(os.str());
            }
            ++checked;
        }
    }
    expect(checked >= 200, "trainable parameter sweep looks too small");
    return std::to_string(checked) + " parameters checked";
}

// ------------------------------------------------------- 4: DCA structure

std::string criterion_dca_structure() {
    ModelConfig cfg = tiny_config();
    cfg.regions = 8;
    cfg.con1_filters = 3;
    ModelParams params = ModelParams::init(cfg, 7);
    std::mt19937_64 rng(9);

    // Attention rows sum to one for every channel of a live forward pass.
    Tensor input = Tensor::zeros({cfg.con1_filters, cfg.regions, cfg.u1()});
    for (std::size_t i = 0; i < input.size(); ++i) input.at(i) = 3.0 * uniform01(rng);
    AttentionScores scores;
    dca_reconstruct(input, params, &scores);
    expect(scores.channels.size() == cfg.con1_filters, "one score matrix per channel");
    for (const auto& channel : scores.channels)
        for (std::size_t i = 0; i < cfg.regions; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < cfg.regions; ++j) row += channel[i * cfg.regions + j];
            expect(std::abs(row - 1.0) <= 1e-6, "attention row does not sum to 1 within 1e-6");
        }

    // Zero value weights reduce the reconstruction to a bitwise residual.
    for (std::size_t c = 0; c < cfg.con1_filters; ++c) params.dca.w_v.at(c) = 0.0;
    Tensor out = dca_reconstruct(input, params, nullptr);
    for (std::size_t i = 0; i < input.size(); ++i)
        expect(out.at(i) == input.at(i), "zero-value DCA must be the identity pre-normalization");

    // Enabling DCA adds exactly 3*C1 parameters (6*C1 with biases).
    ModelConfig off = cfg;
    off.dca_enabled = false;
    const std::size_t with = count_parameters(ModelParams::init(cfg, 1).trainable()).total;
    const std::size_t without = count_parameters(ModelParams::init(off, 1).trainable()).total;
    expect(with - without == 3 * cfg.con1_filters, "DCA parameter delta must be exactly 3*c1");
    ModelConfig biased = cfg;
    biased.dca_bias = true;
    const std::size_t with_bias = count_parameters(ModelParams::init(biased, 1).trainable()).total;
    expect(with_bias - without == 6 * cfg.con1_filters,
           "biased DCA parameter delta must be exactly 6*c1");
    return "rows stochastic, residual bitwise, delta 3*c1 (6*c1 biased)";
}

// ----------------------------------------------------------- 5: learnability

struct BenchmarkOutcome {
    double mean_test_accuracy = 0.0;
};

BenchmarkOutcome run_benchmark(bool shuffle_labels, std::uint64_t seed) {
    SynthSpec spec = default_benchmark_spec(); // two disjoint rho=0.9 blocks
    spec.subjects_per_class = 20;
    spec.scans_per_subject = 2;
    spec.time_points = 60;
    spec.regions = 16;
    spec.noise = 1.0;
    spec.seed = derive_seed(seed, 0xda7a);
    Dataset ds = synth_generate(spec);

    if (shuffle_labels) {
        // Permute labels at the subject level so scans of one subject stay
        // consistent while the planted structure decouples from the target.
        std::vector<std::string> subjects;
        for (const auto& ts : ds.scans)
            if (subjects.empty() || subjects.back() != ts.subject_id) subjects.push_back(ts.subject_id);
        std::map<std::string, int> label_of;
        for (const auto& ts : ds.scans) label_of[ts.subject_id] = ts.label;
        std::vector<int> labels;
        for (const auto& s : subjects) labels.push_back(label_of[s]);
        std::mt19937_64 rng(derive_seed(seed, 0x5f));
        for (std::size_t i = labels.size(); i > 1; --i)
            std::swap(labels[i - 1], labels[rng() % i]);
        std::map<std::string, int> shuffled;
        for (std::size_t i = 0; i < subjects.size(); ++i) shuffled[subjects[i]] = labels[i];
        for (auto& ts : ds.scans) ts.label = shuffled[ts.subject_id];
    }

    WindowSpec window{20, 10}; // M=60 -> T=5
    std::vector<DfcnTensor> scans;
    scans.reserve(ds.scans.size());
    for (const auto& ts : ds.scans) scans.push_back(build_dfcn(ts, window));

    ModelConfig cfg;
    cfg.regions = 16;
    cfg.windows = 5;
    cfg.con1_span = 2;
    cfg.con2_span = 1;
    cfg.con3_span = 2;
    cfg.con1_filters = 4;
    cfg.con2_filters = 4;
    cfg.con3_filters = 4;
    cfg.lstm_hidden = 8;
    cfg.fc1_width = 8;
    cfg.fc2_width = 4;
    cfg.num_classes = 2;
    cfg.l2_lambda = 1e-4;

    std::vector<std::string> subjects;
    for (const auto& s : scans) subjects.push_back(s.subject_id);
    SplitPlan plan = make_subject_folds(subjects, 5, derive_seed(seed, 0xf01d));

    TrainHyper hyper;
    hyper.epochs = 60;
    hyper.batch = 16;
    hyper.lr = 1e-3;

    double acc_sum = 0.0;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        FoldResult result = train_fold(scans, plan.folds[f], cfg, hyper, derive_seed(seed, 100 + f));
        EvalOutcome outcome = evaluate_scans(result.params, scans, plan.folds[f].test, 1);
        acc_sum += outcome.metrics.accuracy;
    }
    return {acc_sum / static_cast<double>(plan.folds.size())};
}

std::string criterion_learnability() {
    const BenchmarkOutcome planted = run_benchmark(false, 2024);
    expect(planted.mean_test_accuracy >= 0.90,
           "planted benchmark accuracy " + std::to_string(planted.mean_test_accuracy) + " < 0.90");
    // The control aggregates a few independent shuffles; a single draw can
    // ride per-fold class imbalance well away from chance.
    double control = 0.0;
    const int control_runs = 3;
    for (int k = 0; k < control_runs; ++k) {
        control += run_benchmark(true, derive_seed(2024, 7000 + k)).mean_test_accuracy;
    }
    control /= control_runs;
    expect(control >= 0.35 && control <= 0.65,
           "label-shuffled control accuracy " + std::to_string(control) + " outside [0.35, 0.65]");
    char buf[96];
    std::snprintf(buf, sizeof buf, "planted=%.3f control=%.3f", planted.mean_test_accuracy, control);
    return buf;
}

// ------------------------------------------------------------ 6: determinism

std::string criterion_determinism() {
    const fs::path root = scratch_dir("determinism");
    const fs::path out = root / "run";

    nlohmann::json cfg;
    cfg["seed"] = 31;
    cfg["out"] = out.string();
    cfg["window"] = {{"length", 10}, {"stride", 10}};
    cfg["model"] = {{"n", 16}, {"t", 3}, {"s1", 2}, {"s2", 1}, {"s3", 2},
                    {"c1", 2}, {"k1", 2}, {"k2", 2}, {"lstm_hidden", 4},
                    {"fc1", 4}, {"fc2", 3}, {"num_classes", 2}};
    cfg["train"] = {{"epochs", 3}, {"batch", 4}, {"lr", 1e-3}, {"folds", 2}};
    cfg["synth"] = {{"subjects_per_class", 4}, {"scans_per_subject", 1}, {"m", 30},
                    {"n", 16},                 {"noise", 0.5}};

    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    };

    run_command("train", cfg);
    const std::string manifest_a = slurp(out / "manifest.json");
    const std::string checkpoint_a = slurp(out / "fold0.dcaw");
    fs::remove_all(out);
    run_command("train", cfg);
    expect(slurp(out / "manifest.json") == manifest_a, "manifests differ across identical runs");
    expect(slurp(out / "fold0.dcaw") == checkpoint_a, "checkpoints differ across identical runs");
    fs::remove_all(root);
    return "manifest and checkpoint bytes identical";
}

// ---------------------------------------------------------- 7: serialization

std::string criterion_serialization() {
    const fs::path root = scratch_dir("serial");
    std::mt19937_64 rng(41);

    // dFCN round trip at f32.
    RoiTimeSeries ts;
    ts.subject_id = "s0";
    ts.scan_id = "s0_r0";
    ts.label = 1;
    ts.time_points = 48;
    ts.regions = 12;
    ts.values.resize(48 * 12);
    for (auto& v : ts.values) v = 2.0 * uniform01(rng) - 1.0;
    DfcnTensor f = build_dfcn(ts, {16, 8});
    write_dfcn(root / "a.dfcn", f);
    DfcnTensor g = read_dfcn(root / "a.dfcn");
    expect(g.windows == f.windows && g.regions == f.regions && g.label == f.label &&
               g.subject_id == f.subject_id,
           "dFCN metadata must round trip exactly");
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        expect(g.values[i] == static_cast<double>(static_cast<float>(f.values[i])),
               "dFCN values must round trip bit-exactly at f32");
    }

    // Checkpoint round trip at f32.
    ModelConfig cfg = tiny_config();
    ModelParams params = ModelParams::init(cfg, 17);
    save_checkpoint(root / "m.dcaw", params);
    ModelParams loaded = load_checkpoint(root / "m.dcaw", cfg);
    auto a = params.trainable();
    auto b = loaded.trainable();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t v = 0; v < a[i].tensor.size(); ++v)
            expect(b[i].tensor.at(v) == static_cast<double>(static_cast<float>(a[i].tensor.at(v))),
                   "checkpoint values must round trip bit-exactly at f32");

    // Corruption is rejected with located errors.
    auto corrupt = [&](const fs::path& src, const fs::path& dst, std::size_t offset, char value) {
        std::ifstream in(src, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes[offset] = value;
        std::ofstream outp(dst, std::ios::binary);
        outp.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    corrupt(root / "a.dfcn", root / "bad_magic.dfcn", 0, 'Q');
    bool threw = false;
    try {
        read_dfcn(root / "bad_magic.dfcn");
    } catch (const DataError& e) {
        threw = std::string(e.what()).find("offset 0") != std::string::npos;
    }
    expect(threw, "bad magic must raise a located data error");

    corrupt(root / "m.dcaw", root / "bad_ver.dcaw", 4, 9);
    threw = false;
    try {
        load_checkpoint(root / "bad_ver.dcaw", cfg);
    } catch (const DataError& e) {
        threw = std::string(e.what()).find("unsupported checkpoint version") != std::string::npos;
    }
    expect(threw, "version bump must raise an unsupported-version error");

    {
        std::ifstream in(root / "a.dfcn", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream outp(root / "trunc.dfcn", std::ios::binary);
        outp.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 3));
    }
    threw = false;
    try {
        read_dfcn(root / "trunc.dfcn");
    } catch (const DataError& e) {
        threw = std::string(e.what()).find("offset") != std::string::npos;
    }
    expect(threw, "truncation must raise a located data error");
    fs::remove_all(root);
    return "round trips bit-exact at f32, corruption errors carry offsets";
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "shape fidelity at the reference geometry", criterion_shapes},
        {2, "oracle equivalence (pearson, auc, t-test)", criterion_oracles},
        {3, "finite-difference gradient integrity", criterion_gradients},
        {4, "DCA structural claims", criterion_dca_structure},
        {5, "planted-benchmark learnability with shuffled control", criterion_learnability},
        {6, "seeded determinism of manifests and checkpoints", criterion_determinism},
        {7, "bit-exact serialization and located corruption errors", criterion_serialization},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                    seconds, detail.empty() ? "" : (ok ? " | " : " -- "), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
