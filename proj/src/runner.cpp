#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "attention_export.hpp"
#include "checkpoint.hpp"
#include "error.hpp"
#include "stats.hpp"
#include "trainer.hpp"

namespace dcacrn {

namespace fs = std::filesystem;

namespace {

std::size_t json_size(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    const auto n = v.get<long long>();
    if (n < 0) throw ConfigError("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(n);
}

WindowSpec window_from_json(const nlohmann::json& j) {
    WindowSpec w;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "length") w.length = json_size(it.value(), "window.length");
        else if (it.key() == "stride") w.stride = json_size(it.value(), "window.stride");
        else throw ConfigError("window config: unknown key '" + it.key() + "'");
    }
    w.validate();
    return w;
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    RunConfig c;
    bool saw_seed = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const nlohmann::json& v = it.value();
        if (key == "seed") {
            if (!v.is_number_integer() && !v.is_number_unsigned()) {
                throw ConfigError("config key 'seed' must be an unsigned integer");
            }
            c.seed = v.get<std::uint64_t>();
            saw_seed = true;
        } else if (key == "out") {
            c.out = v.get<std::string>();
        } else if (key == "data") {
            c.data = fs::path(v.get<std::string>());
        } else if (key == "checkpoint") {
            c.checkpoint = fs::path(v.get<std::string>());
        } else if (key == "labels") {
            if (!v.is_object()) throw ConfigError("config key 'labels' must map group names to integers");
            for (auto lit = v.begin(); lit != v.end(); ++lit) c.labels[lit.key()] = lit.value().get<int>();
        } else if (key == "positive_class") {
            c.positive_class = v.get<int>();
        } else if (key == "window") {
            c.window = window_from_json(v);
        } else if (key == "model") {
            c.model = ModelConfig::from_json(v);
        } else if (key == "train") {
            for (auto tit = v.begin(); tit != v.end(); ++tit) {
                if (tit.key() == "epochs") c.epochs = json_size(tit.value(), "train.epochs");
                else if (tit.key() == "batch") c.batch = json_size(tit.value(), "train.batch");
                else if (tit.key() == "lr") c.lr = tit.value().get<double>();
                else if (tit.key() == "folds") c.folds = json_size(tit.value(), "train.folds");
                else throw ConfigError("train config: unknown key '" + tit.key() + "'");
            }
        } else if (key == "synth") {
            c.synth = SynthSpec::from_json(v);
        } else {
            throw ConfigError("run config: unknown key '" + key + "'");
        }
    }
    if (!saw_seed) throw ConfigError("config key 'seed' is required (no wall-clock default)");
    if (c.out.empty()) throw ConfigError("config key 'out' is required");
    if (c.batch < 1) throw ConfigError("config key 'train.batch' must be >= 1");
    if (c.lr <= 0.0) throw ConfigError("config key 'train.lr' must be positive");
    if (c.positive_class < 0 || static_cast<std::size_t>(c.positive_class) >= c.model.num_classes) {
        throw ConfigError("config key 'positive_class' must name a class index");
    }
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["out"] = out.string();
    if (data) j["data"] = data->string();
    if (checkpoint) j["checkpoint"] = checkpoint->string();
    if (!labels.empty()) {
        nlohmann::json lm;
        for (const auto& [k, v] : labels) lm[k] = v;
        j["labels"] = lm;
    }
    j["positive_class"] = positive_class;
    j["window"] = {{"length", window.length}, {"stride", window.stride}};
    j["model"] = model.to_json();
    j["train"] = {{"epochs", epochs}, {"batch", batch}, {"lr", lr}, {"folds", folds}};
    if (synth) j["synth"] = synth->to_json();
    return j;
}

namespace {

/// One process per output directory; the lock file is removed when the
/// run object goes out of scope.
class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : lock_path_(dir / ".lock") {
        fs::create_directories(dir);
        std::FILE* f = std::fopen(lock_path_.string().c_str(), "wx");
        if (!f) {
            throw ConfigError("output directory is locked by another run: " + lock_path_.string());
        }
        std::fclose(f);
    }
    ~OutputLock() {
        std::error_code ec;
        fs::remove(lock_path_, ec);
    }

private:
    fs::path lock_path_;
};

/// Writes go to `<name>.partial`; commit() renames everything into place.
class OutputStager {
public:
    explicit OutputStager(fs::path dir) : dir_(std::move(dir)) {}

    fs::path stage(const std::string& name) {
        fs::path partial = dir_ / (name + ".partial");
        pending_.emplace_back(partial, dir_ / name);
        return partial;
    }

    void commit() {
        for (const auto& [partial, final_path] : pending_) {
            fs::rename(partial, final_path);
        }
        pending_.clear();
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, fs::path>> pending_;
};

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw DataError("write failed for " + path.string());
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<DfcnTensor> scans_from_dataset(const Dataset& ds, const WindowSpec& window) {
    std::vector<DfcnTensor> scans;
    scans.reserve(ds.scans.size());
    for (const auto& ts : ds.scans) scans.push_back(build_dfcn(ts, window));
    return scans;
}

/// Accepts either a dataset directory (scans.csv layout, windows applied
/// here) or a directory of prebuilt .dfcn files.
std::vector<DfcnTensor> load_scans(const RunConfig& cfg) {
    if (cfg.synth && cfg.data) {
        throw ConfigError("config provides both 'synth' and 'data'; pick one source");
    }
    if (cfg.synth) {
        SynthSpec spec = *cfg.synth;
        return scans_from_dataset(synth_generate(spec), cfg.window);
    }
    if (!cfg.data) throw ConfigError("this command needs a 'data' path or a 'synth' block");
    const fs::path& data = *cfg.data;
    if (!fs::exists(data)) throw DataError("data path does not exist: " + data.string());
    if (fs::is_directory(data)) {
        if (fs::exists(data / "scans.csv")) {
            return scans_from_dataset(load_dataset(data, cfg.labels), cfg.window);
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(data)) {
            if (entry.path().extension() == ".dfcn") files.push_back(entry.path());
        }
        if (files.empty()) {
            throw DataError("data directory has neither scans.csv nor .dfcn files: " + data.string());
        }
        std::sort(files.begin(), files.end());
        std::vector<DfcnTensor> scans;
        scans.reserve(files.size());
        for (const auto& f : files) scans.push_back(read_dfcn(f));
        return scans;
    }
    if (data.extension() == ".dfcn") return {read_dfcn(data)};
    throw DataError("data path must be a dataset directory, a .dfcn directory, or a .dfcn file: " +
                    data.string());
}

void check_scans_against_model(const std::vector<DfcnTensor>& scans, const ModelConfig& model) {
    for (const auto& s : scans) {
        if (s.windows != model.windows || s.regions != model.regions) {
            throw ConfigError("scan " + s.scan_id + " is " + std::to_string(s.windows) + "x" +
                              std::to_string(s.regions) + "x" + std::to_string(s.regions) +
                              " but the model expects t=" + std::to_string(model.windows) +
                              ", n=" + std::to_string(model.regions));
        }
        if (s.label < 0 || static_cast<std::size_t>(s.label) >= model.num_classes) {
            throw DataError("scan " + s.scan_id + " has label " + std::to_string(s.label) +
                            " outside num_classes=" + std::to_string(model.num_classes));
        }
    }
}

nlohmann::json metrics_to_json(const MetricsReport& m) {
    nlohmann::json j;
    j["accuracy"] = m.accuracy;
    if (m.num_classes == 2) {
        j["sensitivity"] = m.sensitivity;
        j["specificity"] = m.specificity;
        if (!std::isnan(m.auc)) j["auc"] = m.auc;
    }
    nlohmann::json recalls = nlohmann::json::array();
    for (double r : m.per_class_recall) recalls.push_back(std::isnan(r) ? nlohmann::json() : nlohmann::json(r));
    j["per_class_recall"] = recalls;
    nlohmann::json confusion = nlohmann::json::array();
    for (std::size_t t = 0; t < m.num_classes; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t p = 0; p < m.num_classes; ++p) row.push_back(m.confusion_at(t, p));
        confusion.push_back(row);
    }
    j["confusion"] = confusion;
    return j;
}

nlohmann::json count_report_to_json(const ParamCountReport& r) {
    nlohmann::json per_layer;
    for (const auto& [layer, count] : r.per_layer) per_layer[layer] = count;
    return {{"per_layer", per_layer}, {"total", r.total}};
}

void write_curves_csv(const fs::path& path, const std::vector<EpochStats>& history) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        os << e << ',' << fmt_double(history[e].train_loss) << ',' << fmt_double(history[e].train_accuracy)
           << ',' << fmt_double(history[e].val_loss) << ',' << fmt_double(history[e].val_accuracy) << '\n';
    }
}

void write_roc_csv(const fs::path& path, const std::vector<std::pair<double, double>>& points) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : points) os << fmt_double(fpr) << ',' << fmt_double(tpr) << '\n';
}

struct Aggregate {
    std::vector<double> values;
    void add(double v) {
        if (!std::isnan(v)) values.push_back(v);
    }
    nlohmann::json summary() const {
        if (values.empty()) return nullptr;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        return {{"mean", mean}, {"std", std::sqrt(var)}};
    }
};

void run_synth(const RunConfig& base) {
    // Without an explicit block the command emits the built-in two-class
    // planted-block benchmark; the manifest echoes the effective spec.
    RunConfig cfg = base;
    if (!cfg.synth) cfg.synth = default_benchmark_spec();
    OutputStager stager(cfg.out);
    Dataset ds = synth_generate(*cfg.synth);

    // Scan CSVs are inert without the index, so only the index files and
    // manifest go through staging.
    std::map<int, std::string> group_of;
    for (const auto& [group, label] : ds.label_map) group_of[label] = group;
    {
        std::ofstream idx(stager.stage("scans.csv"));
        idx << "file,subject_id,scan_id,group\n";
        for (const auto& ts : ds.scans) {
            const std::string file = ts.scan_id + ".csv";
            write_timeseries(cfg.out / file, ts);
            idx << file << ',' << ts.subject_id << ',' << ts.scan_id << ',' << group_of.at(ts.label) << '\n';
        }
        if (!idx) throw DataError("write failed for scans.csv");
    }
    {
        nlohmann::json labels;
        for (const auto& [group, label] : ds.label_map) labels[group] = label;
        write_json_file(stager.stage("labels.json"), labels);
    }
    nlohmann::json manifest;
    manifest["command"] = "synth";
    manifest["config"] = cfg.to_json();
    manifest["scan_count"] = ds.scans.size();
    write_json_file(stager.stage("manifest.json"), manifest);
    stager.commit();
}

void run_build_dfcn(const RunConfig& cfg) {
    if (!cfg.data) throw ConfigError("build-dfcn needs a 'data' dataset directory");
    if (!fs::exists(*cfg.data / "scans.csv")) {
        throw DataError("build-dfcn expects a dataset directory with scans.csv: " + cfg.data->string());
    }
    OutputStager stager(cfg.out);
    Dataset ds = load_dataset(*cfg.data, cfg.labels);

    nlohmann::json scans_json = nlohmann::json::array();
    for (const auto& ts : ds.scans) {
        DfcnTensor t = build_dfcn(ts, cfg.window);
        const std::string file = ts.scan_id + ".dfcn";
        write_dfcn(stager.stage(file), t);
        scans_json.push_back({{"file", file},
                              {"scan_id", t.scan_id},
                              {"subject_id", t.subject_id},
                              {"label", t.label},
                              {"windows", t.windows},
                              {"regions", t.regions},
                              {"degenerate", t.degenerate}});
    }
    nlohmann::json manifest;
    manifest["command"] = "build-dfcn";
    manifest["config"] = cfg.to_json();
    manifest["scans"] = scans_json;
    write_json_file(stager.stage("manifest.json"), manifest);
    stager.commit();
}

void run_train(const RunConfig& cfg) {
    OutputStager stager(cfg.out);
    std::vector<DfcnTensor> scans = load_scans(cfg);
    check_scans_against_model(scans, cfg.model);

    std::vector<std::string> subjects;
    subjects.reserve(scans.size());
    for (const auto& s : scans) subjects.push_back(s.subject_id);
    SplitPlan plan = make_subject_folds(subjects, cfg.folds, cfg.seed);

    ParamCountReport counts = [&] {
        ModelParams probe = ModelParams::init(cfg.model, 0);
        return count_parameters(probe.trainable());
    }();

    TrainHyper hyper;
    hyper.epochs = cfg.epochs;
    hyper.batch = cfg.batch;
    hyper.lr = cfg.lr;

    nlohmann::json folds_json = nlohmann::json::array();
    Aggregate acc, sen, spe, auc;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        FoldResult result = train_fold(scans, plan.folds[f], cfg.model, hyper,
                                       derive_seed(cfg.seed, 100 + f));
        EvalOutcome outcome = evaluate_scans(result.params, scans, plan.folds[f].test,
                                             cfg.positive_class);

        const std::string checkpoint_file = "fold" + std::to_string(f) + ".dcaw";
        save_checkpoint(stager.stage(checkpoint_file), result.params);
        const std::string curves_file = "fold" + std::to_string(f) + "_curves.csv";
        write_curves_csv(stager.stage(curves_file), result.history);

        nlohmann::json fj;
        fj["fold"] = f;
        fj["train_scans"] = plan.folds[f].train.size();
        fj["val_scans"] = plan.folds[f].val.size();
        fj["test_scans"] = plan.folds[f].test.size();
        fj["best_epoch"] = result.best_epoch ? nlohmann::json(*result.best_epoch) : nlohmann::json();
        fj["best_val_accuracy"] = result.best_val_accuracy;
        fj["checkpoint"] = checkpoint_file;
        fj["curves"] = curves_file;
        fj["test"] = metrics_to_json(outcome.metrics);
        if (cfg.model.num_classes == 2 && !std::isnan(outcome.metrics.auc)) {
            std::vector<int> binary(outcome.truth.size());
            for (std::size_t i = 0; i < outcome.truth.size(); ++i)
                binary[i] = outcome.truth[i] == cfg.positive_class ? 1 : 0;
            const std::string roc_file = "fold" + std::to_string(f) + "_roc.csv";
            write_roc_csv(stager.stage(roc_file), roc_points(outcome.positive_scores, binary));
            fj["roc"] = roc_file;
        }
        folds_json.push_back(fj);

        acc.add(outcome.metrics.accuracy);
        sen.add(outcome.metrics.sensitivity);
        spe.add(outcome.metrics.specificity);
        auc.add(outcome.metrics.auc);
    }

    nlohmann::json manifest;
    manifest["command"] = "train";
    manifest["config"] = cfg.to_json();
    manifest["parameter_counts"] = count_report_to_json(counts);
    manifest["folds"] = folds_json;
    nlohmann::json summary;
    summary["accuracy"] = acc.summary();
    if (cfg.model.num_classes == 2) {
        summary["sensitivity"] = sen.summary();
        summary["specificity"] = spe.summary();
        summary["auc"] = auc.summary();
    }
    manifest["summary"] = summary;
    write_json_file(stager.stage("manifest.json"), manifest);
    stager.commit();
}

void run_eval(const RunConfig& cfg) {
    if (!cfg.checkpoint) throw ConfigError("eval needs a 'checkpoint' path");
    if (!fs::exists(*cfg.checkpoint)) throw DataError("checkpoint does not exist: " + cfg.checkpoint->string());
    OutputStager stager(cfg.out);
    std::vector<DfcnTensor> scans = load_scans(cfg);
    check_scans_against_model(scans, cfg.model);
    ModelParams params = load_checkpoint(*cfg.checkpoint, cfg.model);

    std::vector<std::size_t> indices(scans.size());
    for (std::size_t i = 0; i < scans.size(); ++i) indices[i] = i;
    EvalOutcome outcome = evaluate_scans(params, scans, indices, cfg.positive_class);

    nlohmann::json report;
    report["command"] = "eval";
    report["config"] = cfg.to_json();
    report["scan_count"] = scans.size();
    report["metrics"] = metrics_to_json(outcome.metrics);
    if (cfg.model.num_classes == 2 && !std::isnan(outcome.metrics.auc)) {
        std::vector<int> binary(outcome.truth.size());
        for (std::size_t i = 0; i < outcome.truth.size(); ++i)
            binary[i] = outcome.truth[i] == cfg.positive_class ? 1 : 0;
        write_roc_csv(stager.stage("eval_roc.csv"), roc_points(outcome.positive_scores, binary));
    }
    write_json_file(stager.stage("eval.json"), report);
    stager.commit();
}

void run_attn(const RunConfig& cfg) {
    if (!cfg.checkpoint) throw ConfigError("attn needs a 'checkpoint' path");
    if (!cfg.data) throw ConfigError("attn needs a 'data' path to one .dfcn scan");
    if (!fs::exists(*cfg.checkpoint)) throw DataError("checkpoint does not exist: " + cfg.checkpoint->string());
    OutputStager stager(cfg.out);
    std::vector<DfcnTensor> scans = load_scans(cfg);
    if (scans.size() != 1) {
        throw ConfigError("attn expects exactly one scan, got " + std::to_string(scans.size()));
    }
    if (!cfg.model.dca_enabled) {
        throw ConfigError("attn requires a model with dca_enabled=true (checkpoint trained without DCA)");
    }
    ModelParams params = load_checkpoint(*cfg.checkpoint, cfg.model);
    AttentionScores scores = extract_attention(params, scans[0]);

    for (std::size_t ch = 0; ch < scores.channels.size(); ++ch) {
        write_attention_csv(stager.stage("attn_ch" + std::to_string(ch) + ".csv"), scores.regions,
                            scores.channels[ch]);
        write_attention_svg(stager.stage("attn_ch" + std::to_string(ch) + ".svg"), scores.regions,
                            scores.channels[ch]);
    }
    stager.commit();
}

void run_ttest(const RunConfig& cfg) {
    if (!cfg.checkpoint) throw ConfigError("ttest needs a 'checkpoint' path");
    if (!fs::exists(*cfg.checkpoint)) throw DataError("checkpoint does not exist: " + cfg.checkpoint->string());
    OutputStager stager(cfg.out);
    std::vector<DfcnTensor> scans = load_scans(cfg);
    check_scans_against_model(scans, cfg.model);
    ModelParams params = load_checkpoint(*cfg.checkpoint, cfg.model);

    std::set<int> labels;
    for (const auto& s : scans) labels.insert(s.label);
    if (labels.size() != 2) {
        throw ConfigError("ttest needs scans from exactly 2 groups, got " + std::to_string(labels.size()));
    }
    const int label_a = *labels.begin(); // lower label becomes group A

    std::vector<std::size_t> idx_a, idx_b;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        (scans[i].label == label_a ? idx_a : idx_b).push_back(i);
    }
    auto features_a = extract_features(params, scans, idx_a);
    auto features_b = extract_features(params, scans, idx_b);
    TTestReport report = feature_ttest(features_a, features_b);

    std::ofstream os(stager.stage("ttest.csv"));
    if (!os) throw DataError("cannot write ttest.csv");
    os << "feature_index,t,p,rank\n";
    for (const auto& ft : report.features) {
        os << ft.feature << ',' << fmt_double(ft.t) << ',' << fmt_double(ft.p) << ',' << ft.rank << '\n';
    }
    if (!os) throw DataError("write failed for ttest.csv");
    os.close();
    stager.commit();
}

} // namespace

void run_command(const std::string& command, const nlohmann::json& config_json) {
    RunConfig cfg = RunConfig::from_json(config_json);
    OutputLock lock(cfg.out);
    if (command == "synth") run_synth(cfg);
    else if (command == "build-dfcn") run_build_dfcn(cfg);
    else if (command == "train") run_train(cfg);
    else if (command == "eval") run_eval(cfg);
    else if (command == "attn") run_attn(cfg);
    else if (command == "ttest") run_ttest(cfg);
    else throw ConfigError("unknown command '" + command + "'");
}

} // namespace dcacrn
