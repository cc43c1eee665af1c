#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcacrn.h"

namespace {

struct CliValues {
    std::string config_path;
    std::string out;
    std::string data;
    std::string checkpoint;
    std::uint64_t seed = 0;
    std::size_t epochs = 0, batch = 0, folds = 0;
    double lr = 0.0, l2 = 0.0;
    bool no_dca = false;
    std::string dk_mode;
    int positive_class = 0;
    std::size_t n = 0, t = 0, s1 = 0, s2 = 0, s3 = 0, c1 = 0, k1 = 0, k2 = 0;
    std::size_t window_length = 0, window_stride = 0;
};

void add_common_options(CLI::App* sub, CliValues& v) {
    sub->add_option("--config", v.config_path, "JSON run configuration file");
    sub->add_option("--out", v.out, "Output directory");
    sub->add_option("--seed", v.seed, "Master seed (required somewhere: flag or config file)");
    sub->add_option("--data", v.data, "Dataset directory, .dfcn directory, or .dfcn file");
    sub->add_option("--checkpoint", v.checkpoint, "Checkpoint file (.dcaw)");
    sub->add_option("--epochs", v.epochs, "Training epochs");
    sub->add_option("--batch", v.batch, "Mini-batch size");
    sub->add_option("--lr", v.lr, "Adam learning rate");
    sub->add_option("--l2", v.l2, "L2 coefficient on the final classifier weights");
    sub->add_flag("--no-dca", v.no_dca, "Disable the DCA layer (plain CRN ablation)");
    sub->add_option("--folds", v.folds, "Cross-validation fold count");
    sub->add_option("--dk-mode", v.dk_mode, "Attention scaling divisor: keylen or regions")
        ->check(CLI::IsMember({"keylen", "regions"}));
    sub->add_option("--positive-class", v.positive_class, "Class index treated as the patient group");
    sub->add_option("--n", v.n, "Region count");
    sub->add_option("--t", v.t, "Window count");
    sub->add_option("--s1", v.s1, "Con1 temporal extent");
    sub->add_option("--s2", v.s2, "Con2 temporal extent");
    sub->add_option("--s3", v.s3, "Con3 temporal extent");
    sub->add_option("--c1", v.c1, "Con1 filter count (DCA channels)");
    sub->add_option("--k1", v.k1, "Con2 filter count");
    sub->add_option("--k2", v.k2, "Con3 filter count");
    sub->add_option("--window-length", v.window_length, "Sliding window length L");
    sub->add_option("--window-stride", v.window_stride, "Sliding window stride s");
}

int assemble_and_run(const std::string& command, CLI::App* sub, const CliValues& v) {
    nlohmann::json cfg = nlohmann::json::object();
    if (!v.config_path.empty()) {
        std::ifstream is(v.config_path);
        if (!is) {
            std::cerr << "error: cannot open config file " << v.config_path << "\n";
            return DCACRN_ERR_CONFIG;
        }
        try {
            is >> cfg;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: " << v.config_path << " is not valid JSON: " << e.what() << "\n";
            return DCACRN_ERR_CONFIG;
        }
    }

    // Flags override file values, which override built-in defaults.
    if (sub->count("--out")) cfg["out"] = v.out;
    if (sub->count("--seed")) cfg["seed"] = v.seed;
    if (sub->count("--data")) cfg["data"] = v.data;
    if (sub->count("--checkpoint")) cfg["checkpoint"] = v.checkpoint;
    if (sub->count("--epochs")) cfg["train"]["epochs"] = v.epochs;
    if (sub->count("--batch")) cfg["train"]["batch"] = v.batch;
    if (sub->count("--lr")) cfg["train"]["lr"] = v.lr;
    if (sub->count("--folds")) cfg["train"]["folds"] = v.folds;
    if (sub->count("--l2")) cfg["model"]["l2_lambda"] = v.l2;
    if (sub->count("--no-dca")) cfg["model"]["dca_enabled"] = false;
    if (sub->count("--dk-mode")) cfg["model"]["dk_mode"] = v.dk_mode;
    if (sub->count("--positive-class")) cfg["positive_class"] = v.positive_class;
    if (sub->count("--n")) cfg["model"]["n"] = v.n;
    if (sub->count("--t")) cfg["model"]["t"] = v.t;
    if (sub->count("--s1")) cfg["model"]["s1"] = v.s1;
    if (sub->count("--s2")) cfg["model"]["s2"] = v.s2;
    if (sub->count("--s3")) cfg["model"]["s3"] = v.s3;
    if (sub->count("--c1")) cfg["model"]["c1"] = v.c1;
    if (sub->count("--k1")) cfg["model"]["k1"] = v.k1;
    if (sub->count("--k2")) cfg["model"]["k2"] = v.k2;
    if (sub->count("--window-length")) cfg["window"]["length"] = v.window_length;
    if (sub->count("--window-stride")) cfg["window"]["stride"] = v.window_stride;

    dcacrn_ctx* ctx = dcacrn_ctx_new();
    const int rc = dcacrn_run(ctx, command.c_str(), cfg.dump().c_str());
    if (rc != DCACRN_OK) {
        std::cerr << "error: " << dcacrn_last_error(ctx) << "\n";
    }
    dcacrn_ctx_free(ctx);
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dcacrn: dynamic functional connectivity classification pipeline"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"synth", "Generate a labeled synthetic dataset"},
        {"build-dfcn", "Build dFCN tensors from a time-series dataset"},
        {"train", "Train with subject-level cross-validation"},
        {"eval", "Score a checkpoint against a dataset"},
        {"attn", "Export attention score heatmaps for one scan"},
        {"ttest", "Rank learned features by two-sample t-test"},
    };

    std::vector<CliValues> values(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
        add_common_options(sub, values[i]);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return DCACRN_ERR_CONFIG;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (subs[i]->parsed()) {
            return assemble_and_run(commands[i].first, subs[i], values[i]);
        }
    }
    std::cerr << "error: no command given\n";
    return DCACRN_ERR_CONFIG;
}
