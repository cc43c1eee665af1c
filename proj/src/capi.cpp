#include "dcacrn.h"

#include <cstring>
#include <functional>
#include <string>

#include <json.hpp>

#include "dfcn.hpp"
#include "error.hpp"
#include "runner.hpp"

struct dcacrn_ctx {
    std::string last_error;
};

struct dcacrn_dfcn {
    dcacrn::DfcnTensor tensor;
};

namespace {

int guard(dcacrn_ctx* ctx, const std::function<void()>& fn) {
    try {
        fn();
        if (ctx) ctx->last_error.clear();
        return DCACRN_OK;
    } catch (const dcacrn::ConfigError& e) {
        if (ctx) ctx->last_error = e.what();
        return DCACRN_ERR_CONFIG;
    } catch (const dcacrn::DataError& e) {
        if (ctx) ctx->last_error = e.what();
        return DCACRN_ERR_DATA;
    } catch (const dcacrn::NumericError& e) {
        if (ctx) ctx->last_error = e.what();
        return DCACRN_ERR_NUMERIC;
    } catch (const nlohmann::json::exception& e) {
        if (ctx) ctx->last_error = std::string("config error: ") + e.what();
        return DCACRN_ERR_CONFIG;
    } catch (const std::exception& e) {
        if (ctx) ctx->last_error = e.what();
        return DCACRN_ERR_GENERIC;
    }
}

} // namespace

extern "C" {

dcacrn_ctx* dcacrn_ctx_new(void) { return new dcacrn_ctx(); }

void dcacrn_ctx_free(dcacrn_ctx* ctx) { delete ctx; }

const char* dcacrn_last_error(const dcacrn_ctx* ctx) {
    return ctx ? ctx->last_error.c_str() : "";
}

const char* dcacrn_version(void) { return "0.1.0"; }

int dcacrn_run(dcacrn_ctx* ctx, const char* command, const char* config_json) {
    if (!command || !config_json) {
        if (ctx) ctx->last_error = "command and config_json must be non-null";
        return DCACRN_ERR_CONFIG;
    }
    return guard(ctx, [&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
            throw dcacrn::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        dcacrn::run_command(command, j);
    });
}

dcacrn_dfcn* dcacrn_dfcn_open(dcacrn_ctx* ctx, const char* path) {
    if (!path) {
        if (ctx) ctx->last_error = "path must be non-null";
        return nullptr;
    }
    dcacrn_dfcn* handle = nullptr;
    const int rc = guard(ctx, [&] {
        handle = new dcacrn_dfcn{dcacrn::read_dfcn(path)};
    });
    return rc == DCACRN_OK ? handle : nullptr;
}

void dcacrn_dfcn_free(dcacrn_dfcn* t) { delete t; }

size_t dcacrn_dfcn_windows(const dcacrn_dfcn* t) { return t ? t->tensor.windows : 0; }

size_t dcacrn_dfcn_regions(const dcacrn_dfcn* t) { return t ? t->tensor.regions : 0; }

int dcacrn_dfcn_label(const dcacrn_dfcn* t) { return t ? t->tensor.label : -1; }

int dcacrn_dfcn_window(dcacrn_ctx* ctx, const dcacrn_dfcn* t, size_t w, double* out) {
    return guard(ctx, [&] {
        if (!t || !out) throw dcacrn::ConfigError("dcacrn_dfcn_window: null argument");
        if (w >= t->tensor.windows) {
            throw dcacrn::ConfigError("window index " + std::to_string(w) + " out of range");
        }
        const std::size_t block = t->tensor.regions * t->tensor.regions;
        std::memcpy(out, t->tensor.values.data() + w * block, block * sizeof(double));
    });
}

} // extern "C"
