#include "adam.hpp"

#include <cmath>

#include "error.hpp"

namespace dcacrn {

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    moments_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (!params_[i].requires_grad()) throw ConfigError("AdamOptimizer given a non-trainable tensor");
        moments_[i].m.assign(params_[i].size(), 0.0);
        moments_[i].v.assign(params_[i].size(), 0.0);
    }
}

void AdamOptimizer::step() {
    ++step_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        double* theta = params_[i].data();
        const double* g = params_[i].grad();
        auto& mom = moments_[i];
        for (std::size_t j = 0; j < params_[i].size(); ++j) {
            mom.m[j] = config_.beta1 * mom.m[j] + (1.0 - config_.beta1) * g[j];
            mom.v[j] = config_.beta2 * mom.v[j] + (1.0 - config_.beta2) * g[j] * g[j];
            const double mhat = mom.m[j] / bc1;
            const double vhat = mom.v[j] / bc2;
            theta[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

void AdamOptimizer::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

} // namespace dcacrn
