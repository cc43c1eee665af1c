#ifndef DCACRN_ADAM_HPP
#define DCACRN_ADAM_HPP

#include <cstdint>
#include <vector>

#include "tensor.hpp"

namespace dcacrn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias-corrected moments: theta -= lr * mhat / (sqrt(vhat) + eps).
class AdamOptimizer {
public:
    explicit AdamOptimizer(std::vector<Tensor> params, AdamConfig config = {});

    void step();
    void zero_grad();
    std::uint64_t step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    struct Moments {
        std::vector<double> m;
        std::vector<double> v;
    };
    std::vector<Tensor> params_;
    std::vector<Moments> moments_;
    AdamConfig config_;
    std::uint64_t step_ = 0;
};

} // namespace dcacrn

#endif // DCACRN_ADAM_HPP
