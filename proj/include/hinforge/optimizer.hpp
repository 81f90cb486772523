#pragma once

#include "hinforge/tensor.hpp"

#include <vector>

namespace hinforge {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are sized on the first step and
// the parameter list must keep the same shapes afterwards.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads);
    long steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    long t_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace hinforge
