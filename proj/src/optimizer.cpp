#include "hinforge/optimizer.hpp"

#include "hinforge/errors.hpp"

#include <cmath>

namespace hinforge {

void Adam::step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads) {
    if (params.size() != grads.size()) throw ArgumentError("Adam::step: param/grad count mismatch");
    if (m_.empty()) {
        for (const Tensor* p : params) {
            m_.push_back(Tensor::zeros(p->rows, p->cols));
            v_.push_back(Tensor::zeros(p->rows, p->cols));
        }
    }
    if (params.size() != m_.size()) throw ArgumentError("Adam::step: param count changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p];
        const Tensor& g = grads[p];
        if (!w.same_shape(g) || !w.same_shape(m_[p]))
            throw ShapeError("Adam::step: shape mismatch");
        for (long i = 0; i < w.size(); ++i) {
            m_[p].data[i] = cfg_.beta1 * m_[p].data[i] + (1.0 - cfg_.beta1) * g.data[i];
            v_[p].data[i] = cfg_.beta2 * v_[p].data[i] + (1.0 - cfg_.beta2) * g.data[i] * g.data[i];
            const double mhat = m_[p].data[i] / bc1;
            const double vhat = v_[p].data[i] / bc2;
            w.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
        ensure_finite(w, "Adam::step");
    }
}

}  // namespace hinforge
