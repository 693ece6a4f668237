#include "teg/num/adam.hpp"

#include <cmath>

namespace teg::num {

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::add_param(const std::string& name, const TensorPtr& p) {
    Slot s;
    s.name = name;
    s.param = p;
    s.m.assign(p->numel(), 0.0);
    s.v.assign(p->numel(), 0.0);
    slots_.push_back(std::move(s));
}

void Adam::step() {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, (double)t_);
    double bc2 = 1.0 - std::pow(beta2_, (double)t_);
    for (auto& s : slots_) {
        if (!s.param->requires_grad) continue;
        double* g = s.param->grad_data();
        for (size_t i = 0; i < s.param->numel(); ++i) {
            if (!std::isfinite(g[i]))
                throw NumericError("non-finite gradient in parameter " + s.name);
            s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g[i];
            s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g[i] * g[i];
            double mhat = s.m[i] / bc1;
            double vhat = s.v[i] / bc2;
            s.param->data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

void Adam::zero_grad() {
    for (auto& s : slots_) s.param->zero_grad();
}

double clip_global_norm(const std::vector<TensorPtr>& params, double max_norm) {
    double sq = 0.0;
    for (auto& p : params) {
        if (!p->requires_grad || p->grad.empty()) continue;
        for (double g : p->grad) sq += g * g;
    }
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double scale = max_norm / norm;
        for (auto& p : params) {
            if (!p->requires_grad || p->grad.empty()) continue;
            for (double& g : p->grad) g *= scale;
        }
    }
    return norm;
}

}  // namespace teg::num
