#pragma once

#include <string>
#include <vector>

#include "teg/num/tensor.hpp"

namespace teg::num {

// Adam with bias correction over a fixed list of named parameters. Moment
// buffers are addressable by name so the trainer can checkpoint them.
class Adam {
public:
    struct Slot {
        std::string name;
        TensorPtr param;
        std::vector<double> m;
        std::vector<double> v;
    };

    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void add_param(const std::string& name, const TensorPtr& p);

    // One update from the grads currently stored on the parameters.
    // Parameters with requires_grad=false are skipped. A non-finite gradient
    // aborts the step with a NumericError naming the parameter.
    void step();
    void zero_grad();

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }
    long long step_count() const { return t_; }
    void set_step_count(long long t) { t_ = t; }
    std::vector<Slot>& slots() { return slots_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long long t_ = 0;
    std::vector<Slot> slots_;
};

// Scales all grads in place so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_norm(const std::vector<TensorPtr>& params, double max_norm);

}  // namespace teg::num
