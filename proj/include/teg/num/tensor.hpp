#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "teg/util/errors.hpp"

namespace teg::num {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// Global autodiff switch. Inside a NoGradGuard, ops still compute values but
// record no graph edges, so backward() through them is impossible.
bool grad_enabled();

struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

// Dense row-major float64 tensor, rank 1 or 2. Rank-1 acts as a single row
// where a matrix is expected; a scalar is shape {1}. The tape is the shared
// graph of parents plus a backprop closure per node; it is rebuilt on every
// forward pass and torn down when the shared_ptrs drop.
class Tensor {
public:
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;

    std::vector<TensorPtr> parents;
    std::function<void(Tensor&)> backprop;

    static TensorPtr make(std::vector<int> shape, bool requires_grad = false);
    static TensorPtr full(std::vector<int> shape, double value, bool requires_grad = false);
    static TensorPtr from(std::vector<int> shape, std::vector<double> values,
                          bool requires_grad = false);
    static TensorPtr scalar(double value, bool requires_grad = false);

    size_t numel() const { return data.size(); }
    int rows() const { return shape.size() == 2 ? shape[0] : 1; }
    int cols() const { return shape.size() == 2 ? shape[1] : shape[0]; }
    double item() const;
    std::string shape_str() const;

    // Lazily sized gradient buffer; zeros on first touch.
    double* grad_data();
    void zero_grad();
    bool is_leaf() const { return parents.empty(); }
};

// Reverse-mode sweep from a scalar loss. Seeds d(loss)/d(loss)=1, walks the
// tape once in reverse topological order, accumulates into every node's grad
// buffer that lies on a path to a requires_grad leaf.
void backward(const TensorPtr& loss);

}  // namespace teg::num
