#include "teg/num/tensor.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace teg::num {

namespace {
thread_local bool g_grad_enabled = true;

size_t shape_numel(const std::vector<int>& shape) {
    if (shape.empty()) throw ShapeError("tensor shape must have rank 1 or 2");
    if (shape.size() > 2) throw ShapeError("tensor rank > 2 unsupported");
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ShapeError("tensor dimension must be positive");
        n *= (size_t)d;
    }
    return n;
}
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

TensorPtr Tensor::make(std::vector<int> shape, bool requires_grad) {
    size_t n = shape_numel(shape);
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->data.assign(n, 0.0);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    auto t = make(std::move(shape), requires_grad);
    std::fill(t->data.begin(), t->data.end(), value);
    return t;
}

TensorPtr Tensor::from(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
    size_t n = shape_numel(shape);
    if (values.size() != n) throw ShapeError("value count does not match shape");
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->data = std::move(values);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::scalar(double value, bool requires_grad) {
    return from({1}, {value}, requires_grad);
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() needs a single-element tensor, got " + shape_str());
    return data[0];
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

double* Tensor::grad_data() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    return grad.data();
}

void Tensor::zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
}

void backward(const TensorPtr& loss) {
    if (!loss) throw ShapeError("backward on null tensor");
    if (loss->numel() != 1)
        throw ShapeError("backward needs a scalar loss, got " + loss->shape_str());

    // Iterative post-order DFS; recursion would overflow on long sequences.
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> seen;
    std::vector<std::pair<Tensor*, size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Tensor* p = node->parents[idx].get();
            ++idx;
            if (seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->grad_data()[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        if (!node->backprop) continue;
        node->grad_data();
        for (auto& p : node->parents) p->grad_data();
        node->backprop(*node);
    }
}

}  // namespace teg::num
