#include "teg/num/ops.hpp"

#include <algorithm>
#include <cmath>

#include "teg/num/kernels.hpp"

namespace teg::num::ops {

namespace {

void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->shape != b->shape)
        throw ShapeError(std::string(op) + " shape mismatch " + a->shape_str() + " vs " +
                               b->shape_str());
}

TensorPtr result_like(const TensorPtr& a) { return Tensor::make(a->shape); }

void attach(const TensorPtr& out, std::vector<TensorPtr> parents,
            std::function<void(Tensor&)> fn) {
    if (!grad_enabled()) return;
    out->parents = std::move(parents);
    out->backprop = std::move(fn);
}

}  // namespace

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "add");
    auto out = result_like(a);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] + b->data[i];
    attach(out, {a, b}, [a, b](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) {
            a->grad[i] += self.grad[i];
            b->grad[i] += self.grad[i];
        }
    });
    return out;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "sub");
    auto out = result_like(a);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] - b->data[i];
    attach(out, {a, b}, [a, b](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) {
            a->grad[i] += self.grad[i];
            b->grad[i] -= self.grad[i];
        }
    });
    return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "mul");
    auto out = result_like(a);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] * b->data[i];
    attach(out, {a, b}, [a, b](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) {
            a->grad[i] += self.grad[i] * b->data[i];
            b->grad[i] += self.grad[i] * a->data[i];
        }
    });
    return out;
}

TensorPtr affine(const TensorPtr& x, double m, double c) {
    auto out = result_like(x);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = m * x->data[i] + c;
    attach(out, {x}, [x, m](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) x->grad[i] += m * self.grad[i];
    });
    return out;
}

TensorPtr smul(const TensorPtr& x, double s) { return affine(x, s, 0.0); }

TensorPtr relu(const TensorPtr& x) {
    auto out = result_like(x);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = x->data[i] > 0.0 ? x->data[i] : 0.0;
    attach(out, {x}, [x](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i)
            if (x->data[i] > 0.0) x->grad[i] += self.grad[i];
    });
    return out;
}

TensorPtr sigmoid(const TensorPtr& x) {
    auto out = result_like(x);
    for (size_t i = 0; i < out->numel(); ++i) {
        double v = x->data[i];
        if (v >= 0.0) {
            out->data[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            double e = std::exp(v);
            out->data[i] = e / (1.0 + e);
        }
    }
    attach(out, {x}, [x](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) {
            double y = self.data[i];
            x->grad[i] += self.grad[i] * y * (1.0 - y);
        }
    });
    return out;
}

TensorPtr clamp_min(const TensorPtr& x, double lo) {
    auto out = result_like(x);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = std::max(x->data[i], lo);
    attach(out, {x}, [x, lo](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i)
            if (x->data[i] > lo) x->grad[i] += self.grad[i];
    });
    return out;
}

TensorPtr log(const TensorPtr& x) {
    auto out = result_like(x);
    for (size_t i = 0; i < out->numel(); ++i) out->data[i] = std::log(x->data[i]);
    attach(out, {x}, [x](Tensor& self) {
        for (size_t i = 0; i < self.numel(); ++i) x->grad[i] += self.grad[i] / x->data[i];
    });
    return out;
}

TensorPtr sum_all(const TensorPtr& x) {
    double s = 0.0;
    for (double v : x->data) s += v;
    auto out = Tensor::scalar(s);
    attach(out, {x}, [x](Tensor& self) {
        double g = self.grad[0];
        for (size_t i = 0; i < x->numel(); ++i) x->grad[i] += g;
    });
    return out;
}

TensorPtr mean_all(const TensorPtr& x) {
    double s = 0.0;
    for (double v : x->data) s += v;
    double inv = 1.0 / (double)x->numel();
    auto out = Tensor::scalar(s * inv);
    attach(out, {x}, [x, inv](Tensor& self) {
        double g = self.grad[0] * inv;
        for (size_t i = 0; i < x->numel(); ++i) x->grad[i] += g;
    });
    return out;
}

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
    size_t m = (size_t)a->rows(), k = (size_t)a->cols();
    size_t k2 = (size_t)b->rows(), n = (size_t)b->cols();
    if (k != k2)
        throw ShapeError("matmul shape mismatch " + a->shape_str() + " x " + b->shape_str());
    auto out = Tensor::make({(int)m, (int)n});
    kernels::matmul_nn(a->data.data(), b->data.data(), out->data.data(), m, k, n, false);
    attach(out, {a, b}, [a, b, m, k, n](Tensor& self) {
        // dA += dY B^T ; dB += A^T dY
        kernels::matmul_nt(self.grad.data(), b->data.data(), a->grad.data(), m, n, k, true);
        kernels::matmul_tn(a->data.data(), self.grad.data(), b->grad.data(), m, k, n, true);
    });
    return out;
}

TensorPtr matmul_nt(const TensorPtr& a, const TensorPtr& b) {
    size_t m = (size_t)a->rows(), k = (size_t)a->cols();
    size_t n = (size_t)b->rows(), k2 = (size_t)b->cols();
    if (k != k2)
        throw ShapeError("matmul_nt shape mismatch " + a->shape_str() + " x " +
                               b->shape_str() + "^T");
    auto out = Tensor::make({(int)m, (int)n});
    kernels::matmul_nt(a->data.data(), b->data.data(), out->data.data(), m, k, n, false);
    attach(out, {a, b}, [a, b, m, k, n](Tensor& self) {
        // Y = A B^T: dA += dY B ; dB += dY^T A
        kernels::matmul_nn(self.grad.data(), b->data.data(), a->grad.data(), m, n, k, true);
        kernels::matmul_tn(self.grad.data(), a->data.data(), b->grad.data(), m, n, k, true);
    });
    return out;
}

TensorPtr transpose(const TensorPtr& x) {
    int r = x->rows(), c = x->cols();
    auto out = Tensor::make({c, r});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) out->data[(size_t)j * r + i] = x->data[(size_t)i * c + j];
    attach(out, {x}, [x, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                x->grad[(size_t)i * c + j] += self.grad[(size_t)j * r + i];
    });
    return out;
}

TensorPtr softmax_rows(const TensorPtr& x) {
    size_t r = (size_t)x->rows(), c = (size_t)x->cols();
    auto out = Tensor::make(x->shape);
    kernels::softmax_rows(x->data.data(), out->data.data(), r, c);
    attach(out, {x}, [x, r, c](Tensor& self) {
        for (size_t i = 0; i < r; ++i) {
            const double* y = self.data.data() + i * c;
            const double* g = self.grad.data() + i * c;
            double dot = 0.0;
            for (size_t j = 0; j < c; ++j) dot += g[j] * y[j];
            double* gx = x->grad.data() + i * c;
            for (size_t j = 0; j < c; ++j) gx[j] += y[j] * (g[j] - dot);
        }
    });
    return out;
}

TensorPtr softmax(const TensorPtr& x, int axis) {
    if (axis == 1 || axis == -1) return softmax_rows(x);
    if (axis == 0) {
        if (x->shape.size() != 2) return softmax_rows(x);
        return transpose(softmax_rows(transpose(x)));
    }
    throw ShapeError("softmax axis out of range for shape " + x->shape_str());
}

TensorPtr layernorm_rows(const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                         double eps) {
    size_t r = (size_t)x->rows(), c = (size_t)x->cols();
    if ((size_t)gain->numel() != c || (size_t)bias->numel() != c)
        throw ShapeError("layernorm gain/bias size mismatch for " + x->shape_str());
    auto out = Tensor::make(x->shape);
    // Keep the normalized values for backward.
    auto xhat = std::make_shared<std::vector<double>>(r * c);
    auto inv_std = std::make_shared<std::vector<double>>(r);
    for (size_t i = 0; i < r; ++i) {
        const double* xr = x->data.data() + i * c;
        double mu = 0.0;
        for (size_t j = 0; j < c; ++j) mu += xr[j];
        mu /= (double)c;
        double var = 0.0;
        for (size_t j = 0; j < c; ++j) {
            double d = xr[j] - mu;
            var += d * d;
        }
        var /= (double)c;
        double is = 1.0 / std::sqrt(var + eps);
        (*inv_std)[i] = is;
        double* xh = xhat->data() + i * c;
        double* yr = out->data.data() + i * c;
        for (size_t j = 0; j < c; ++j) {
            xh[j] = (xr[j] - mu) * is;
            yr[j] = xh[j] * gain->data[j] + bias->data[j];
        }
    }
    attach(out, {x, gain, bias}, [x, gain, bias, xhat, inv_std, r, c](Tensor& self) {
        for (size_t i = 0; i < r; ++i) {
            const double* g = self.grad.data() + i * c;
            const double* xh = xhat->data() + i * c;
            double is = (*inv_std)[i];
            double m1 = 0.0, m2 = 0.0;
            for (size_t j = 0; j < c; ++j) {
                double dxh = g[j] * gain->data[j];
                m1 += dxh;
                m2 += dxh * xh[j];
                gain->grad[j] += g[j] * xh[j];
                bias->grad[j] += g[j];
            }
            m1 /= (double)c;
            m2 /= (double)c;
            double* gx = x->grad.data() + i * c;
            for (size_t j = 0; j < c; ++j) {
                double dxh = g[j] * gain->data[j];
                gx[j] += is * (dxh - m1 - xh[j] * m2);
            }
        }
    });
    return out;
}

TensorPtr concat_cols(const std::vector<TensorPtr>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of nothing");
    int r = parts[0]->rows();
    int ctot = 0;
    for (auto& p : parts) {
        if (p->rows() != r)
            throw ShapeError("concat_cols row mismatch " + parts[0]->shape_str() + " vs " +
                                   p->shape_str());
        ctot += p->cols();
    }
    auto out = Tensor::make({r, ctot});
    int off = 0;
    for (auto& p : parts) {
        int c = p->cols();
        for (int i = 0; i < r; ++i)
            std::copy(p->data.begin() + (size_t)i * c, p->data.begin() + (size_t)(i + 1) * c,
                      out->data.begin() + (size_t)i * ctot + off);
        off += c;
    }
    attach(out, parts, [parts, r, ctot](Tensor& self) {
        int off = 0;
        for (auto& p : parts) {
            int c = p->cols();
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j)
                    p->grad[(size_t)i * c + j] += self.grad[(size_t)i * ctot + off + j];
            off += c;
        }
    });
    return out;
}

TensorPtr concat_rows(const std::vector<TensorPtr>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows of nothing");
    int c = parts[0]->cols();
    int rtot = 0;
    for (auto& p : parts) {
        if (p->cols() != c)
            throw ShapeError("concat_rows col mismatch " + parts[0]->shape_str() + " vs " +
                                   p->shape_str());
        rtot += p->rows();
    }
    auto out = Tensor::make({rtot, c});
    size_t off = 0;
    for (auto& p : parts) {
        std::copy(p->data.begin(), p->data.end(), out->data.begin() + off);
        off += p->numel();
    }
    attach(out, parts, [parts](Tensor& self) {
        size_t off = 0;
        for (auto& p : parts) {
            for (size_t i = 0; i < p->numel(); ++i) p->grad[i] += self.grad[off + i];
            off += p->numel();
        }
    });
    return out;
}

TensorPtr slice_cols(const TensorPtr& x, int c0, int c1) {
    int r = x->rows(), c = x->cols();
    if (c0 < 0 || c1 > c || c0 >= c1)
        throw ShapeError("slice_cols range invalid for " + x->shape_str());
    int w = c1 - c0;
    auto out = Tensor::make({r, w});
    for (int i = 0; i < r; ++i)
        std::copy(x->data.begin() + (size_t)i * c + c0, x->data.begin() + (size_t)i * c + c1,
                  out->data.begin() + (size_t)i * w);
    attach(out, {x}, [x, r, c, c0, w](Tensor& self) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < w; ++j)
                x->grad[(size_t)i * c + c0 + j] += self.grad[(size_t)i * w + j];
    });
    return out;
}

TensorPtr slice_rows(const TensorPtr& x, int r0, int r1) {
    int r = x->rows(), c = x->cols();
    if (r0 < 0 || r1 > r || r0 >= r1)
        throw ShapeError("slice_rows range invalid for " + x->shape_str());
    int h = r1 - r0;
    auto out = Tensor::make({h, c});
    std::copy(x->data.begin() + (size_t)r0 * c, x->data.begin() + (size_t)r1 * c,
              out->data.begin());
    attach(out, {x}, [x, c, r0, h](Tensor& self) {
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < c; ++j)
                x->grad[(size_t)(r0 + i) * c + j] += self.grad[(size_t)i * c + j];
    });
    return out;
}

TensorPtr gather_rows(const TensorPtr& x, const std::vector<int>& ids) {
    int r = x->rows(), c = x->cols();
    (void)r;
    for (int id : ids)
        if (id < 0 || id >= x->rows())
            throw ShapeError("gather_rows id out of range for " + x->shape_str());
    auto out = Tensor::make({(int)ids.size(), c});
    for (size_t i = 0; i < ids.size(); ++i)
        std::copy(x->data.begin() + (size_t)ids[i] * c, x->data.begin() + (size_t)(ids[i] + 1) * c,
                  out->data.begin() + i * c);
    attach(out, {x}, [x, ids, c](Tensor& self) {
        for (size_t i = 0; i < ids.size(); ++i)
            for (int j = 0; j < c; ++j)
                x->grad[(size_t)ids[i] * c + j] += self.grad[i * (size_t)c + j];
    });
    return out;
}

TensorPtr select_per_row(const TensorPtr& x, const std::vector<int>& ids) {
    int r = x->rows(), c = x->cols();
    if ((int)ids.size() != r)
        throw ShapeError("select_per_row needs one id per row of " + x->shape_str());
    for (int id : ids)
        if (id < 0 || id >= c)
            throw ShapeError("select_per_row id out of range for " + x->shape_str());
    auto out = Tensor::make({r, 1});
    for (int i = 0; i < r; ++i) out->data[i] = x->data[(size_t)i * c + ids[i]];
    attach(out, {x}, [x, ids, c](Tensor& self) {
        for (size_t i = 0; i < ids.size(); ++i)
            x->grad[i * (size_t)c + ids[i]] += self.grad[i];
    });
    return out;
}

TensorPtr scatter_add_cols(const TensorPtr& alpha, const std::vector<int>& ids, int cols) {
    int r = alpha->rows(), s = alpha->cols();
    if ((int)ids.size() != s)
        throw ShapeError("scatter_add_cols needs one id per column of " +
                               alpha->shape_str());
    for (int id : ids)
        if (id < 0 || id >= cols)
            throw ShapeError("scatter_add_cols id out of range (vocab " +
                                   std::to_string(cols) + ")");
    auto out = Tensor::make({r, cols});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < s; ++j)
            out->data[(size_t)i * cols + ids[j]] += alpha->data[(size_t)i * s + j];
    attach(out, {alpha}, [alpha, ids, s, cols](Tensor& self) {
        for (int i = 0; i < alpha->rows(); ++i)
            for (int j = 0; j < s; ++j)
                alpha->grad[(size_t)i * s + j] += self.grad[(size_t)i * cols + ids[j]];
    });
    return out;
}

TensorPtr mul_colvec(const TensorPtr& x, const TensorPtr& v) {
    int r = x->rows(), c = x->cols();
    if ((int)v->numel() != r)
        throw ShapeError("mul_colvec size mismatch " + x->shape_str() + " vs " +
                               v->shape_str());
    auto out = Tensor::make(x->shape);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            out->data[(size_t)i * c + j] = x->data[(size_t)i * c + j] * v->data[i];
    attach(out, {x, v}, [x, v, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i) {
            double acc = 0.0;
            for (int j = 0; j < c; ++j) {
                size_t k = (size_t)i * c + j;
                x->grad[k] += self.grad[k] * v->data[i];
                acc += self.grad[k] * x->data[k];
            }
            v->grad[i] += acc;
        }
    });
    return out;
}

TensorPtr add_rowvec(const TensorPtr& x, const TensorPtr& v) {
    int r = x->rows(), c = x->cols();
    if ((int)v->numel() != c)
        throw ShapeError("add_rowvec size mismatch " + x->shape_str() + " vs " +
                               v->shape_str());
    auto out = Tensor::make(x->shape);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            out->data[(size_t)i * c + j] = x->data[(size_t)i * c + j] + v->data[j];
    attach(out, {x, v}, [x, v, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                size_t k = (size_t)i * c + j;
                x->grad[k] += self.grad[k];
                v->grad[j] += self.grad[k];
            }
    });
    return out;
}

TensorPtr mean_rows(const TensorPtr& x) {
    int r = x->rows(), c = x->cols();
    auto out = Tensor::make({1, c});
    double inv = 1.0 / (double)r;
    for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += x->data[(size_t)i * c + j];
        out->data[j] = s * inv;
    }
    attach(out, {x}, [x, r, c, inv](Tensor& self) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) x->grad[(size_t)i * c + j] += self.grad[j] * inv;
    });
    return out;
}

TensorPtr normalize_rows(const TensorPtr& x) {
    int r = x->rows(), c = x->cols();
    auto out = Tensor::make(x->shape);
    auto sums = std::make_shared<std::vector<double>>((size_t)r);
    for (int i = 0; i < r; ++i) {
        double s = 0.0;
        for (int j = 0; j < c; ++j) s += x->data[(size_t)i * c + j];
        (*sums)[(size_t)i] = s;
        if (s != 0.0)
            for (int j = 0; j < c; ++j) out->data[(size_t)i * c + j] = x->data[(size_t)i * c + j] / s;
    }
    attach(out, {x}, [x, sums, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i) {
            double s = (*sums)[(size_t)i];
            if (s == 0.0) continue;
            const double* g = self.grad.data() + (size_t)i * c;
            const double* y = self.data.data() + (size_t)i * c;
            double dot = 0.0;
            for (int j = 0; j < c; ++j) dot += g[j] * y[j];
            double* gx = x->grad.data() + (size_t)i * c;
            for (int j = 0; j < c; ++j) gx[j] += (g[j] - dot) / s;
        }
    });
    return out;
}

TensorPtr cosine_rows(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(a, b, "cosine_rows");
    int r = a->rows(), c = a->cols();
    auto out = Tensor::make({r, 1});
    constexpr double kTiny = 1e-12;
    auto norms = std::make_shared<std::vector<double>>((size_t)r * 2);
    for (int i = 0; i < r; ++i) {
        const double* ar = a->data.data() + (size_t)i * c;
        const double* br = b->data.data() + (size_t)i * c;
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (int j = 0; j < c; ++j) {
            dot += ar[j] * br[j];
            na += ar[j] * ar[j];
            nb += br[j] * br[j];
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        (*norms)[(size_t)i * 2] = na;
        (*norms)[(size_t)i * 2 + 1] = nb;
        out->data[i] = (na < kTiny || nb < kTiny) ? 0.0 : dot / (na * nb);
    }
    attach(out, {a, b}, [a, b, norms, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i) {
            double na = (*norms)[(size_t)i * 2];
            double nb = (*norms)[(size_t)i * 2 + 1];
            if (na < 1e-12 || nb < 1e-12) continue;
            double g = self.grad[i];
            double rv = self.data[i];
            const double* ar = a->data.data() + (size_t)i * c;
            const double* br = b->data.data() + (size_t)i * c;
            double* ga = a->grad.data() + (size_t)i * c;
            double* gb = b->grad.data() + (size_t)i * c;
            for (int j = 0; j < c; ++j) {
                ga[j] += g * (br[j] / (na * nb) - rv * ar[j] / (na * na));
                gb[j] += g * (ar[j] / (na * nb) - rv * br[j] / (nb * nb));
            }
        }
    });
    return out;
}

TensorPtr minmax_rows(const TensorPtr& x) {
    int r = x->rows(), c = x->cols();
    auto out = Tensor::make(x->shape);
    auto extrema = std::make_shared<std::vector<int>>((size_t)r * 2);
    for (int i = 0; i < r; ++i) {
        const double* xr = x->data.data() + (size_t)i * c;
        int amin = 0, amax = 0;
        for (int j = 1; j < c; ++j) {
            if (xr[j] < xr[amin]) amin = j;
            if (xr[j] > xr[amax]) amax = j;
        }
        (*extrema)[(size_t)i * 2] = amin;
        (*extrema)[(size_t)i * 2 + 1] = amax;
        double d = xr[amax] - xr[amin];
        double* yr = out->data.data() + (size_t)i * c;
        if (d == 0.0) {
            std::fill(yr, yr + c, 0.0);
        } else {
            for (int j = 0; j < c; ++j) yr[j] = (xr[j] - xr[amin]) / d;
        }
    }
    attach(out, {x}, [x, extrema, r, c](Tensor& self) {
        for (int i = 0; i < r; ++i) {
            int amin = (*extrema)[(size_t)i * 2];
            int amax = (*extrema)[(size_t)i * 2 + 1];
            const double* xr = x->data.data() + (size_t)i * c;
            double d = xr[amax] - xr[amin];
            if (d == 0.0) continue;
            const double* g = self.grad.data() + (size_t)i * c;
            const double* y = self.data.data() + (size_t)i * c;
            double s1 = 0.0, s2 = 0.0;
            for (int j = 0; j < c; ++j) {
                s1 += g[j];
                s2 += g[j] * y[j];
            }
            double* gx = x->grad.data() + (size_t)i * c;
            for (int j = 0; j < c; ++j) gx[j] += g[j] / d;
            gx[amin] += (s2 - s1) / d;
            gx[amax] -= s2 / d;
        }
    });
    return out;
}

TensorPtr gate_rows(const TensorPtr& r, const TensorPtr& v, double phi) {
    int rows = v->rows(), c = v->cols();
    if ((int)r->numel() != rows)
        throw ShapeError("gate_rows size mismatch " + r->shape_str() + " vs " +
                               v->shape_str());
    auto out = Tensor::make(v->shape);
    for (int i = 0; i < rows; ++i) {
        if (r->data[i] > phi)
            std::copy(v->data.begin() + (size_t)i * c, v->data.begin() + (size_t)(i + 1) * c,
                      out->data.begin() + (size_t)i * c);
    }
    attach(out, {r, v}, [r, v, rows, c, phi](Tensor& self) {
        for (int i = 0; i < rows; ++i) {
            if (r->data[i] <= phi) continue;
            for (int j = 0; j < c; ++j)
                v->grad[(size_t)i * c + j] += self.grad[(size_t)i * c + j];
        }
    });
    return out;
}

TensorPtr soft_slice_mix(const TensorPtr& bank, const TensorPtr& probs, int ell) {
    int lb = bank->rows(), d = bank->cols();
    if (ell < 1 || ell > lb)
        throw ShapeError("soft_slice_mix slice length out of range for " +
                               bank->shape_str());
    int j_count = lb - ell + 1;
    if ((int)probs->numel() != j_count)
        throw ShapeError("soft_slice_mix needs " + std::to_string(j_count) +
                               " probabilities, got " + probs->shape_str());
    auto out = Tensor::make({ell, d});
    for (int j = 0; j < j_count; ++j) {
        double p = probs->data[j];
        for (int rr = 0; rr < ell; ++rr)
            for (int cc = 0; cc < d; ++cc)
                out->data[(size_t)rr * d + cc] += p * bank->data[(size_t)(j + rr) * d + cc];
    }
    attach(out, {bank, probs}, [bank, probs, ell, d, j_count](Tensor& self) {
        for (int j = 0; j < j_count; ++j) {
            double p = probs->data[j];
            double acc = 0.0;
            for (int rr = 0; rr < ell; ++rr)
                for (int cc = 0; cc < d; ++cc) {
                    size_t oi = (size_t)rr * d + cc;
                    size_t bi = (size_t)(j + rr) * d + cc;
                    bank->grad[bi] += self.grad[oi] * p;
                    acc += self.grad[oi] * bank->data[bi];
                }
            probs->grad[j] += acc;
        }
    });
    return out;
}

TensorPtr reshape(const TensorPtr& x, std::vector<int> shape) {
    size_t n = 1;
    for (int d : shape) n *= (size_t)std::max(d, 0);
    if (shape.empty() || shape.size() > 2 || n != x->numel())
        throw ShapeError("reshape target incompatible with " + x->shape_str());
    auto out = Tensor::make(std::move(shape));
    out->data = x->data;
    attach(out, {x}, [x](Tensor& self) {
        for (size_t i = 0; i < x->numel(); ++i) x->grad[i] += self.grad[i];
    });
    return out;
}

}  // namespace teg::num::ops
