#include "teg/csc/head.hpp"

#include <cmath>

#include "teg/num/ops.hpp"
#include "teg/util/errors.hpp"

namespace teg::csc {

namespace ops = num::ops;
using num::Tensor;
using num::TensorPtr;

namespace {

void check_simplex_rows(const TensorPtr& p, const char* what) {
    int r = p->rows(), c = p->cols();
    for (int i = 0; i < r; ++i) {
        double sum = 0.0;
        for (int j = 0; j < c; ++j) sum += p->data[(size_t)i * c + j];
        if (std::fabs(sum - 1.0) > 1e-6)
            throw NumericError(std::string(what) + " row off the probability simplex (sum " +
                               std::to_string(sum) + ")");
    }
}

}  // namespace

HeadOutput run_head(const TensorPtr& alpha, const TensorPtr& states, const TensorPtr& s,
                    const TensorPtr& p_vocab, const std::vector<int>& source_ids,
                    const TensorPtr& gate_w, const TensorPtr& gate_b, double phi) {
    check_simplex_rows(alpha, "attention");
    check_simplex_rows(p_vocab, "vocabulary distribution");

    HeadOutput out;
    out.c = ops::matmul(alpha, states);
    out.r = ops::cosine_rows(out.c, s);
    out.ri = ops::gate_rows(out.r, ops::mul(ops::minmax_rows(out.c), out.c), phi);
    out.ro = ops::gate_rows(ops::affine(out.r, -1.0, 1.0),
                            ops::mul(ops::minmax_rows(s), s), phi);
    auto gate_in = ops::concat_cols({out.c, out.ri, out.ro});
    out.p_gen = ops::sigmoid(ops::add_rowvec(ops::matmul_nt(gate_in, gate_w), gate_b));
    out.p_copy = ops::scatter_add_cols(alpha, source_ids, p_vocab->cols());
    out.p_final = ops::add(ops::mul_colvec(p_vocab, out.p_gen),
                           ops::mul_colvec(out.p_copy, ops::affine(out.p_gen, -1.0, 1.0)));
    return out;
}

std::vector<double> context_vector(const std::vector<double>& alpha,
                                   const std::vector<std::vector<double>>& states) {
    if (alpha.size() != states.size())
        throw ShapeError("attention length " + std::to_string(alpha.size()) +
                         " does not match state count " + std::to_string(states.size()));
    if (states.empty()) throw ShapeError("context_vector over no states");
    std::vector<double> c(states[0].size(), 0.0);
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (states[i].size() != c.size()) throw ShapeError("ragged encoder states");
        for (size_t j = 0; j < c.size(); ++j) c[j] += alpha[i] * states[i][j];
    }
    return c;
}

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw ShapeError("cosine_similarity dimension mismatch " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    if (nu < 1e-12 || nv < 1e-12) return 0.0;
    return dot / (nu * nv);
}

std::vector<double> threshold_filter(double r, const std::vector<double>& v, double phi) {
    if (r > phi) return v;
    return std::vector<double>(v.size(), 0.0);
}

std::vector<double> minmax_normalize(const std::vector<double>& v) {
    if (v.empty()) throw ShapeError("minmax_normalize of an empty vector");
    double mn = v[0], mx = v[0];
    for (double x : v) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }
    std::vector<double> out(v.size(), 0.0);
    if (mx == mn) return out;
    for (size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mn) / (mx - mn);
    return out;
}

std::vector<double> select_encoder_info(double r, const std::vector<double>& h_bar, double phi) {
    auto mask = threshold_filter(r, minmax_normalize(h_bar), phi);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] *= h_bar[i];
    return mask;
}

std::vector<double> select_decoder_info(double r, const std::vector<double>& s, double phi) {
    auto mask = threshold_filter(1.0 - r, minmax_normalize(s), phi);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] *= s[i];
    return mask;
}

double generation_gate(const std::vector<double>& c, const std::vector<double>& ri,
                       const std::vector<double>& ro, const std::vector<double>& w, double b) {
    if (w.size() != c.size() + ri.size() + ro.size())
        throw ShapeError("gate weight length does not match [c; ri; ro]");
    double z = b;
    size_t k = 0;
    for (double x : c) z += w[k++] * x;
    for (double x : ri) z += w[k++] * x;
    for (double x : ro) z += w[k++] * x;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> copy_distribution(const std::vector<double>& alpha,
                                      const std::vector<int>& source_ids, int vocab_size) {
    if (alpha.size() != source_ids.size())
        throw ShapeError("attention length does not match source id count");
    std::vector<double> p((size_t)vocab_size, 0.0);
    for (size_t i = 0; i < alpha.size(); ++i) {
        int id = source_ids[i];
        if (id < 0 || id >= vocab_size)
            throw ShapeError("source id " + std::to_string(id) + " outside vocabulary of " +
                             std::to_string(vocab_size));
        p[(size_t)id] += alpha[i];
    }
    return p;
}

std::vector<double> mix_distributions(double p_gen, const std::vector<double>& p_vocab,
                                      const std::vector<double>& p_copy) {
    if (p_vocab.size() != p_copy.size())
        throw ShapeError("distribution size mismatch in mixture");
    auto check = [](const std::vector<double>& p, const char* what) {
        double sum = 0.0;
        for (double x : p) sum += x;
        if (std::fabs(sum - 1.0) > 1e-6)
            throw NumericError(std::string(what) + " off the probability simplex (sum " +
                               std::to_string(sum) + ")");
    };
    check(p_vocab, "vocabulary distribution");
    check(p_copy, "copy distribution");
    std::vector<double> out(p_vocab.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = p_gen * p_vocab[i] + (1.0 - p_gen) * p_copy[i];
    return out;
}

}  // namespace teg::csc
