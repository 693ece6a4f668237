#include "teg/model/model.hpp"

#include <cmath>

#include "teg/num/ops.hpp"
#include "teg/text/vocab.hpp"
#include "teg/util/fnv.hpp"
#include "teg/util/rng.hpp"

namespace teg::model {

namespace ops = num::ops;
using num::Tensor;
using num::TensorPtr;

namespace {

struct AttnParams {
    TensorPtr wq, wk, wv, wo, bq, bk, bv, bo;
};

AttnParams attn_params(const TegModel& m, const std::string& stem) {
    return {m.param(stem + ".wq"), m.param(stem + ".wk"), m.param(stem + ".wv"),
            m.param(stem + ".wo"), m.param(stem + ".bq"), m.param(stem + ".bk"),
            m.param(stem + ".bv"), m.param(stem + ".bo")};
}

struct AttnResult {
    TensorPtr out;
    TensorPtr alpha_avg;
};

// Multi-head attention. extra_k/extra_v, when given, are prepended as raw
// per-layer key/value rows (prefix tuning style: they bypass the input
// projections). mask, when given, is added to the score matrix pre-softmax
// and must already cover any extra columns.
AttnResult multi_head_attention(const AttnParams& p, const TensorPtr& q_in,
                                const TensorPtr& kv_in, const TensorPtr& mask, int n_heads,
                                bool want_alpha, const TensorPtr& extra_k = nullptr,
                                const TensorPtr& extra_v = nullptr) {
    int d = q_in->cols();
    int dh = d / n_heads;
    double scale = 1.0 / std::sqrt((double)dh);

    auto q = ops::add_rowvec(ops::matmul_nt(q_in, p.wq), p.bq);
    auto k = ops::add_rowvec(ops::matmul_nt(kv_in, p.wk), p.bk);
    auto v = ops::add_rowvec(ops::matmul_nt(kv_in, p.wv), p.bv);
    if (extra_k) k = ops::concat_rows({extra_k, k});
    if (extra_v) v = ops::concat_rows({extra_v, v});

    std::vector<TensorPtr> ctx_heads;
    TensorPtr alpha_sum;
    for (int h = 0; h < n_heads; ++h) {
        auto qh = ops::slice_cols(q, h * dh, (h + 1) * dh);
        auto kh = ops::slice_cols(k, h * dh, (h + 1) * dh);
        auto vh = ops::slice_cols(v, h * dh, (h + 1) * dh);
        auto scores = ops::smul(ops::matmul_nt(qh, kh), scale);
        if (mask) scores = ops::add(scores, mask);
        auto ah = ops::softmax_rows(scores);
        ctx_heads.push_back(ops::matmul(ah, vh));
        if (want_alpha) alpha_sum = alpha_sum ? ops::add(alpha_sum, ah) : ah;
    }
    AttnResult res;
    res.out = ops::add_rowvec(ops::matmul_nt(ops::concat_cols(ctx_heads), p.wo), p.bo);
    if (want_alpha) res.alpha_avg = ops::smul(alpha_sum, 1.0 / n_heads);
    return res;
}

TensorPtr feed_forward(const TensorPtr& x, const TensorPtr& w1, const TensorPtr& b1,
                       const TensorPtr& w2, const TensorPtr& b2) {
    auto h = ops::relu(ops::add_rowvec(ops::matmul_nt(x, w1), b1));
    return ops::add_rowvec(ops::matmul_nt(h, w2), b2);
}

}  // namespace

TensorPtr TegModel::add_param(const std::string& name, std::vector<int> shape) {
    auto t = Tensor::make(std::move(shape), true);
    params_.emplace_back(name, t);
    by_name_[name] = t;
    return t;
}

TensorPtr TegModel::param(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw DataError("no parameter named " + name);
    return it->second;
}

TegModel TegModel::init(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    TegModel m;
    m.cfg = cfg;
    int d = cfg.d_model, ff = cfg.d_ff, V = cfg.vocab_size, L = cfg.prefix_len;

    auto attn = [&](const std::string& stem) {
        for (const char* w : {".wq", ".wk", ".wv", ".wo"}) m.add_param(stem + w, {d, d});
        for (const char* b : {".bq", ".bk", ".bv", ".bo"}) m.add_param(stem + b, {1, d});
    };
    auto ln = [&](const std::string& stem) {
        m.add_param(stem + ".g", {1, d});
        m.add_param(stem + ".b", {1, d});
    };
    auto ffn = [&](const std::string& stem) {
        m.add_param(stem + ".w1", {ff, d});
        m.add_param(stem + ".b1", {1, ff});
        m.add_param(stem + ".w2", {d, ff});
        m.add_param(stem + ".b2", {1, d});
    };

    m.add_param("base.embed", {V, d});
    for (int i = 0; i < cfg.enc_layers; ++i) {
        std::string s = "base.enc." + std::to_string(i);
        ln(s + ".ln1");
        attn(s + ".attn");
        ln(s + ".ln2");
        ffn(s + ".ff");
    }
    ln("base.enc.ln_f");
    for (int i = 0; i < cfg.dec_layers; ++i) {
        std::string s = "base.dec." + std::to_string(i);
        ln(s + ".ln1");
        attn(s + ".self");
        ln(s + ".ln2");
        attn(s + ".cross");
        ln(s + ".ln3");
        ffn(s + ".ff");
    }
    ln("base.dec.ln_f");
    m.add_param("base.out.w", {V, d});
    m.add_param("base.out.b", {1, V});

    m.add_param("csc.gate.w", {1, 3 * d});
    m.add_param("csc.gate.b", {1, 1});

    for (int i = 0; i < cfg.enc_layers; ++i) {
        std::string s = "prefix.bank." + std::to_string(i);
        m.add_param(s + ".k", {L, d});
        m.add_param(s + ".v", {L, d});
    }
    m.add_param("prefix.selector.w", {L, d});
    m.add_param("prefix.selector.b", {1, L});

    // deterministic init: gaussian 0.02 for weights, 0 for biases, layer
    // norms at identity
    rng::Stream rng(rng::derive_seed(seed, 0xa11));
    for (auto& [name, t] : m.params_) {
        std::string leaf = name.substr(name.rfind('.') + 1);
        bool is_ln_gain = leaf == "g";
        bool is_bias = !leaf.empty() && leaf[0] == 'b';
        if (is_ln_gain) {
            std::fill(t->data.begin(), t->data.end(), 1.0);
        } else if (is_bias) {
            std::fill(t->data.begin(), t->data.end(), 0.0);
        } else {
            for (auto& x : t->data) x = rng.gaussian(0.0, 0.02);
        }
    }
    m.build_constants();
    return m;
}

void TegModel::build_constants() {
    int d = cfg.d_model, V = cfg.vocab_size;
    pos_table_ = Tensor::make({cfg.max_len, d});
    for (int p = 0; p < cfg.max_len; ++p)
        for (int i = 0; i < d; ++i) {
            double angle = p / std::pow(10000.0, (double)(2 * (i / 2)) / d);
            pos_table_->data[(size_t)p * d + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    logit_mask_ = Tensor::make({1, V});
    logit_mask_->data[text::kPad] = -1e30;
    logit_mask_->data[text::kBos] = -1e30;
    logit_mask_->data[text::kSep] = -1e30;
}

std::vector<std::pair<std::string, TensorPtr>> TegModel::set_trainable(Mode mode) {
    auto in_set = [mode](const std::string& name) {
        switch (mode) {
            case Mode::Base: return name.rfind("base.", 0) == 0;
            case Mode::GCS:
                return name.rfind("base.", 0) == 0 || name.rfind("csc.", 0) == 0;
            case Mode::GCS_PT:
                return name.rfind("prefix.bank.", 0) == 0 || name.rfind("csc.", 0) == 0;
            case Mode::GCS_IPT:
                return name.rfind("prefix.", 0) == 0 || name.rfind("csc.", 0) == 0;
        }
        return false;
    };
    std::vector<std::pair<std::string, TensorPtr>> out;
    for (auto& [name, t] : params_) {
        t->requires_grad = in_set(name);
        if (t->requires_grad) out.emplace_back(name, t);
    }
    return out;
}

EncodeResult TegModel::encode(const std::vector<int>& source_ids, int n_topics, Mode mode,
                              bool soft_prefix) const {
    if (source_ids.empty()) throw DataError("cannot encode an empty topic sequence");
    int S = (int)source_ids.size();
    if (S > cfg.max_len)
        throw ShapeError("source length " + std::to_string(S) + " exceeds max_len " +
                         std::to_string(cfg.max_len));

    EncodeResult res;
    res.source_ids = source_ids;

    auto emb = ops::gather_rows(param("base.embed"), source_ids);
    res.h0 = ops::mean_rows(emb);

    prefix::SelectedPrefix sel;
    bool with_prefix = mode_has_prefix(mode);
    if (with_prefix) {
        std::vector<TensorPtr> bank_k, bank_v;
        for (int i = 0; i < cfg.enc_layers; ++i) {
            bank_k.push_back(param("prefix.bank." + std::to_string(i) + ".k"));
            bank_v.push_back(param("prefix.bank." + std::to_string(i) + ".v"));
        }
        if (mode_improved(mode)) {
            sel = prefix::select_subprefix(res.h0, n_topics, bank_k, bank_v,
                                           param("prefix.selector.w"),
                                           param("prefix.selector.b"), cfg.n_max, !soft_prefix);
        } else {
            sel = prefix::full_prefix(bank_k, bank_v);
        }
        res.sel = sel.sel;
    }

    auto x = ops::add(ops::smul(emb, std::sqrt((double)cfg.d_model)),
                      ops::slice_rows(pos_table_, 0, S));
    for (int i = 0; i < cfg.enc_layers; ++i) {
        std::string s = "base.enc." + std::to_string(i);
        auto normed = ops::layernorm_rows(x, param(s + ".ln1.g"), param(s + ".ln1.b"));
        auto attn = multi_head_attention(attn_params(*this, s + ".attn"), normed, normed, nullptr,
                                         cfg.n_heads, false,
                                         with_prefix ? sel.k[(size_t)i] : nullptr,
                                         with_prefix ? sel.v[(size_t)i] : nullptr);
        x = ops::add(x, attn.out);
        auto normed2 = ops::layernorm_rows(x, param(s + ".ln2.g"), param(s + ".ln2.b"));
        x = ops::add(x, feed_forward(normed2, param(s + ".ff.w1"), param(s + ".ff.b1"),
                                     param(s + ".ff.w2"), param(s + ".ff.b2")));
    }
    res.states = ops::layernorm_rows(x, param("base.enc.ln_f.g"), param("base.enc.ln_f.b"));
    if (with_prefix) {
        res.cross_k_extra = sel.k.back();
        res.cross_v_extra = sel.v.back();
    }
    return res;
}

DecodeResult TegModel::decode(const std::vector<int>& decoder_input_ids,
                              const EncodeResult& enc) const {
    if (decoder_input_ids.empty() || decoder_input_ids[0] != text::kBos)
        throw DataError("decoder input must start with the begin-of-sequence token");
    int T = (int)decoder_input_ids.size();
    if (T > cfg.max_len)
        throw ShapeError("decode step " + std::to_string(T) + " reached max_len " +
                         std::to_string(cfg.max_len));

    auto emb = ops::gather_rows(param("base.embed"), decoder_input_ids);
    auto x = ops::add(ops::smul(emb, std::sqrt((double)cfg.d_model)),
                      ops::slice_rows(pos_table_, 0, T));

    auto causal = Tensor::make({T, T});
    for (int i = 0; i < T; ++i)
        for (int j = i + 1; j < T; ++j) causal->data[(size_t)i * T + j] = -1e30;

    DecodeResult res;
    for (int i = 0; i < cfg.dec_layers; ++i) {
        std::string s = "base.dec." + std::to_string(i);
        auto n1 = ops::layernorm_rows(x, param(s + ".ln1.g"), param(s + ".ln1.b"));
        auto self = multi_head_attention(attn_params(*this, s + ".self"), n1, n1, causal, cfg.n_heads,
                                         false);
        x = ops::add(x, self.out);

        bool last = i == cfg.dec_layers - 1;
        auto n2 = ops::layernorm_rows(x, param(s + ".ln2.g"), param(s + ".ln2.b"));
        auto cross = multi_head_attention(attn_params(*this, s + ".cross"), n2, enc.states, nullptr,
                                          cfg.n_heads, last, enc.cross_k_extra,
                                          enc.cross_v_extra);
        x = ops::add(x, cross.out);
        if (last) res.alpha_full = cross.alpha_avg;

        auto n3 = ops::layernorm_rows(x, param(s + ".ln3.g"), param(s + ".ln3.b"));
        x = ops::add(x, feed_forward(n3, param(s + ".ff.w1"), param(s + ".ff.b1"),
                                     param(s + ".ff.w2"), param(s + ".ff.b2")));
    }
    res.s = ops::layernorm_rows(x, param("base.dec.ln_f.g"), param("base.dec.ln_f.b"));

    int ell = enc.cross_k_extra ? enc.cross_k_extra->rows() : 0;
    int total = res.alpha_full->cols();
    auto real = ell > 0 ? ops::slice_cols(res.alpha_full, ell, total) : res.alpha_full;

    // structural tokens (pad/bos/sep) are not copyable content, so the copy
    // path drops their attention mass and renormalizes over what remains
    bool any_structural = false;
    for (int id : enc.source_ids)
        any_structural |= (id == text::kPad || id == text::kBos || id == text::kSep);
    if (any_structural) {
        int T = real->rows(), S = real->cols();
        auto mask = Tensor::make({T, S});
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < S; ++i) {
                int id = enc.source_ids[(size_t)i];
                bool drop = id == text::kPad || id == text::kBos || id == text::kSep;
                mask->data[(size_t)t * S + i] = drop ? 0.0 : 1.0;
            }
        res.alpha = ops::normalize_rows(ops::mul(real, mask));
    } else {
        res.alpha = ell > 0 ? ops::normalize_rows(real) : real;
    }

    auto logits = ops::add_rowvec(ops::matmul_nt(res.s, param("base.out.w")),
                                  param("base.out.b"));
    res.p_vocab = ops::softmax_rows(ops::add_rowvec(logits, logit_mask_));
    return res;
}

ForwardResult TegModel::forward(const std::vector<int>& source_ids, int n_topics,
                                const std::vector<int>& decoder_input_ids, Mode mode,
                                bool soft_prefix) const {
    ForwardResult res;
    res.enc = encode(source_ids, n_topics, mode, soft_prefix);
    res.dec = decode(decoder_input_ids, res.enc);
    if (mode_has_copy(mode)) {
        res.head = csc::run_head(res.dec.alpha, res.enc.states, res.dec.s, res.dec.p_vocab,
                                 res.enc.source_ids, param("csc.gate.w"), param("csc.gate.b"),
                                 cfg.phi);
        res.p_final = res.head.p_final;
    } else {
        res.p_final = res.dec.p_vocab;
    }
    return res;
}

std::vector<double> TegModel::next_distribution(const EncodeResult& enc,
                                                const std::vector<int>& decoder_input_ids,
                                                Mode mode) const {
    num::NoGradGuard ng;
    auto dec = decode(decoder_input_ids, enc);
    TensorPtr p;
    if (mode_has_copy(mode)) {
        auto head = csc::run_head(dec.alpha, enc.states, dec.s, dec.p_vocab, enc.source_ids,
                                  param("csc.gate.w"), param("csc.gate.b"), cfg.phi);
        p = head.p_final;
    } else {
        p = dec.p_vocab;
    }
    int T = p->rows(), V = p->cols();
    std::vector<double> out((size_t)V);
    std::copy(p->data.begin() + (size_t)(T - 1) * V, p->data.end(), out.begin());
    return out;
}

uint64_t TegModel::params_checksum(const std::string& name_prefix) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (auto& [name, t] : params_) {
        if (!name_prefix.empty() && name.rfind(name_prefix, 0) != 0) continue;
        h = util::fnv1a64(name.data(), name.size(), h);
        h = util::fnv1a64(t->data.data(), t->data.size() * sizeof(double), h);
    }
    return h;
}

}  // namespace teg::model
