// Release gate: each numbered check prints one PASS/FAIL line and the
// process exits nonzero if any fail. C10 and C11 drive the real CLI binary;
// they read its path from TEG_CLI and the bundled corpus from TEG_CORPUS
// (both set by the test harness).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/gradcheck.hpp"
#include "support/tmpdir.hpp"
#include "support/toy.hpp"
#include "teg/csc/head.hpp"
#include "teg/data/pipeline.hpp"
#include "teg/gen/beam.hpp"
#include "teg/metrics/metrics.hpp"
#include "teg/prefix/prefix.hpp"
#include "teg/train/trainer.hpp"
#include "teg/util/rng.hpp"

using namespace teg;
using num::Tensor;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

// topic words copied verbatim into the essay, the smallest task the copy
// head should solve outright
std::vector<train::Example> copy_pairs(int n, int pool, uint64_t seed) {
    rng::Stream rs(seed);
    std::vector<train::Example> out;
    while ((int)out.size() < n) {
        int k = 2 + (int)rs.next_below(2);
        std::vector<std::string> topics;
        while ((int)topics.size() < k) {
            std::string w = "w" + std::to_string(rs.next_below((uint64_t)pool));
            bool dup = false;
            for (auto& t : topics) dup |= (t == w);
            if (!dup) topics.push_back(w);
        }
        std::string essay;
        for (size_t i = 0; i < topics.size(); ++i) essay += (i ? " " : "") + topics[i];
        out.push_back({topics, essay});
    }
    return out;
}

// every q-token appears in exactly one example, so only the copy path can
// reliably place it in the output
std::vector<train::Example> rare_pairs(int n) {
    std::vector<train::Example> out;
    for (int i = 0; i < n; ++i) {
        std::string rare = "q" + std::to_string(i);
        std::string anchor = "w" + std::to_string(i % 3);
        std::string tail = "w" + std::to_string(3 + i % 3);
        out.push_back({{rare, anchor}, anchor + " " + rare + " " + tail});
    }
    return out;
}

// ---------------------------------------------------------------- C1

Outcome c1_gradients() {
    Timer timer;
    auto vocab = testsupport::toy_vocab(6);
    auto cfg = testsupport::toy_config(vocab.size(), 8, 12, 6, 3);
    auto src = train::encode_topics({"w0", "w1"}, vocab, cfg.n_max);
    std::vector<int> target{text::kBos, vocab.id("w1"), vocab.id("w2"), vocab.id("w0"),
                            text::kEos};
    std::vector<int> input(target.begin(), target.end() - 1);
    std::vector<int> labels(target.begin() + 1, target.end());

    // the content-selection threshold is a hard switch, so the probe model
    // must keep every relevance value clear of it for finite differences
    for (uint64_t seed = 1; seed <= 60; ++seed) {
        auto m = model::TegModel::init(cfg, seed);
        bool margin_ok = true;
        for (auto mode : {model::Mode::GCS, model::Mode::GCS_IPT}) {
            num::NoGradGuard ng;
            auto fwd = m.forward(src, 2, input, mode, true);
            for (double r : fwd.head.r->data)
                margin_ok &= std::fabs(r - cfg.phi) >= 0.05;
        }
        if (!margin_ok) continue;

        double worst = 0.0;
        size_t checked = 0;
        std::string worst_at;
        for (auto mode : {model::Mode::GCS, model::Mode::GCS_IPT}) {
            auto params = m.set_trainable(mode);
            auto res = testsupport::gradcheck(
                [&] {
                    return train::nll_loss(m.forward(src, 2, input, mode, true).p_final,
                                           labels);
                },
                params);
            checked += res.checked;
            if (res.max_rel > worst) {
                worst = res.max_rel;
                worst_at = res.worst;
            }
        }
        bool ok = worst < 1e-4 && timer.secs() < 60.0;
        std::string d = "max rel err " + fmt(worst) + " over " + std::to_string(checked) +
                        " coordinates in both copy modes, " + fmt(timer.secs()) + "s";
        if (!ok) d += "; worst " + worst_at;
        return {ok, d};
    }
    return {false, "no init kept copy relevance clear of the threshold"};
}

// ---------------------------------------------------------------- C2

Outcome c2_distributions() {
    auto cfg = testsupport::toy_config(13, 16, 16, 6, 3);
    rng::Stream rs(42);
    int steps = 0;
    double worst_sum = 0.0, worst_masked = 0.0;
    for (uint64_t ms = 1; steps < 1000; ++ms) {
        auto m = model::TegModel::init(cfg, ms);
        auto mode = (ms % 2) ? model::Mode::GCS : model::Mode::GCS_IPT;
        for (int rep = 0; rep < 25 && steps < 1000; ++rep) {
            int n = 1 + (int)rs.next_below(3);
            std::vector<int> src;
            for (int i = 0; i < n; ++i) {
                if (i) src.push_back(text::kSep);
                src.push_back(text::kNumSpecials + (int)rs.next_below(8));
            }
            std::vector<int> dec{text::kBos};
            int extra = (int)rs.next_below(5);
            for (int j = 0; j < extra; ++j)
                dec.push_back(text::kNumSpecials + (int)rs.next_below(8));

            num::NoGradGuard ng;
            auto fwd = m.forward(src, n, dec, mode, false);
            int T = fwd.p_final->rows(), V = fwd.p_final->cols();
            for (int t = 0; t < T; ++t) {
                double sum = 0.0;
                for (int v = 0; v < V; ++v) {
                    double p = fwd.p_final->data[(size_t)t * V + v];
                    if (p < 0.0) return {false, "negative probability"};
                    sum += p;
                }
                worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
                for (int sp : {text::kPad, text::kBos, text::kSep})
                    worst_masked =
                        std::max(worst_masked, fwd.p_final->data[(size_t)t * V + sp]);
                double g = fwd.head.p_gen->data[(size_t)t];
                if (!(g > 0.0 && g < 1.0))
                    return {false, "gate left (0,1): " + fmt(g)};
                ++steps;
            }
        }
    }
    bool ok = worst_sum <= 1e-6 && worst_masked <= 1e-12;
    return {ok, std::to_string(steps) + " random steps, worst |sum-1| " + fmt(worst_sum) +
                    ", structural-token mass <= " + fmt(worst_masked)};
}

// ---------------------------------------------------------------- C3

Outcome c3_unit_oracles() {
    int fails = 0;
    std::string what;
    auto expect = [&](bool cond, const char* name) {
        if (!cond) {
            ++fails;
            what += std::string(what.empty() ? "" : ", ") + name;
        }
    };
    using V = std::vector<double>;

    expect(csc::context_vector({0.5, 0.5}, {{2, 0}, {0, 2}}) == V{1, 1}, "context symmetric");
    expect(csc::context_vector({0.3, 0.7}, {{1, 0}, {0, 1}}) == V{0.3, 0.7},
           "context weighted");
    expect(std::fabs(csc::cosine_similarity({1, 1}, {1, 0}) - 0.70711) <= 1e-5, "cosine");

    expect(csc::threshold_filter(0.5, {1, 2}, 0.2) == V{1, 2}, "filter open");
    expect(csc::threshold_filter(0.1, {1, 2}, 0.2) == V{0, 0}, "filter closed");
    expect(csc::threshold_filter(0.2, {1, 2}, 0.2) == V{0, 0}, "filter strict boundary");

    expect(csc::minmax_normalize({2, 4, 6}) == V{0, 0.5, 1}, "minmax affine");
    expect(csc::minmax_normalize({5, 5, 5}) == V{0, 0, 0}, "minmax degenerate");
    expect(csc::minmax_normalize({-1, 3}) == V{0, 1}, "minmax two-point");

    expect(csc::select_encoder_info(0.5, {2, 4, 6}, 0.2) == V{0, 2, 6}, "encoder info");
    expect(csc::select_decoder_info(0.9, {1, 2, 3}, 0.2) == V{0, 0, 0},
           "decoder info closed");

    expect(csc::generation_gate({0}, {0}, {0}, {0, 0, 0}, 0.0) == 0.5, "gate midpoint");
    expect(std::fabs(csc::generation_gate({0}, {0}, {0}, {0, 0, 0}, std::log(3.0)) - 0.75) <=
               1e-12,
           "gate 3:1");

    auto p1 = csc::copy_distribution({0.4, 0.6}, {7, 7}, 9);
    expect(p1[7] == 1.0, "copy accumulate");
    auto p2 = csc::copy_distribution({0.25, 0.75}, {3, 5}, 6);
    expect(p2[3] == 0.25 && p2[5] == 0.75, "copy scatter");
    auto p3 = csc::copy_distribution({0.2, 0.5, 0.3}, {3, 5, 3}, 6);
    expect(p3[3] == 0.5 && p3[5] == 0.5, "copy scatter-add");

    expect(csc::mix_distributions(1.0, {0.25, 0.75}, {1, 0}) == V{0.25, 0.75}, "mix all-gen");
    expect(csc::mix_distributions(0.0, {0.25, 0.75}, {1, 0}) == V{1, 0}, "mix all-copy");
    expect(csc::mix_distributions(0.5, {0.5, 0.5}, {1, 0}) == V{0.75, 0.25}, "mix half");

    return {fails == 0, fails == 0 ? "21 hand-checked cases exact" : "failed: " + what};
}

// ---------------------------------------------------------------- C4

Outcome c4_freeze() {
    Timer timer;
    auto examples = copy_pairs(8, 6, 17);
    auto vocab = train::build_vocab(examples);
    train::TrainConfig tc;
    tc.model = testsupport::toy_config(vocab.size(), 16, 16, 10, 3);
    tc.epochs = 50;  // 8 examples, batch 4: two optimizer steps per epoch
    tc.lr = 1e-3;
    tc.batch_size = 4;
    tc.seed = 3;
    auto enc = train::encode_dataset(examples, vocab, tc.model.n_max, tc.model.max_len);

    for (auto mode : {model::Mode::GCS_PT, model::Mode::GCS_IPT}) {
        tc.mode = mode;
        auto ref = model::TegModel::init(tc.model, rng::derive_seed(tc.seed, 1));
        auto res = train::train(enc, vocab, tc);
        auto& m = *res.model;
        if (m.params_checksum("base.") != ref.params_checksum("base."))
            return {false, std::string(model::mode_name(mode)) + ": base drifted"};
        if (m.params_checksum("prefix.bank.") == ref.params_checksum("prefix.bank."))
            return {false, std::string(model::mode_name(mode)) + ": bank never moved"};
        if (m.params_checksum("csc.") == ref.params_checksum("csc."))
            return {false, std::string(model::mode_name(mode)) + ": gate never moved"};
        bool sel_moved =
            m.params_checksum("prefix.selector.") != ref.params_checksum("prefix.selector.");
        if (sel_moved != (mode == model::Mode::GCS_IPT))
            return {false, std::string(model::mode_name(mode)) + ": selector wrong"};
    }
    bool ok = timer.secs() < 120.0;
    return {ok, "100 optimizer steps per prefix mode, base bitwise frozen, " +
                    fmt(timer.secs()) + "s"};
}

// ---------------------------------------------------------------- C5

Outcome c5_prefix() {
    for (int n = 1; n <= 5; ++n)
        if (prefix::subprefix_length(n, 30, 5) != 6 * n)
            return {false, "length schedule broke at n=" + std::to_string(n)};

    int L = 30, d = 8;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        rng::Stream rs(seed);
        auto h0 = Tensor::make({1, d});
        for (auto& x : h0->data) x = rs.gaussian();
        auto w = Tensor::make({L, d});
        for (auto& x : w->data) x = rs.gaussian(0.0, 0.5);
        auto b = Tensor::make({1, L});
        for (auto& x : b->data) x = rs.gaussian(0.0, 0.1);
        std::vector<num::TensorPtr> bk, bv;
        for (int l = 0; l < 2; ++l) {
            auto k = Tensor::make({L, d});
            auto v = Tensor::make({L, d});
            for (auto& x : k->data) x = rs.gaussian();
            for (auto& x : v->data) x = rs.gaussian();
            bk.push_back(k);
            bv.push_back(v);
        }
        for (int n = 1; n <= 5; ++n) {
            for (bool hard : {true, false}) {
                auto sel = prefix::select_subprefix(h0, n, bk, bv, w, b, 5, hard);
                int ell = 6 * n;
                if (sel.sel.ell != ell || sel.sel.idx < 0 || sel.sel.idx > L - ell)
                    return {false, "window out of bounds at n=" + std::to_string(n)};
                if (n == 5 && (sel.sel.idx != 0 || sel.sel.probs->numel() != 1))
                    return {false, "full-length request not pinned to start"};
            }
        }
    }

    // soft mixture equals explicit window enumeration on a bank of 6, window 2
    {
        rng::Stream rs(9);
        int Ls = 6, ds = 4;
        auto h0 = Tensor::make({1, ds});
        for (auto& x : h0->data) x = rs.gaussian();
        auto w = Tensor::make({Ls, ds});
        for (auto& x : w->data) x = rs.gaussian(0.0, 0.5);
        auto b = Tensor::make({1, Ls});
        for (auto& x : b->data) x = rs.gaussian(0.0, 0.1);
        auto bank_k = Tensor::make({Ls, ds});
        auto bank_v = Tensor::make({Ls, ds});
        for (auto& x : bank_k->data) x = rs.gaussian();
        for (auto& x : bank_v->data) x = rs.gaussian();

        auto sel = prefix::select_subprefix(h0, 1, {bank_k}, {bank_v}, w, b, 3, false);
        if (sel.sel.ell != 2) return {false, "window length for one topic should be 2"};
        int starts = Ls - 2 + 1;
        if (sel.sel.probs->numel() != (size_t)starts) return {false, "start count wrong"};
        double worst = 0.0;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < ds; ++c) {
                double mk = 0.0, mv = 0.0;
                for (int j = 0; j < starts; ++j) {
                    double pj = sel.sel.probs->data[(size_t)j];
                    mk += pj * bank_k->data[(size_t)(j + r) * ds + c];
                    mv += pj * bank_v->data[(size_t)(j + r) * ds + c];
                }
                worst = std::max(worst,
                                 std::fabs(mk - sel.k[0]->data[(size_t)r * ds + c]));
                worst = std::max(worst,
                                 std::fabs(mv - sel.v[0]->data[(size_t)r * ds + c]));
            }
        }
        if (worst > 1e-12) return {false, "soft mixture off enumeration by " + fmt(worst)};
        return {true, "lengths 6/12/18/24/30, windows in bounds over 20 inits, soft mix "
                      "within " +
                          fmt(worst) + " of enumeration"};
    }
}

// ---------------------------------------------------------------- C6

Outcome c6_overfit() {
    Timer timer;
    auto examples = copy_pairs(50, 20, 23);
    auto vocab = train::build_vocab(examples);
    train::TrainConfig tc;
    tc.model = testsupport::toy_config(vocab.size(), 32, 16, 6, 3);
    tc.mode = model::Mode::GCS;
    tc.epochs = 200;
    tc.lr = 3e-3;
    tc.batch_size = 8;
    tc.seed = 1;
    auto enc = train::encode_dataset(examples, vocab, tc.model.n_max, tc.model.max_len);
    auto res = train::train(enc, vocab, tc);
    double loss = res.log.back().loss;
    double acc = train::teacher_forced_accuracy(*res.model, enc, tc.mode);
    bool ok = acc >= 0.95 && loss < 0.1 && timer.secs() < 600.0;
    return {ok, "teacher-forced accuracy " + fmt(acc * 100) + "%, final loss " + fmt(loss) +
                    ", " + fmt(timer.secs()) + "s"};
}

// ---------------------------------------------------------------- C7

Outcome c7_copy_efficacy() {
    // recall is measured on topic sets whose rare token never occurred in
    // training: only a real copy path can route an untrained token id from
    // the source into the output
    auto all = rare_pairs(32);
    std::vector<train::Example> seen(all.begin(), all.begin() + 24);
    std::vector<train::Example> held(all.begin() + 24, all.end());
    auto vocab = train::build_vocab(all);
    train::TrainConfig tc;
    tc.model = testsupport::toy_config(vocab.size(), 32, 16, 6, 3);
    tc.epochs = 60;
    tc.lr = 3e-3;
    tc.batch_size = 8;
    auto enc = train::encode_dataset(seen, vocab, tc.model.n_max, tc.model.max_len);

    double mean_gcs = 0.0, mean_base = 0.0;
    for (uint64_t seed : {1u, 2u, 3u}) {
        for (auto mode : {model::Mode::GCS, model::Mode::Base}) {
            tc.mode = mode;
            tc.seed = seed;
            auto res = train::train(enc, vocab, tc);
            int hits = 0;
            for (auto& ex : held) {
                auto src = train::encode_topics(ex.topics, vocab, tc.model.n_max);
                auto g = gen::generate(*res.model, src, (int)ex.topics.size(), mode, 3, 6);
                int rare = vocab.id(ex.topics[0]);
                for (int t : g.tokens)
                    if (t == rare) {
                        ++hits;
                        break;
                    }
            }
            double recall = (double)hits / (double)held.size();
            (mode == model::Mode::GCS ? mean_gcs : mean_base) += recall / 3.0;
        }
    }
    double margin = mean_gcs - mean_base;
    bool ok = margin > 0.1;
    return {ok, "held-out rare-token recall with copy " + fmt(mean_gcs * 100) +
                    "% vs without " + fmt(mean_base * 100) + "%, margin " + fmt(margin) +
                    " over 3 seeds"};
}

// ---------------------------------------------------------------- C8

struct Exhaustive {
    const model::TegModel& m;
    const model::EncodeResult& enc;
    model::Mode mode;
    int max_len;

    gen::GenResult best_finished, best_unfinished;
    bool has_finished = false, has_unfinished = false;

    void visit(std::vector<int>& dec, double cum) {
        int produced = (int)dec.size() - 1;
        if (produced > 0 && dec.back() == text::kEos) {
            consider(dec, cum, false);
            return;
        }
        if (produced == max_len) {
            consider(dec, cum, true);
            return;
        }
        auto dist = m.next_distribution(enc, dec, mode);
        for (int v = 0; v < (int)dist.size(); ++v) {
            dec.push_back(v);
            visit(dec, cum + std::log(dist[(size_t)v]));
            dec.pop_back();
        }
    }

    void consider(const std::vector<int>& dec, double cum, bool truncated) {
        gen::GenResult r;
        r.tokens.assign(dec.begin() + 1, dec.end());
        r.cum_logp = cum;
        r.norm_score = cum / (double)r.tokens.size();
        r.truncated = truncated;
        auto& slot = truncated ? best_unfinished : best_finished;
        auto& flag = truncated ? has_unfinished : has_finished;
        if (!flag || r.norm_score > slot.norm_score) slot = r;
        flag = true;
    }

    gen::GenResult run() {
        std::vector<int> dec{text::kBos};
        visit(dec, 0.0);
        return has_finished ? best_finished : best_unfinished;
    }
};

Outcome c8_beam() {
    // width 1 must reproduce greedy decoding on fresh random models
    for (uint64_t seed = 100; seed < 120; ++seed) {
        auto cfg = testsupport::toy_config(13, 16, 16, 6, 3);
        auto m = model::TegModel::init(cfg, seed);
        auto mode = static_cast<model::Mode>(seed % 4);
        int n = 1 + (int)(seed % 3);
        std::vector<int> src;
        for (int i = 0; i < n; ++i) {
            if (i) src.push_back(text::kSep);
            src.push_back(text::kNumSpecials + (int)((seed + (uint64_t)i) % 8));
        }
        auto beam = gen::generate(m, src, n, mode, 1, 8);
        auto greedy = gen::greedy_generate(m, src, n, mode, 8);
        if (beam.tokens != greedy.tokens ||
            std::fabs(beam.cum_logp - greedy.cum_logp) > 1e-12)
            return {false, "width 1 diverged from greedy at init " + std::to_string(seed)};
    }

    // a beam wide enough to hold every candidate must equal exhaustive search
    auto cfg = testsupport::toy_config(5, 8, 16, 6, 3);
    cfg.n_heads = 2;
    for (uint64_t seed : {2u, 5u}) {
        auto m = model::TegModel::init(cfg, seed);
        std::vector<int> src{text::kUnk};
        for (auto mode : {model::Mode::Base, model::Mode::GCS}) {
            num::NoGradGuard ng;
            auto enc = m.encode(src, 1, mode, false);
            Exhaustive ex{m, enc, mode, 4, {}, {}, false, false};
            auto want = ex.run();
            auto got = gen::generate(m, src, 1, mode, 625, 4);
            if (got.tokens != want.tokens ||
                std::fabs(got.norm_score - want.norm_score) > 1e-12)
                return {false, std::string("exhaustive mismatch in ") +
                                   model::mode_name(mode) + " at init " +
                                   std::to_string(seed)};
        }
    }
    return {true, "width 1 == greedy on 20 models, width 625 == exhaustive on 5-token "
                  "vocabulary to length 4"};
}

// ---------------------------------------------------------------- C9

Outcome c9_metrics() {
    using T = metrics::Tokens;
    int fails = 0;
    std::string what;
    auto expect = [&](bool cond, const char* name) {
        if (!cond) {
            ++fails;
            what += std::string(what.empty() ? "" : ", ") + name;
        }
    };

    T abcd{"a", "b", "c", "d"};
    expect(metrics::bleu({abcd}, {abcd}) == 100.0, "bleu identity");
    expect(std::fabs(metrics::bleu({abcd}, {{"a", "b", "c", "d", "e"}}) - 77.88) <= 0.01,
           "bleu brevity");
    T left, right;
    for (int i = 0; i < 30; ++i) {
        left.push_back("x" + std::to_string(i));
        right.push_back("y" + std::to_string(i));
    }
    expect(metrics::bleu({left}, {right}) < 5.0, "bleu disjoint");

    expect(metrics::dist2({{"a", "b", "c"}}) == 100.0, "dist2 unique");
    expect(std::fabs(metrics::dist2({{"a", "b", "a", "b"}}) - 200.0 / 3.0) <= 1e-9,
           "dist2 repeat");
    T e{"a", "b", "c", "a"};
    expect(std::fabs(metrics::dist2({e, e}) - metrics::dist2({e}) / 2.0) <= 1e-12,
           "dist2 duplication law");

    // two-dimensional table: "sun" on the x axis, "moon" at 60 degrees
    auto vocab = text::Vocab::build({{"sun"}, {"moon"}});
    auto table = Tensor::make({(int)vocab.size(), 2});
    table->data[(size_t)vocab.id("sun") * 2] = 1.0;
    table->data[(size_t)vocab.id("moon") * 2] = 0.5;
    table->data[(size_t)vocab.id("moon") * 2 + 1] = std::sqrt(3.0) / 2.0;
    expect(std::fabs(metrics::consistency({"sun", "moon"}, {"sun", "moon"}, vocab, table) -
                     100.0) <= 1e-9,
           "consistency verbatim");
    expect(metrics::consistency({}, {"sun"}, vocab, table) == 0.0, "consistency empty");
    expect(std::fabs(metrics::consistency({"sun"}, {"sun", "moon"}, vocab, table) - 75.0) <=
               1e-9,
           "consistency mixed");

    std::vector<metrics::NoveltyRecord> corpus{{{"a", "b", "c"}, {"t"}}};
    expect(metrics::novelty_term({{"a", "b", "c"}, {"t"}}, corpus) == 0.0,
           "novelty identical");
    expect(metrics::novelty({{{"x", "y", "z"}, {"t"}}}, corpus) == 100.0,
           "novelty disjoint");
    std::vector<metrics::NoveltyRecord> corpus2{{{"b", "c", "d"}, {"t"}}};
    expect(std::fabs(metrics::novelty_term({{"a", "b", "c"}, {"t"}}, corpus2) - 2.0 / 3.0) <=
               1e-12,
           "novelty one-third overlap");

    return {fails == 0, fails == 0 ? "12 hand-checked cases exact" : "failed: " + what};
}

// ---------------------------------------------------------------- C10

Outcome c10_ablation_cli() {
    const char* cli = std::getenv("TEG_CLI");
    const char* corpus = std::getenv("TEG_CORPUS");
    if (!cli || !corpus) return {false, "TEG_CLI and TEG_CORPUS must point at the binary and corpus"};
    Timer timer;
    testsupport::TempDir tmp("teg_accept_ablate");

    std::string prep = tmp.sub("prep");
    std::string prepare_cmd = q(cli) + " prepare " + q(corpus) + " --out " + q(prep) +
                              " --train-size 500 --test-size 50 --seed 5 > " +
                              q(tmp.sub("prepare.log")) + " 2>&1";
    if (int rc = run_cli(prepare_cmd); rc != 0)
        return {false, "prepare exited " + std::to_string(rc)};

    std::string common = " --data " + q(prep) +
                         " --d-model 16 --heads 4 --ff 32 --max-len 64 --epochs 2"
                         " --lr 3e-3 --batch 16 --beam 3 --seed 7 --max-new 12";
    for (const char* out : {"ab1", "ab2"}) {
        std::string cmd = q(cli) + " ablate" + common + " --out " + q(tmp.sub(out)) + " > " +
                          q(tmp.sub(std::string(out) + ".log")) + " 2>&1";
        if (int rc = run_cli(cmd); rc != 0)
            return {false, std::string("ablate exited ") + std::to_string(rc) + ", see " +
                               tmp.sub(std::string(out) + ".log")};
    }

    auto t1 = slurp(tmp.sub("ab1") + "/ablation.tsv");
    auto t2 = slurp(tmp.sub("ab2") + "/ablation.tsv");
    if (t1.empty()) return {false, "ablation.tsv missing or empty"};
    if (t1 != t2) return {false, "reruns disagree byte-for-byte"};

    std::istringstream in(t1);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::string> modes;
    double dist2_base = -1.0, dist2_ipt = -1.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string mode;
        double b, d2, cons, nov;
        row >> mode >> b >> d2 >> cons >> nov;
        modes.push_back(mode);
        if (mode == "base") dist2_base = d2;
        if (mode == "gcs-ipt") dist2_ipt = d2;
    }
    std::vector<std::string> want{"base", "gcs", "gcs-pt", "gcs-ipt"};
    if (modes != want) return {false, "table rows are not base/gcs/gcs-pt/gcs-ipt"};

    // directional reading stays informational: toy-scale trends are noisy
    std::string direction = (dist2_ipt >= dist2_base)
                                ? "bigram diversity gcs-ipt >= base (" + fmt(dist2_ipt) +
                                      " vs " + fmt(dist2_base) + ")"
                                : "note: bigram diversity gcs-ipt < base (" + fmt(dist2_ipt) +
                                      " vs " + fmt(dist2_base) + "), informational only";
    return {true, "4-row table deterministic across reruns, " + direction + ", " +
                      fmt(timer.secs()) + "s"};
}

// ---------------------------------------------------------------- C11

Outcome c11_pipeline_cli() {
    const char* cli = std::getenv("TEG_CLI");
    const char* corpus = std::getenv("TEG_CORPUS");
    if (!cli || !corpus) return {false, "TEG_CLI and TEG_CORPUS must point at the binary and corpus"};
    testsupport::TempDir tmp("teg_accept_prepare");

    for (const char* out : {"p1", "p2"}) {
        std::string cmd = q(cli) + " prepare " + q(corpus) + " --out " + q(tmp.sub(out)) +
                          " --train-size 500 --test-size 50 --seed 5 > " +
                          q(tmp.sub(std::string(out) + ".log")) + " 2>&1";
        if (int rc = run_cli(cmd); rc != 0)
            return {false, std::string("prepare exited ") + std::to_string(rc)};
    }
    for (const char* f : {"train.jsonl", "test.jsonl", "topics.txt", "manifest.json"}) {
        auto a = slurp(tmp.sub("p1") + "/" + f);
        auto b = slurp(tmp.sub("p2") + "/" + f);
        if (a.empty()) return {false, std::string(f) + " missing or empty"};
        if (a != b) return {false, std::string(f) + " differs between reruns"};
    }

    auto manifest = nlohmann::json::parse(slurp(tmp.sub("p1") + "/manifest.json"));
    if (manifest.at("counts").at("paragraphs").get<int>() != 1000)
        return {false, "bundled corpus should hold exactly 1000 paragraphs"};
    if (manifest.at("counts").at("train").get<int>() != 500 ||
        manifest.at("counts").at("test").get<int>() != 50)
        return {false, "split sizes not honored"};

    auto train_set = train::load_jsonl(tmp.sub("p1") + "/train.jsonl");
    auto test_set = train::load_jsonl(tmp.sub("p1") + "/test.jsonl");
    int five_topic = 0;
    for (auto* set : {&train_set, &test_set}) {
        for (auto& ex : *set) {
            int wc = data::word_count(ex.essay);
            if (wc < 50 || wc > 200)
                return {false, "essay of " + std::to_string(wc) + " words escaped the filter"};
            if (ex.topics.empty() || ex.topics.size() > 5)
                return {false, "topic count outside 1..5"};
            five_topic += ex.topics.size() == 5;
        }
    }
    if (five_topic == 0) return {false, "default of five topics per text never reached"};
    return {true, "byte-identical reruns, 550 examples all within 50..200 words, " +
                      std::to_string(five_topic) + " carry the default five topics"};
}

}  // namespace

int main() {
    struct Row {
        const char* id;
        const char* what;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {"C1", "full-pipeline gradients match central differences", c1_gradients},
        {"C2", "output distributions stay on the simplex with a strict gate", c2_distributions},
        {"C3", "copy and content-selection unit oracles", c3_unit_oracles},
        {"C4", "prefix training leaves the base bitwise frozen", c4_freeze},
        {"C5", "variable-length prefix windows and soft mixture", c5_prefix},
        {"C6", "copy-task overfit reaches 95% teacher-forced accuracy", c6_overfit},
        {"C7", "copy head lifts rare-token recall over the plain model", c7_copy_efficacy},
        {"C8", "beam search matches greedy and exhaustive references", c8_beam},
        {"C9", "metric hand oracles", c9_metrics},
        {"C10", "ablation CLI emits a deterministic four-mode table", c10_ablation_cli},
        {"C11", "prepare CLI is byte-reproducible and honors its filters", c11_pipeline_cli},
    };

    int fails = 0;
    for (const auto& row : rows) {
        Outcome out;
        try {
            out = row.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        fails += !out.ok;
        std::printf("%-4s %s  %s%s%s\n", row.id, out.ok ? "PASS" : "FAIL", row.what,
                    out.detail.empty() ? "" : " - ", out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/11 criteria passed\n", 11 - fails);
    return fails;
}
