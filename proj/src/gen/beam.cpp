#include "teg/gen/beam.hpp"

#include <algorithm>
#include <cmath>

#include "teg/util/errors.hpp"

namespace teg::gen {

namespace {

struct Hyp {
    std::vector<int> dec_input; // BOS plus everything generated so far
    double cum = 0.0;
    bool finished = false;
};

struct Cand {
    double score;
    int token; // -1 marks a frozen finished hypothesis carried over
    int hyp;
};

GenResult finish(const Hyp& h) {
    GenResult r;
    r.tokens.assign(h.dec_input.begin() + 1, h.dec_input.end());
    r.cum_logp = h.cum;
    r.norm_score = r.tokens.empty() ? -HUGE_VAL : h.cum / (double)r.tokens.size();
    r.truncated = !h.finished;
    return r;
}

} // namespace

GenResult generate(const model::TegModel& m, const std::vector<int>& source_ids,
                   int n_topics, model::Mode mode, int width, int max_len) {
    if (width < 1) throw DataError("beam width must be >= 1");
    if (max_len < 1) throw DataError("max_len must be >= 1");
    num::NoGradGuard ng;

    auto enc = m.encode(source_ids, n_topics, mode, false);
    int steps = std::min(max_len, m.cfg.max_len - 1);
    std::vector<Hyp> beam{Hyp{{text::kBos}, 0.0, false}};

    for (int step = 0; step < steps; ++step) {
        bool any_open = false;
        std::vector<Cand> cands;
        std::vector<std::vector<double>> dists(beam.size());
        for (size_t i = 0; i < beam.size(); ++i) {
            if (beam[i].finished) {
                cands.push_back({beam[i].cum, -1, (int)i});
                continue;
            }
            any_open = true;
            dists[i] = m.next_distribution(enc, beam[i].dec_input, mode);
            for (int v = 0; v < (int)dists[i].size(); ++v)
                cands.push_back({beam[i].cum + std::log(dists[i][(size_t)v]), v, (int)i});
        }
        if (!any_open) break;

        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.token != b.token) return a.token < b.token;
            return a.hyp < b.hyp;
        });
        if ((int)cands.size() > width) cands.resize((size_t)width);

        std::vector<Hyp> next;
        next.reserve(cands.size());
        for (const auto& c : cands) {
            if (c.token < 0) {
                next.push_back(beam[(size_t)c.hyp]);
                continue;
            }
            Hyp h = beam[(size_t)c.hyp];
            h.dec_input.push_back(c.token);
            h.cum = c.score;
            h.finished = (c.token == text::kEos);
            next.push_back(std::move(h));
        }
        beam = std::move(next);
    }

    const Hyp* best = nullptr;
    bool want_finished = std::any_of(beam.begin(), beam.end(),
                                     [](const Hyp& h) { return h.finished; });
    double best_score = -HUGE_VAL;
    for (const auto& h : beam) {
        if (h.finished != want_finished) continue;
        int n = (int)h.dec_input.size() - 1;
        double s = n > 0 ? h.cum / (double)n : -HUGE_VAL;
        if (!best || s > best_score) {
            best = &h;
            best_score = s;
        }
    }
    return finish(*best);
}

GenResult greedy_generate(const model::TegModel& m, const std::vector<int>& source_ids,
                          int n_topics, model::Mode mode, int max_len) {
    if (max_len < 1) throw DataError("max_len must be >= 1");
    num::NoGradGuard ng;

    auto enc = m.encode(source_ids, n_topics, mode, false);
    int steps = std::min(max_len, m.cfg.max_len - 1);
    Hyp h{{text::kBos}, 0.0, false};
    for (int step = 0; step < steps && !h.finished; ++step) {
        auto dist = m.next_distribution(enc, h.dec_input, mode);
        int best = 0;
        for (int v = 1; v < (int)dist.size(); ++v)
            if (dist[(size_t)v] > dist[(size_t)best]) best = v;
        h.dec_input.push_back(best);
        h.cum += std::log(dist[(size_t)best]);
        h.finished = (best == text::kEos);
    }
    return finish(h);
}

std::string to_text(const std::vector<int>& tokens, const text::Vocab& vocab) {
    std::vector<int> ids = tokens;
    if (!ids.empty() && ids.back() == text::kEos) ids.pop_back();
    return text::join_tokens(vocab.decode(ids));
}

} // namespace teg::gen
