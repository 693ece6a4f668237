#include "teg/train/ablate.hpp"

#include <cstdio>
#include <filesystem>

#include "teg/gen/beam.hpp"
#include "teg/metrics/metrics.hpp"
#include "teg/util/errors.hpp"

namespace teg::train {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

} // namespace

AblationResult run_ablation(const std::vector<Example>& train_set,
                            const std::vector<Example>& eval_set, TrainConfig base_cfg,
                            int gen_max_len) {
    if (train_set.empty() || eval_set.empty())
        throw DataError("ablation needs non-empty train and eval sets");

    auto vocab = build_vocab(train_set);
    base_cfg.model.vocab_size = vocab.size();
    base_cfg.validate();
    auto encoded = encode_dataset(train_set, vocab, base_cfg.model.n_max, base_cfg.model.max_len);
    if (gen_max_len <= 0) gen_max_len = base_cfg.model.max_len - 1;

    std::vector<metrics::NoveltyRecord> corpus;
    for (const auto& ex : train_set)
        corpus.push_back({text::tokenize(ex.essay), ex.topics});

    const model::Mode modes[] = {model::Mode::Base, model::Mode::GCS, model::Mode::GCS_PT,
                                 model::Mode::GCS_IPT};
    AblationResult result;
    for (auto mode : modes) {
        TrainConfig cfg = base_cfg;
        cfg.mode = mode;
        if (!base_cfg.out_dir.empty())
            cfg.out_dir = (fs::path(base_cfg.out_dir) / model::mode_name(mode)).string();

        auto trained = train(encoded, vocab, cfg);
        const auto& m = *trained.model;

        std::vector<metrics::Tokens> cands, refs;
        std::vector<metrics::NoveltyRecord> generated;
        double cons_sum = 0.0;
        for (const auto& ex : eval_set) {
            auto enc = encode_example(ex, vocab, cfg.model.n_max, cfg.model.max_len);
            auto gen = gen::generate(m, enc.source, enc.n_topics, mode, cfg.beam_width,
                                     gen_max_len);
            auto ids = gen.tokens;
            if (!ids.empty() && ids.back() == text::kEos) ids.pop_back();
            auto toks = vocab.decode(ids);
            cons_sum += metrics::consistency(toks, ex.topics, vocab, m.param("base.embed"));
            generated.push_back({toks, ex.topics});
            cands.push_back(std::move(toks));
            refs.push_back(text::tokenize(ex.essay));
        }

        AblationRow row;
        row.mode = model::mode_name(mode);
        row.bleu = metrics::bleu(cands, refs);
        try {
            row.dist2 = metrics::dist2(cands);
        } catch (const DataError&) {
            row.dist2 = 0.0; // every generated essay was shorter than a bigram
        }
        row.consistency = cons_sum / (double)eval_set.size();
        row.novelty = metrics::novelty(generated, corpus);
        result.rows.push_back(row);
    }

    std::string text = "mode     BLEU    DIST-2  Consistency  Novelty\n";
    std::string tsv = "mode\tbleu\tdist2\tconsistency\tnovelty\n";
    for (const auto& r : result.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-8s %-7s %-7s %-12s %s\n", r.mode.c_str(),
                      fmt(r.bleu).c_str(), fmt(r.dist2).c_str(), fmt(r.consistency).c_str(),
                      fmt(r.novelty).c_str());
        text += line;
        tsv += r.mode + "\t" + fmt(r.bleu) + "\t" + fmt(r.dist2) + "\t" + fmt(r.consistency) +
               "\t" + fmt(r.novelty) + "\n";
    }
    result.table_text = text;
    result.table_tsv = tsv;
    return result;
}

} // namespace teg::train
