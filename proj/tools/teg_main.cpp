#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teg/data/pipeline.hpp"
#include "teg/gen/beam.hpp"
#include "teg/metrics/metrics.hpp"
#include "teg/model/checkpoint.hpp"
#include "teg/train/ablate.hpp"
#include "teg/train/trainer.hpp"
#include "teg/util/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace teg;

namespace {

// every flag can also be set through the environment as TEG_<FLAG>
CLI::Option* envify(CLI::Option* opt) {
    std::string name = opt->get_name(); // longest form, e.g. "--min-words"
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    std::replace(name.begin(), name.end(), '-', '_');
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return (char)std::toupper(c); });
    return opt->envname("TEG_" + name);
}

void write_resolved_config(const std::string& out_dir, const json& cfg) {
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "resolved_config.json", std::ios::binary);
    f << cfg.dump(2) << "\n";
}

struct ModelFlags {
    int d_model = 64, heads = 4, enc_layers = 2, dec_layers = 2, d_ff = 128;
    int max_len = 200, prefix_len = 30, n_max = 5;
    double phi = 0.2;
    int vocab_cap = 0, min_count = 1;

    void add(CLI::App* cmd) {
        envify(cmd->add_option("--d-model", d_model, "model width"));
        envify(cmd->add_option("--heads", heads, "attention heads"));
        envify(cmd->add_option("--enc-layers", enc_layers, "encoder layers"));
        envify(cmd->add_option("--dec-layers", dec_layers, "decoder layers"));
        envify(cmd->add_option("--ff", d_ff, "feed-forward width"));
        envify(cmd->add_option("--max-len", max_len, "positional table length"));
        envify(cmd->add_option("--phi", phi, "content-selection threshold"));
        envify(cmd->add_option("--prefix-len", prefix_len, "prefix bank length"));
        envify(cmd->add_option("--n-max", n_max, "maximum topic count"));
        envify(cmd->add_option("--vocab-size", vocab_cap, "vocabulary cap, 0 = unlimited"));
        envify(cmd->add_option("--min-count", min_count, "minimum token count for vocab"));
    }

    model::ModelConfig to_config(int vocab_size) const {
        model::ModelConfig c;
        c.vocab_size = vocab_size;
        c.d_model = d_model;
        c.n_heads = heads;
        c.enc_layers = enc_layers;
        c.dec_layers = dec_layers;
        c.d_ff = d_ff;
        c.max_len = max_len;
        c.phi = phi;
        c.prefix_len = prefix_len;
        c.n_max = n_max;
        return c;
    }

    json to_json() const {
        return json{{"d_model", d_model},       {"heads", heads},
                    {"enc_layers", enc_layers}, {"dec_layers", dec_layers},
                    {"ff", d_ff},               {"max_len", max_len},
                    {"phi", phi},               {"prefix_len", prefix_len},
                    {"n_max", n_max},           {"vocab_size", vocab_cap},
                    {"min_count", min_count}};
    }
};

struct TrainFlags {
    std::string preset = "desk";
    int epochs = 0; // 0 = take from preset
    double lr = 0.0;
    int batch = 8, beam = 3;
    double clip = 1.0;
    uint64_t seed = 0;

    void add(CLI::App* cmd) {
        envify(cmd->add_option("--preset", preset, "desk or full-scale defaults")
                   ->check(CLI::IsMember({"desk", "full"})));
        envify(cmd->add_option("--epochs", epochs, "training epochs (0 = preset)"));
        envify(cmd->add_option("--lr", lr, "learning rate (0 = preset)"));
        envify(cmd->add_option("--batch", batch, "batch size"));
        envify(cmd->add_option("--beam", beam, "beam width"));
        envify(cmd->add_option("--clip", clip, "gradient clip norm"));
        envify(cmd->add_option("--seed", seed, "run seed"));
    }

    void resolve() {
        if (epochs == 0) epochs = preset == "full" ? 50 : 200;
        if (lr == 0.0) lr = preset == "full" ? 5e-6 : 3e-4;
    }

    json to_json() const {
        return json{{"preset", preset}, {"epochs", epochs}, {"lr", lr},
                    {"batch", batch},   {"beam", beam},     {"clip", clip},
                    {"seed", seed}};
    }
};

std::vector<std::string> parse_topic_line(const std::string& line) {
    std::string s = line;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::vector<std::string> topics;
    std::istringstream in(s);
    std::string w;
    while (in >> w) topics.push_back(w);
    return topics;
}

json gen_record(const std::vector<std::string>& topics, const gen::GenResult& r,
                const text::Vocab& vocab) {
    return json{{"topics", topics},
                {"essay", gen::to_text(r.tokens, vocab)},
                {"tokens", r.tokens.size()},
                {"norm_score", r.norm_score},
                {"truncated", r.truncated}};
}

int cmd_prepare(const std::string& corpus, const std::string& out,
                const data::PipelineConfig& cfg) {
    auto stats = data::build_dataset(corpus, out, cfg);
    json resolved{{"command", "prepare"},
                  {"corpus", corpus},
                  {"out", out},
                  {"min_words", cfg.min_words},
                  {"max_words", cfg.max_words},
                  {"topics_per_text", cfg.topics_per_text},
                  {"top_topics", cfg.top_topics},
                  {"train_size", cfg.train_size},
                  {"test_size", cfg.test_size},
                  {"seed", cfg.seed}};
    write_resolved_config(out, resolved);
    std::cout << "documents: " << stats.documents << "\n"
              << "paragraphs: " << stats.paragraphs << "\n"
              << "within length bounds: " << stats.length_kept << "\n"
              << "dropped (no topics): " << stats.no_topic_dropped << "\n"
              << "retained: " << stats.retained << "\n"
              << "train: " << stats.train_written << "\n"
              << "test: " << stats.test_written << "\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& out, const std::string& mode,
              ModelFlags mf, TrainFlags tf) {
    tf.resolve();
    auto examples = train::load_jsonl((fs::path(data_dir) / "train.jsonl").string());
    auto vocab = train::build_vocab(examples, (size_t)std::max(0, mf.vocab_cap),
                                    (size_t)std::max(1, mf.min_count));

    train::TrainConfig cfg;
    cfg.model = mf.to_config(vocab.size());
    cfg.mode = model::mode_from_string(mode);
    cfg.epochs = tf.epochs;
    cfg.lr = tf.lr;
    cfg.batch_size = tf.batch;
    cfg.beam_width = tf.beam;
    cfg.seed = tf.seed;
    cfg.clip_norm = tf.clip;
    cfg.out_dir = out;

    json resolved{{"command", "train"}, {"data", data_dir},        {"out", out},
                  {"mode", mode},       {"model", mf.to_json()},   {"train", tf.to_json()},
                  {"vocab_size", vocab.size()}};
    write_resolved_config(out, resolved);

    auto result = train::train(train::encode_dataset(examples, vocab, cfg.model.n_max,
                                                     cfg.model.max_len),
                               vocab, cfg, [](const train::EpochLog& log) {
                                   std::cout << "epoch " << log.epoch << " loss " << log.loss
                                             << "\n";
                               });
    std::cout << "final loss " << result.log.back().loss << "\n"
              << "checkpoint " << (fs::path(out) / "ckpt-best").string() << "\n";
    return 0;
}

int cmd_generate(const std::string& ckpt, const std::string& topics_arg,
                 const std::string& topics_file, int beam, int max_new,
                 const std::string& out) {
    auto loaded = model::load_checkpoint(ckpt);
    const auto& m = loaded.model;
    if (max_new <= 0) max_new = m.cfg.max_len - 1;

    std::vector<std::vector<std::string>> topic_sets;
    if (!topics_arg.empty()) topic_sets.push_back(parse_topic_line(topics_arg));
    if (!topics_file.empty()) {
        std::ifstream in(topics_file);
        if (!in) throw DataError("cannot open topics file: " + topics_file);
        std::string line;
        while (std::getline(in, line)) {
            auto topics = parse_topic_line(line);
            if (!topics.empty()) topic_sets.push_back(std::move(topics));
        }
    }
    if (topic_sets.empty()) throw DataError("no topics given; use --topics or --topics-file");

    std::ofstream records;
    if (!out.empty()) {
        json resolved{{"command", "generate"}, {"ckpt", ckpt}, {"beam", beam},
                      {"max_new", max_new},    {"mode", model::mode_name(loaded.mode)}};
        write_resolved_config(out, resolved);
        records.open(fs::path(out) / "generations.jsonl", std::ios::binary);
    }

    bool single = topic_sets.size() == 1 && !topics_arg.empty();
    for (const auto& topics : topic_sets) {
        auto source = train::encode_topics(topics, loaded.vocab, m.cfg.n_max);
        auto r = gen::generate(m, source, (int)topics.size(), loaded.mode, beam, max_new);
        auto rec = gen_record(topics, r, loaded.vocab);
        if (single)
            std::cout << rec["essay"].get<std::string>() << "\n";
        else
            std::cout << rec.dump() << "\n";
        if (records.is_open()) records << rec.dump() << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& ckpt, const std::string& data_dir, int beam, int max_new,
                 const std::string& out) {
    auto loaded = model::load_checkpoint(ckpt);
    const auto& m = loaded.model;
    if (max_new <= 0) max_new = m.cfg.max_len - 1;

    auto test_set = train::load_jsonl((fs::path(data_dir) / "test.jsonl").string());
    auto train_set = train::load_jsonl((fs::path(data_dir) / "train.jsonl").string());

    std::vector<metrics::NoveltyRecord> corpus;
    for (const auto& ex : train_set) corpus.push_back({text::tokenize(ex.essay), ex.topics});

    std::vector<metrics::Tokens> cands, refs;
    std::vector<double> cons_scores, novelty_terms;
    std::vector<std::string> essays;
    auto embed = m.param("base.embed");
    for (const auto& ex : test_set) {
        auto source = train::encode_topics(ex.topics, loaded.vocab, m.cfg.n_max);
        auto r = gen::generate(m, source, (int)ex.topics.size(), loaded.mode, beam, max_new);
        auto ids = r.tokens;
        if (!ids.empty() && ids.back() == text::kEos) ids.pop_back();
        auto toks = loaded.vocab.decode(ids);
        cons_scores.push_back(metrics::consistency(toks, ex.topics, loaded.vocab, embed));
        novelty_terms.push_back(metrics::novelty_term({toks, ex.topics}, corpus));
        essays.push_back(gen::to_text(r.tokens, loaded.vocab));
        cands.push_back(std::move(toks));
        refs.push_back(text::tokenize(ex.essay));
    }

    double bleu = metrics::bleu(cands, refs);
    double d2 = 0.0;
    try {
        d2 = metrics::dist2(cands);
    } catch (const DataError&) {
        d2 = 0.0; // nothing long enough to form a bigram
    }
    double cons = 0.0, nov = 0.0;
    for (double c : cons_scores) cons += c;
    cons /= (double)cons_scores.size();
    for (double n : novelty_terms) nov += 100.0 * n;
    nov /= (double)novelty_terms.size();

    std::cout << "BLEU " << bleu << "\n"
              << "DIST-2 " << d2 << "\n"
              << "Consistency " << cons << "\n"
              << "Novelty " << nov << "\n";

    if (!out.empty()) {
        json resolved{{"command", "evaluate"}, {"ckpt", ckpt}, {"data", data_dir},
                      {"beam", beam},          {"max_new", max_new}};
        write_resolved_config(out, resolved);
        json report{{"bleu", bleu}, {"dist2", d2}, {"consistency", cons}, {"novelty", nov}};
        std::ofstream rf(fs::path(out) / "report.json", std::ios::binary);
        rf << report.dump(2) << "\n";
        std::ofstream pr(fs::path(out) / "records.tsv", std::ios::binary);
        pr << "index\ttokens\tconsistency\tnovelty\tessay\n";
        for (size_t i = 0; i < essays.size(); ++i)
            pr << i << "\t" << cands[i].size() << "\t" << cons_scores[i] << "\t"
               << 100.0 * novelty_terms[i] << "\t" << essays[i] << "\n";
    }
    return 0;
}

int cmd_ablate(const std::string& data_dir, const std::string& out, ModelFlags mf,
               TrainFlags tf, int max_new) {
    tf.resolve();
    auto train_set = train::load_jsonl((fs::path(data_dir) / "train.jsonl").string());
    auto test_set = train::load_jsonl((fs::path(data_dir) / "test.jsonl").string());

    train::TrainConfig cfg;
    cfg.model = mf.to_config(1); // vocab size is filled in by the harness
    cfg.epochs = tf.epochs;
    cfg.lr = tf.lr;
    cfg.batch_size = tf.batch;
    cfg.beam_width = tf.beam;
    cfg.seed = tf.seed;
    cfg.clip_norm = tf.clip;
    cfg.out_dir = out;

    json resolved{{"command", "ablate"},   {"data", data_dir},      {"out", out},
                  {"model", mf.to_json()}, {"train", tf.to_json()}, {"max_new", max_new}};
    write_resolved_config(out, resolved);

    auto result = train::run_ablation(train_set, test_set, cfg, max_new);
    std::cout << result.table_text;
    const auto& base = result.rows[0];
    const auto& ipt = result.rows[3];
    std::cout << "info: DIST-2 " << ipt.mode << " " << (ipt.dist2 >= base.dist2 ? ">=" : "<")
              << " " << base.mode << " (" << ipt.dist2 << " vs " << base.dist2 << ")\n";

    std::ofstream txt(fs::path(out) / "ablation.txt", std::ios::binary);
    txt << result.table_text;
    std::ofstream tsv(fs::path(out) / "ablation.tsv", std::ios::binary);
    tsv << result.table_tsv;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topic-to-essay generator"};
    app.require_subcommand(1);
    std::function<int()> action;

    // prepare
    auto* prepare = app.add_subcommand("prepare", "build train/test files from a corpus dir");
    {
        auto corpus = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto cfg = std::make_shared<data::PipelineConfig>();
        prepare->add_option("corpus", *corpus, "directory of .txt files")->required();
        envify(prepare->add_option("--out", *out, "output directory")->required());
        envify(prepare->add_option("--min-words", cfg->min_words, "minimum paragraph words"));
        envify(prepare->add_option("--max-words", cfg->max_words, "maximum paragraph words"));
        envify(prepare->add_option("--topics", cfg->topics_per_text, "topics per text"));
        envify(prepare->add_option("--top-topics", cfg->top_topics, "retention topic count"));
        envify(prepare->add_option("--train-size", cfg->train_size, "training examples"));
        envify(prepare->add_option("--test-size", cfg->test_size, "test examples"));
        envify(prepare->add_option("--seed", cfg->seed, "shuffle seed"));
        prepare->callback([=, &action]() {
            action = [=]() { return cmd_prepare(*corpus, *out, *cfg); };
        });
    }

    // train
    auto* train_cmd = app.add_subcommand("train", "train one configuration");
    {
        auto data = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto mode = std::make_shared<std::string>("gcs-ipt");
        auto mf = std::make_shared<ModelFlags>();
        auto tf = std::make_shared<TrainFlags>();
        envify(train_cmd->add_option("--data", *data, "dataset directory")->required());
        envify(train_cmd->add_option("--out", *out, "run directory")->required());
        envify(train_cmd->add_option("--mode", *mode, "base|gcs|gcs-pt|gcs-ipt")
                   ->check(CLI::IsMember({"base", "gcs", "gcs-pt", "gcs-ipt"})));
        mf->add(train_cmd);
        tf->add(train_cmd);
        train_cmd->callback([=, &action]() {
            action = [=]() { return cmd_train(*data, *out, *mode, *mf, *tf); };
        });
    }

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "generate essays from topics");
    {
        auto ckpt = std::make_shared<std::string>();
        auto topics = std::make_shared<std::string>();
        auto topics_file = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto beam = std::make_shared<int>(3);
        auto max_new = std::make_shared<int>(0);
        envify(gen_cmd->add_option("--ckpt", *ckpt, "checkpoint directory")->required());
        envify(gen_cmd->add_option("--topics", *topics, "inline topic words"));
        envify(gen_cmd->add_option("--topics-file", *topics_file, "one topic set per line"));
        envify(gen_cmd->add_option("--beam", *beam, "beam width"));
        envify(gen_cmd->add_option("--max-new", *max_new, "max generated tokens, 0 = model"));
        envify(gen_cmd->add_option("--out", *out, "optional run directory"));
        gen_cmd->callback([=, &action]() {
            action = [=]() {
                return cmd_generate(*ckpt, *topics, *topics_file, *beam, *max_new, *out);
            };
        });
    }

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on a test set");
    {
        auto ckpt = std::make_shared<std::string>();
        auto data = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto beam = std::make_shared<int>(3);
        auto max_new = std::make_shared<int>(0);
        envify(eval_cmd->add_option("--ckpt", *ckpt, "checkpoint directory")->required());
        envify(eval_cmd->add_option("--data", *data, "dataset directory")->required());
        envify(eval_cmd->add_option("--beam", *beam, "beam width"));
        envify(eval_cmd->add_option("--max-new", *max_new, "max generated tokens, 0 = model"));
        envify(eval_cmd->add_option("--out", *out, "optional run directory"));
        eval_cmd->callback([=, &action]() {
            action = [=]() { return cmd_evaluate(*ckpt, *data, *beam, *max_new, *out); };
        });
    }

    // ablate
    auto* ablate_cmd = app.add_subcommand("ablate", "train and score all four modes");
    {
        auto data = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto mf = std::make_shared<ModelFlags>();
        auto tf = std::make_shared<TrainFlags>();
        auto max_new = std::make_shared<int>(0);
        envify(ablate_cmd->add_option("--data", *data, "dataset directory")->required());
        envify(ablate_cmd->add_option("--out", *out, "run directory")->required());
        envify(ablate_cmd->add_option("--max-new", *max_new, "max generated tokens"));
        mf->add(ablate_cmd);
        tf->add(ablate_cmd);
        ablate_cmd->callback([=, &action]() {
            action = [=]() { return cmd_ablate(*data, *out, *mf, *tf, *max_new); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return action();
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const ShapeError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
