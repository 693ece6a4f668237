#include "teg/train/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "teg/model/checkpoint.hpp"
#include "teg/num/ops.hpp"
#include "teg/util/errors.hpp"
#include "teg/util/rng.hpp"

namespace teg::train {

namespace fs = std::filesystem;
using num::Tensor;
using num::TensorPtr;

void TrainConfig::validate() const {
    model.validate();
    if (epochs < 1) throw DataError("epochs must be >= 1");
    if (!(lr > 0.0)) throw DataError("learning rate must be positive");
    if (batch_size < 1) throw DataError("batch size must be >= 1");
    if (beam_width < 1) throw DataError("beam width must be >= 1");
    if (!(clip_norm > 0.0)) throw DataError("clip norm must be positive");
}

TensorPtr nll_loss(const TensorPtr& p_final, const std::vector<int>& targets) {
    if ((int)targets.size() > p_final->rows())
        throw ShapeError("nll_loss: " + std::to_string(targets.size()) +
                         " targets but only " + std::to_string(p_final->rows()) +
                         " distributions");
    if (targets.empty()) throw ShapeError("nll_loss: empty target");
    std::vector<int> keep;
    for (size_t t = 0; t < targets.size(); ++t)
        if (targets[t] != text::kPad) keep.push_back((int)t);
    if (keep.empty()) return Tensor::scalar(0.0);

    auto p = ((int)targets.size() < p_final->rows())
                 ? num::ops::slice_rows(p_final, 0, (int)targets.size())
                 : p_final;
    auto picked = num::ops::select_per_row(p, targets);
    auto kept = ((int)keep.size() < (int)targets.size()) ? num::ops::gather_rows(picked, keep)
                                                         : picked;
    auto logs = num::ops::log(num::ops::clamp_min(kept, 1e-12));
    return num::ops::smul(num::ops::mean_all(logs), -1.0);
}

namespace {

struct Split {
    std::vector<int> input;  // target without the trailing token
    std::vector<int> labels; // target without the leading BOS
};

Split split_target(const EncodedExample& ex) {
    if (ex.target.size() < 2) throw DataError("target needs at least BOS and one token");
    Split s;
    s.input.assign(ex.target.begin(), ex.target.end() - 1);
    s.labels.assign(ex.target.begin() + 1, ex.target.end());
    return s;
}

} // namespace

double teacher_forced_accuracy(const model::TegModel& m,
                               const std::vector<EncodedExample>& examples,
                               model::Mode mode) {
    num::NoGradGuard ng;
    long long hit = 0, total = 0;
    for (const auto& ex : examples) {
        auto s = split_target(ex);
        auto fwd = m.forward(ex.source, ex.n_topics, s.input, mode, true);
        int V = fwd.p_final->cols();
        for (size_t t = 0; t < s.labels.size(); ++t) {
            if (s.labels[t] == text::kPad) continue;
            const double* row = fwd.p_final->data.data() + t * (size_t)V;
            int best = 0;
            for (int j = 1; j < V; ++j)
                if (row[j] > row[best]) best = j;
            hit += (best == s.labels[t]);
            ++total;
        }
    }
    return total ? (double)hit / (double)total : 0.0;
}

double dataset_loss(const model::TegModel& m, const std::vector<EncodedExample>& examples,
                    model::Mode mode) {
    num::NoGradGuard ng;
    double sum = 0.0;
    for (const auto& ex : examples) {
        auto s = split_target(ex);
        auto fwd = m.forward(ex.source, ex.n_topics, s.input, mode, true);
        sum += nll_loss(fwd.p_final, s.labels)->item();
    }
    return examples.empty() ? 0.0 : sum / (double)examples.size();
}

TrainResult train(const std::vector<EncodedExample>& examples, const text::Vocab& vocab,
                  const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch) {
    cfg.validate();
    if (examples.empty()) throw DataError("training set is empty");
    if (cfg.model.vocab_size != vocab.size())
        throw DataError("config vocab_size does not match the vocabulary");

    TrainResult result;
    result.model = std::make_shared<model::TegModel>(
        model::TegModel::init(cfg.model, rng::derive_seed(cfg.seed, 1)));
    auto& m = *result.model;
    auto trainable = m.set_trainable(cfg.mode);

    num::Adam opt(cfg.lr);
    std::vector<TensorPtr> trainable_ptrs;
    for (const auto& [name, p] : trainable) {
        opt.add_param(name, p);
        trainable_ptrs.push_back(p);
    }

    std::ofstream metrics_log;
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        metrics_log.open(fs::path(cfg.out_dir) / "metrics.jsonl", std::ios::app);
    }

    rng::Stream shuffle_rng(rng::derive_seed(cfg.seed, 2));
    std::vector<size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);

    double best_loss = HUGE_VAL;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_sum = 0.0;
        for (size_t pos = 0; pos < order.size(); pos += (size_t)cfg.batch_size) {
            size_t end = std::min(order.size(), pos + (size_t)cfg.batch_size);
            double inv = 1.0 / (double)(end - pos);
            opt.zero_grad();
            for (size_t k = pos; k < end; ++k) {
                const auto& ex = examples[order[k]];
                auto s = split_target(ex);
                auto fwd = m.forward(ex.source, ex.n_topics, s.input, cfg.mode, true);
                auto loss = nll_loss(fwd.p_final, s.labels);
                double value = loss->item();
                if (!std::isfinite(value))
                    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                                       ", optimizer step " +
                                       std::to_string(opt.step_count() + 1));
                epoch_sum += value;
                num::backward(num::ops::smul(loss, inv));
            }
            num::clip_global_norm(trainable_ptrs, cfg.clip_norm);
            opt.step();
        }

        EpochLog log{epoch, epoch_sum / (double)examples.size()};
        result.log.push_back(log);
        if (on_epoch) on_epoch(log);

        if (!cfg.out_dir.empty()) {
            nlohmann::json rec{{"epoch", log.epoch},
                               {"step", opt.step_count()},
                               {"loss", log.loss},
                               {"mode", model::mode_name(cfg.mode)}};
            metrics_log << rec.dump() << "\n";
            metrics_log.flush();

            model::OptimizerState state;
            state.step = opt.step_count();
            for (auto& slot : opt.slots()) state.moments.emplace_back(slot.name, slot.m, slot.v);
            model::save_checkpoint((fs::path(cfg.out_dir) / "ckpt-latest").string(), m, vocab,
                                   cfg.mode, &state);
            if (log.loss < best_loss) {
                best_loss = log.loss;
                model::save_checkpoint((fs::path(cfg.out_dir) / "ckpt-best").string(), m,
                                       vocab, cfg.mode, &state);
            }
        }
    }
    return result;
}

} // namespace teg::train
