#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "teg/model/model.hpp"
#include "teg/num/adam.hpp"
#include "teg/train/dataset.hpp"

namespace teg::train {

struct TrainConfig {
    model::ModelConfig model;
    model::Mode mode = model::Mode::GCS;
    int epochs = 200;
    double lr = 3e-4;
    int batch_size = 8;
    int beam_width = 3;
    uint64_t seed = 0;
    double clip_norm = 1.0;
    // directory for per-epoch checkpoints and the metrics log; empty keeps
    // everything in memory
    std::string out_dir;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
};

struct TrainResult {
    std::shared_ptr<model::TegModel> model;
    std::vector<EpochLog> log;
};

// Mean negative log-likelihood of the target tokens under the per-step
// distributions. Probabilities are clamped at 1e-12 before the log. Pad
// targets are excluded from both the sum and the mean.
num::TensorPtr nll_loss(const num::TensorPtr& p_final, const std::vector<int>& targets);

// Fraction of non-pad target tokens whose teacher-forced argmax matches.
double teacher_forced_accuracy(const model::TegModel& m,
                               const std::vector<EncodedExample>& examples,
                               model::Mode mode);

// Mean per-example nll over a dataset without touching gradients.
double dataset_loss(const model::TegModel& m, const std::vector<EncodedExample>& examples,
                    model::Mode mode);

TrainResult train(const std::vector<EncodedExample>& examples, const text::Vocab& vocab,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochLog&)>& on_epoch = nullptr);

} // namespace teg::train
