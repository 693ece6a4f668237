#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "teg/model/model.hpp"
#include "teg/text/vocab.hpp"

namespace teg::model {

struct OptimizerState {
    long long step = 0;
    // parameter name -> first/second moment buffers
    std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>>> moments;
};

// Directory layout: manifest.json (names, shapes, dtype, hashes, mode),
// params.bin (raw little-endian float32 payloads in manifest order),
// vocab.txt. Round trips are value-exact at float32.
void save_checkpoint(const std::string& dir, const TegModel& model, const text::Vocab& vocab,
                     Mode mode, const OptimizerState* opt = nullptr);

struct LoadedCheckpoint {
    TegModel model;
    text::Vocab vocab;
    Mode mode = Mode::Base;
    OptimizerState opt;
    bool has_opt = false;
};

LoadedCheckpoint load_checkpoint(const std::string& dir);

std::string config_hash(const ModelConfig& cfg);

}  // namespace teg::model
