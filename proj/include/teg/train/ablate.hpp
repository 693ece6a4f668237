#pragma once

#include <string>
#include <vector>

#include "teg/train/trainer.hpp"

namespace teg::train {

struct AblationRow {
    std::string mode;
    double bleu = 0, dist2 = 0, consistency = 0, novelty = 0;
};

struct AblationResult {
    std::vector<AblationRow> rows; // base, gcs, gcs-pt, gcs-ipt
    std::string table_text;        // aligned human-readable table
    std::string table_tsv;         // tab-separated copy with header
};

// Trains all four configurations with a shared seed and data order, generates
// on the eval set with beam search, and scores the four metrics per row.
// base_cfg.mode is ignored; base_cfg.out_dir, when set, receives one training
// subdirectory per mode.
AblationResult run_ablation(const std::vector<Example>& train_set,
                            const std::vector<Example>& eval_set, TrainConfig base_cfg,
                            int gen_max_len = 0);

} // namespace teg::train
