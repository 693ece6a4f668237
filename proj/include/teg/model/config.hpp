#pragma once

#include <string>

#include "teg/util/errors.hpp"

namespace teg::model {

// Ablation rows: plain encoder-decoder, + copy/content selection, + frozen
// fixed-length prefix, + frozen variable-length prefix with index selector.
enum class Mode { Base, GCS, GCS_PT, GCS_IPT };

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Base: return "base";
        case Mode::GCS: return "gcs";
        case Mode::GCS_PT: return "gcs-pt";
        case Mode::GCS_IPT: return "gcs-ipt";
    }
    return "?";
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "base") return Mode::Base;
    if (s == "gcs") return Mode::GCS;
    if (s == "gcs-pt") return Mode::GCS_PT;
    if (s == "gcs-ipt") return Mode::GCS_IPT;
    throw DataError("unknown mode '" + s + "' (expected base|gcs|gcs-pt|gcs-ipt)");
}

inline bool mode_has_copy(Mode m) { return m != Mode::Base; }
inline bool mode_has_prefix(Mode m) { return m == Mode::GCS_PT || m == Mode::GCS_IPT; }
inline bool mode_improved(Mode m) { return m == Mode::GCS_IPT; }

struct ModelConfig {
    int vocab_size = 0;
    int d_model = 64;
    int n_heads = 4;
    int enc_layers = 2;
    int dec_layers = 2;
    int d_ff = 128;
    int max_len = 200;
    double phi = 0.2;
    int prefix_len = 30;  // L_base
    int n_max = 5;        // largest topic count

    void validate() const {
        if (vocab_size < 5) throw DataError("vocab_size must cover the special tokens");
        if (d_model % n_heads != 0) throw DataError("d_model must divide evenly into heads");
        if (prefix_len < n_max) throw DataError("prefix_len must be at least n_max");
        if (phi < 0.0 || phi >= 1.0) throw DataError("phi must lie in [0,1)");
        if (max_len < 2) throw DataError("max_len too small");
    }
};

}  // namespace teg::model
