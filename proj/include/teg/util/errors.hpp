#pragma once

#include <stdexcept>
#include <string>

namespace teg {

// Bad tensor shapes, index ranges, malformed call contracts.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Missing/invalid input data: files, corpora, vocab, config values.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf gradients, diverged loss, off-simplex distributions.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace teg
