#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsdst {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The caller supplied something malformed: wrong shapes, out-of-range
/// counts, non-finite samples, invalid configuration.
class InputError : public Error {
public:
    using Error::Error;
};

/// A sample index beyond the end of the observed sequence was required.
class InsufficientSamplesError : public InputError {
public:
    InsufficientSamplesError(std::size_t required_index, std::size_t length)
        : InputError("insufficient samples: index " + std::to_string(required_index) +
                     " required but sequence has length " + std::to_string(length)),
          required_index_(required_index), length_(length) {}

    std::size_t required_index() const noexcept { return required_index_; }
    std::size_t length() const noexcept { return length_; }

private:
    std::size_t required_index_;
    std::size_t length_;
};

/// The input was well-formed but the method could not produce an answer.
class AlgorithmError : public Error {
public:
    using Error::Error;
};

/// Reference simplex volume is numerically zero (model order too high or
/// repeated common ratios).
class DegenerateSimplexError : public AlgorithmError {
public:
    using AlgorithmError::AlgorithmError;
};

/// No candidate model order passed the geometric-volume test.
class DetectionError : public AlgorithmError {
public:
    using AlgorithmError::AlgorithmError;
};

/// Decomposition did not reproduce the observed sequence.
class InconsistencyError : public AlgorithmError {
public:
    using AlgorithmError::AlgorithmError;
};

/// Not enough distinct quotient candidates to evaluate a similarity.
class InfeasibleError : public AlgorithmError {
public:
    using AlgorithmError::AlgorithmError;
};

} // namespace gsdst
