#pragma once

#include <stdexcept>
#include <string>

namespace leakscope {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Distribution parameters out of range.
class InvalidDistribution : public Error {
public:
    using Error::Error;
};

/// Ill-formed model: bad parent ids, duplicate query names, observation/type mismatch.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Raised by user functions inside derived nodes (division by zero, empty input, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A single draw could not be completed; the message names the offending node.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// Conditioning failed: impossible evidence, rejection floor, all-zero weights.
class InferenceError : public Error {
public:
    using Error::Error;
};

/// Estimator preconditions violated (empty input, wrong column type, support mismatch).
class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace leakscope
