#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cuspfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or shape mismatch detected before any numerics ran.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Tensor valence outside the supported range.
class ValenceError : public Error {
public:
    using Error::Error;
};

/// Metric is not symmetric positive definite at some node.
class MetricDegeneracyError : public Error {
public:
    MetricDegeneracyError(const std::string& what, std::size_t node)
        : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
    std::size_t node() const { return node_; }

private:
    std::size_t node_;
};

/// Iterative method, quadrature or root finder failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Experiment configuration is malformed.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cuspfs
