#pragma once

#include <stdexcept>
#include <string>

namespace saswarm {

/// Caller passed an input that violates an operation precondition.
struct RejectedInput : std::invalid_argument {
  explicit RejectedInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Too few covered cells to estimate background statistics.
struct DetectorUnavailable : std::runtime_error {
  explicit DetectorUnavailable(const std::string& what) : std::runtime_error(what) {}
};

/// Pairwise-distance enforcement did not converge.
struct ConstraintInfeasible : std::runtime_error {
  explicit ConstraintInfeasible(const std::string& what) : std::runtime_error(what) {}
};

/// Requested table entry outside the supported range.
struct UnsupportedSize : std::out_of_range {
  explicit UnsupportedSize(const std::string& what) : std::out_of_range(what) {}
};

/// Invalid or inconsistent scenario configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace saswarm
