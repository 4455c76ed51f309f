#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace neckfield {

/// Curve specification that cannot be differentiated on the requested range.
class UnsupportedProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration or parameter outside its admissible set.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The mesher declined to build a mesh whose estimated size exceeds the policy.
class MeshRefusal : public std::runtime_error {
 public:
  MeshRefusal(const std::string& what, std::size_t estimated_elements)
      : std::runtime_error(what), estimated_elements_(estimated_elements) {}

  std::size_t estimated_elements() const noexcept { return estimated_elements_; }

 private:
  std::size_t estimated_elements_;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace neckfield
