#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace encmf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Ensembles are stored column-wise: column i is member i, so an ensemble of N
// members in R^n is an n-by-N matrix. Member order is significant; member i of
// a state ensemble pairs with member i of the matching observation ensemble.
using StateEnsemble = Matrix;
using ObservationEnsemble = Matrix;

/// Invalid input to an operation (dimension mismatch, empty ensemble, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical breakdown (singular solve, blow-up, non-finite loss).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace encmf
