#pragma once

#include <optional>

#include <Eigen/Dense>

#include "kahlerdyn/exact.hpp"

namespace kahlerdyn {

/// Dense real matrix carried either as exact rationals or as doubles.
/// Exact matrices always keep a double shadow for the numerical paths.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(Eigen::MatrixXd values);
  explicit RealMatrix(ExactMatrix entries);

  static RealMatrix identity(int n);

  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  bool is_square() const { return rows() == cols(); }
  bool is_exact() const { return exact_.has_value(); }

  const Eigen::MatrixXd& values() const { return values_; }
  /// Throws Error when the matrix is in float mode.
  const ExactMatrix& exact() const;

  /// Exact product when both factors are exact, float otherwise.
  friend RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);

 private:
  Eigen::MatrixXd values_;
  std::optional<ExactMatrix> exact_;
};

/// Rationalizes a double matrix whose entries are integers up to `tol`.
/// Returns nullopt when some entry is not within tol of an integer.
std::optional<RealMatrix> integral_snap(const Eigen::MatrixXd& m, double tol);

}  // namespace kahlerdyn
